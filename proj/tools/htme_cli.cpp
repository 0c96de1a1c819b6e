// Command-line front end: scenario simulation, rate tables, invariant checks.

#include "htme/htme.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using nlohmann::json;
using namespace htme;

[[noreturn]] void fail(int code, const std::string& err_code, const std::string& msg) {
    json e = {{"code", err_code}, {"message", msg}};
    std::cerr << e.dump() << "\n";
    std::exit(code);
}

void reject_unknown(const json& obj, const std::vector<std::string>& known,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : known)
            if (it.key() == k) { ok = true; break; }
        if (!ok)
            throw Error("config", "unknown key \"" + it.key() + "\" in " + where);
    }
}

double num(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw Error("config", "key \"" + key + "\" must be a number");
    return obj[key].get<double>();
}

struct ParsedConfig {
    std::string scenario;
    GeneratorKind kind = GeneratorKind::lindblad;
    bool has_generator = false;
    TlsConfig tls;
    SingletTripletConfig st;
    std::string trajectory_path = "trajectory.csv";
    std::string summary_path = "summary.json";
};

GeneratorKind parse_kind(const std::string& s) {
    if (s == "lindblad") return GeneratorKind::lindblad;
    if (s == "linearized") return GeneratorKind::linearized;
    if (s == "htme") return GeneratorKind::htme;
    if (s == "arh") return GeneratorKind::arh;
    if (s == "double_commutator") return GeneratorKind::double_commutator_only;
    throw Error("config", "unknown generator \"" + s + "\"");
}

void check_mode_combo(const json& cfg, GeneratorKind kind) {
    if (!cfg.contains("spectral_mode")) return;
    std::string m = cfg["spectral_mode"].get<std::string>();
    bool quantum_builder =
        (kind == GeneratorKind::lindblad || kind == GeneratorKind::linearized);
    std::string need = quantum_builder ? "quantum" : "symmetrized";
    if (m != need)
        throw Error("config", "generator \"" + std::string(to_string(kind)) +
                                  "\" requires spectral_mode \"" + need + "\"");
}

ParsedConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("config", "cannot read config file: " + path);
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::exception& e) {
        throw Error("config", std::string("malformed JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw Error("config", "config root must be an object");
    reject_unknown(cfg, {"scenario", "generator", "spectral_mode", "params", "output"},
                   "config");
    if (!cfg.contains("scenario"))
        throw Error("config", "config needs a \"scenario\" key");

    ParsedConfig out;
    out.scenario = cfg["scenario"].get<std::string>();
    if (out.scenario != "tls" && out.scenario != "singlet_triplet" &&
        out.scenario != "lowT")
        throw Error("config", "unknown scenario \"" + out.scenario + "\"");

    if (cfg.contains("generator")) {
        out.kind = parse_kind(cfg["generator"].get<std::string>());
        out.has_generator = true;
        check_mode_combo(cfg, out.kind);
    }

    json p = cfg.value("params", json::object());
    if (!p.is_object()) throw Error("config", "\"params\" must be an object");
    if (out.scenario == "singlet_triplet") {
        reject_unknown(p, {"omega0", "beta_T", "tau_ran", "omega_ran", "kappa",
                           "t_max", "n_steps"},
                       "params");
        out.st.omega0 = num(p, "omega0", out.st.omega0);
        out.st.beta_T = num(p, "beta_T", out.st.beta_T);
        out.st.tau_ran = num(p, "tau_ran", out.st.tau_ran);
        out.st.omega_ran = num(p, "omega_ran", out.st.omega_ran);
        out.st.kappa = num(p, "kappa", out.st.kappa);
        out.st.t_max = num(p, "t_max", out.st.t_max);
        out.st.n_steps = static_cast<int>(num(p, "n_steps", out.st.n_steps));
    } else {
        reject_unknown(p, {"omega0", "beta_T", "gamma0_scale", "t_max", "n_steps",
                           "initial_sz", "initial_sx"},
                       "params");
        out.tls.omega0 = num(p, "omega0", out.tls.omega0);
        out.tls.beta_T = num(p, "beta_T", out.tls.beta_T);
        out.tls.gamma0_scale = num(p, "gamma0_scale", out.tls.gamma0_scale);
        out.tls.t_max = num(p, "t_max", out.tls.t_max);
        out.tls.n_steps = static_cast<int>(num(p, "n_steps", out.tls.n_steps));
        out.tls.initial_sz = num(p, "initial_sz", out.tls.initial_sz);
        out.tls.initial_sx = num(p, "initial_sx", out.tls.initial_sx);
    }

    json o = cfg.value("output", json::object());
    if (!o.is_object()) throw Error("config", "\"output\" must be an object");
    reject_unknown(o, {"trajectory_path", "summary_path"}, "output");
    out.trajectory_path = o.value("trajectory_path", out.trajectory_path);
    out.summary_path = o.value("summary_path", out.summary_path);
    return out;
}

json rates_to_json(const std::map<std::string, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

json st_summary(const ParsedConfig& pc, const SingletTripletResult& res) {
    json s;
    s["scenario"] = "singlet_triplet";
    s["generator"] = to_string(pc.kind);
    s["sigma_matrix"] = matrix_to_json(res.sigma);
    s["oracle_sigma"] = matrix_to_json(res.oracle_sigma);
    s["T1"] = res.rates.relaxation_times.at("Z");
    s["Ts"] = res.rates.relaxation_times.at("S");
    s["T1D"] = res.rates.relaxation_times.at("D");
    s["leakage"] = res.rates.leakage;
    s["cz_oracle_deviation"] = res.cz_oracle_deviation;
    s["cs_oracle_deviation"] = res.cs_oracle_deviation;
    return s;
}

json tls_summary(const ParsedConfig& pc, const TlsResult& res) {
    json s;
    s["scenario"] = "tls";
    s["generator"] = to_string(pc.kind);
    s["oracle_rates"] = rates_to_json(res.oracle_rates);
    s["fitted_rates"] = rates_to_json(res.fitted_rates);
    s["max_deviation"] = res.max_deviation;
    return s;
}

json lowt_summary(const LowTResult& res) {
    json s;
    s["scenario"] = "lowT";
    s["weighted_generator_norm"] = res.weighted_generator_norm;
    s["lindblad_rate"] = res.lindblad_rate;
    s["lindblad_sz_eq"] = res.lindblad_sz_eq;
    return s;
}

int run_scenario(const std::string& config_path, const std::string& out_dir,
                 bool with_trajectory) {
    ParsedConfig pc = parse_config(config_path);
    json summary;
    std::string csv;
    if (pc.scenario == "tls") {
        if (!pc.has_generator)
            throw Error("config", "tls scenario needs a \"generator\" key");
        TlsConfig cfg = pc.tls;
        if (!with_trajectory) cfg.n_steps = 2;
        TlsResult res = run_tls(cfg, pc.kind);
        summary = tls_summary(pc, res);
        if (with_trajectory) csv = trajectory_csv(res.trajectory);
    } else if (pc.scenario == "singlet_triplet") {
        if (!pc.has_generator)
            throw Error("config", "singlet_triplet scenario needs a \"generator\" key");
        if (pc.kind != GeneratorKind::htme && pc.kind != GeneratorKind::arh)
            throw Error("config",
                        "singlet_triplet supports htme and arh generators only");
        SingletTripletConfig cfg = pc.st;
        if (!with_trajectory) cfg.n_steps = 2;
        SingletTripletResult res = run_singlet_triplet(cfg, pc.kind);
        summary = st_summary(pc, res);
        if (with_trajectory) csv = trajectory_csv(res.trajectory);
    } else {
        LowTResult res = run_lowT_pathology(pc.tls);
        summary = lowt_summary(res);
    }
    write_file(out_dir + "/" + pc.summary_path, canonical_json(summary) + "\n");
    if (!csv.empty()) write_file(out_dir + "/" + pc.trajectory_path, csv);
    return 0;
}

int run_check(const std::string& level_str, unsigned long seed) {
    CheckLevel level =
        (level_str == "full") ? CheckLevel::full : CheckLevel::fast;
    auto results = run_checks(level, seed);
    bool all_ok = true;
    for (const auto& r : results) {
        std::printf("%-40s %s  value=%.3e  bound=%.3e\n", r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.value, r.threshold);
        all_ok = all_ok && r.pass;
    }
    std::printf("%zu checks, %s\n", results.size(), all_ok ? "all passed" : "FAILURES");
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markovian master-equation toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", level = "fast";

    auto* sim = app.add_subcommand("simulate", "run a scenario, write CSV + summary");
    sim->add_option("--config", config_path, "JSON config path")->required();
    sim->add_option("--out-dir", out_dir, "output directory");

    auto* rates = app.add_subcommand("rates", "emit the rate matrix summary only");
    rates->add_option("--config", config_path, "JSON config path")->required();
    rates->add_option("--out-dir", out_dir, "output directory");

    auto* check = app.add_subcommand("check", "run the invariant suites");
    check->add_option("--level", level, "fast or full")
        ->check(CLI::IsMember({"fast", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        nlohmann::json err = {{"code", "config"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }

    unsigned long seed = 0;
    if (const char* s = std::getenv("HTME_SEED")) {
        try {
            seed = std::stoul(s);
        } catch (...) {
            fail(2, "config", "HTME_SEED must be a non-negative integer");
        }
    }

    try {
        if (sim->parsed()) return run_scenario(config_path, out_dir, true);
        if (rates->parsed()) return run_scenario(config_path, out_dir, false);
        return run_check(level, seed);
    } catch (const htme::Error& e) {
        bool config_err = e.code() == "config" || e.code() == "invalid_arg" ||
                          e.code() == "mode_mismatch";
        fail(config_err ? 2 : 3, e.code(), e.what());
    } catch (const std::exception& e) {
        fail(3, "numerical", e.what());
    }
}
