#pragma once

// Serialization: canonical JSON (sorted keys, %.17g floats, reproducible
// byte-for-byte), trajectory CSV, tabulated spectral models, generator export.

#include "htme/evolution.hpp"
#include "htme/generators.hpp"
#include "htme/operator_core.hpp"
#include "htme/spectral.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace htme {

inline std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void dump_canonical(const nlohmann::json& j, std::string& out) {
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        out += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) { // std::map: sorted keys
            if (!first) out += ',';
            first = false;
            out += nlohmann::json(it.key()).dump();
            out += ':';
            dump_canonical(it.value(), out);
        }
        out += '}';
        break;
    }
    case nlohmann::json::value_t::array: {
        out += '[';
        for (size_t i = 0; i < j.size(); ++i) {
            if (i) out += ',';
            dump_canonical(j[i], out);
        }
        out += ']';
        break;
    }
    case nlohmann::json::value_t::number_float:
        out += format_double(j.get<double>());
        break;
    default:
        out += j.dump();
        break;
    }
}

} // namespace detail

/// Deterministic serialization: object keys sorted, floats via %.17g, no
/// whitespace. Parsing and re-dumping a canonical string is the identity.
inline std::string canonical_json(const nlohmann::json& j) {
    std::string out;
    detail::dump_canonical(j, out);
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("config", "cannot open output file: " + path);
    f << content;
    if (!f) throw Error("config", "failed writing output file: " + path);
}

inline std::string trajectory_csv(const Trajectory& traj) {
    if (traj.labels.empty() ||
        traj.coefficients.rows() != static_cast<Eigen::Index>(traj.times.size()) ||
        traj.coefficients.cols() != static_cast<Eigen::Index>(traj.labels.size()))
        throw Error("invalid_arg", "trajectory has no coefficient columns");
    std::string out = "t";
    for (const auto& l : traj.labels) out += "," + l;
    out += '\n';
    for (size_t k = 0; k < traj.times.size(); ++k) {
        out += format_double(traj.times[k]);
        for (Eigen::Index i = 0; i < traj.coefficients.cols(); ++i)
            out += "," + format_double(traj.coefficients(k, i));
        out += '\n';
    }
    return out;
}

/// {"omega": [...], "J": [[...row-major...], ...]}
inline nlohmann::json tabulated_to_json(const SpectralDensityModel& m) {
    if (m.kind != SpectralKind::tabulated && m.kind != SpectralKind::discrete_bath)
        throw Error("invalid_arg", "only sampled models serialize to omega/J form");
    nlohmann::json j;
    j["omega"] = m.omegas;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : m.samples) {
        nlohmann::json flat = nlohmann::json::array();
        for (int r = 0; r < s.rows(); ++r)
            for (int c = 0; c < s.cols(); ++c) flat.push_back(s(r, c));
        rows.push_back(flat);
    }
    j["J"] = rows;
    return j;
}

inline SpectralDensityModel
tabulated_from_json(const nlohmann::json& j, double beta_T,
                    SpectralMode mode = SpectralMode::quantum) {
    if (!j.is_object() || !j.contains("omega") || !j.contains("J"))
        throw Error("config", "tabulated model needs \"omega\" and \"J\" keys");
    std::vector<double> omegas = j["omega"].get<std::vector<double>>();
    std::vector<Eigen::MatrixXd> samples;
    for (const auto& row : j["J"]) {
        std::vector<double> flat = row.get<std::vector<double>>();
        int n = static_cast<int>(std::llround(std::sqrt(double(flat.size()))));
        if (n * n != static_cast<int>(flat.size()))
            throw Error("config", "tabulated J rows must be square matrices");
        Eigen::MatrixXd m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = flat[r * n + c];
        samples.push_back(m);
    }
    return SpectralDensityModel::tabulated(std::move(omegas), std::move(samples),
                                           beta_T, mode);
}

inline nlohmann::json generator_to_json(const Generator& g) {
    nlohmann::json j;
    j["dim"] = g.dim;
    j["kind"] = to_string(g.kind);
    nlohmann::json M = nlohmann::json::array();
    for (Eigen::Index r = 0; r < g.M.rows(); ++r)
        for (Eigen::Index c = 0; c < g.M.cols(); ++c)
            M.push_back({g.M(r, c).real(), g.M(r, c).imag()});
    j["M"] = M;
    nlohmann::json b = nlohmann::json::array();
    for (Eigen::Index i = 0; i < g.b.size(); ++i)
        b.push_back({g.b(i).real(), g.b(i).imag()});
    j["b"] = b;
    j["metadata"] = {{"beta_T", g.metadata.beta_T},
                     {"spectral_mode", to_string(g.metadata.mode)},
                     {"equilibrium",
                      g.metadata.has_equilibrium
                          ? (g.metadata.equilibrium == EquilibriumFlavor::gibbs
                                 ? "gibbs"
                                 : "linearized")
                          : "none"}};
    return j;
}

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

} // namespace htme
