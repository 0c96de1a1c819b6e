// Exercises the installed binary end to end. The build points HTME_CLI at
// the freshly built executable.

#include "htme/io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;
using Catch::Approx;

namespace {

std::string cli() {
    const char* p = std::getenv("HTME_CLI");
    REQUIRE(p != nullptr);
    return p;
}

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("htme_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    std::string cmd = cli() + " " + args + " > " + (work_dir() / "stdout.txt").string() +
                      " 2> " + (work_dir() / "stderr.txt").string();
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path write_config(const std::string& name, const json& j) {
    fs::path p = work_dir() / name;
    std::ofstream f(p);
    f << j.dump();
    return p;
}

} // namespace

TEST_CASE("simulate writes a trajectory and a canonical summary") {
    json cfg = {{"scenario", "tls"},
                {"generator", "lindblad"},
                {"params", {{"beta_T", 0.05}, {"n_steps", 50}}},
                {"output",
                 {{"trajectory_path", "tls.csv"}, {"summary_path", "tls.json"}}}};
    auto p = write_config("tls.json", cfg);
    int rc = run("simulate --config " + p.string() + " --out-dir " +
                 work_dir().string());
    REQUIRE(rc == 0);

    std::string csv = slurp(work_dir() / "tls.csv");
    REQUIRE(csv.rfind("t,sz,sp,sm\n", 0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    REQUIRE(lines == 51);

    std::string summary = slurp(work_dir() / "tls.json");
    REQUIRE(!summary.empty());
    REQUIRE(summary.back() == '\n');
    std::string body = summary.substr(0, summary.size() - 1);
    json s = json::parse(body);
    REQUIRE(s["scenario"] == "tls");
    REQUIRE(s["generator"] == "lindblad");
    REQUIRE(s["max_deviation"].get<double>() < 1e-8);
    REQUIRE(s["fitted_rates"].contains("rate_z"));
    // canonical: parse + re-dump is byte-identical
    REQUIRE(htme::canonical_json(s) == body);
}

TEST_CASE("rates verb emits the summary without a trajectory") {
    json cfg = {{"scenario", "singlet_triplet"},
                {"generator", "htme"},
                {"output",
                 {{"trajectory_path", "st.csv"}, {"summary_path", "st.json"}}}};
    auto p = write_config("st_cfg.json", cfg);
    fs::remove(work_dir() / "st.csv");
    int rc = run("rates --config " + p.string() + " --out-dir " +
                 work_dir().string());
    REQUIRE(rc == 0);
    REQUIRE(!fs::exists(work_dir() / "st.csv"));

    json s = json::parse(slurp(work_dir() / "st.json"));
    REQUIRE(s["scenario"] == "singlet_triplet");
    REQUIRE(s.contains("T1"));
    REQUIRE(s.contains("Ts"));
    REQUIRE(s["sigma_matrix"].size() == 4);
    REQUIRE(s["leakage"].get<double>() < 1e-10);
    REQUIRE(s["T1"].get<double>() > 0);
}

TEST_CASE("configuration errors exit with code 2 and a json diagnostic") {
    auto expect_code2 = [&](const json& cfg, const std::string& name) {
        auto p = write_config(name, cfg);
        int rc = run("simulate --config " + p.string() + " --out-dir " +
                     work_dir().string());
        REQUIRE(rc == 2);
        json err = json::parse(slurp(work_dir() / "stderr.txt"));
        REQUIRE(err.contains("code"));
        REQUIRE(err.contains("message"));
    };
    expect_code2({{"scenario", "tls"}, {"generator", "lindblad"}, {"typo", 1}},
                 "bad1.json");
    expect_code2({{"scenario", "tls"}}, "bad2.json"); // generator missing
    expect_code2({{"scenario", "singlet_triplet"}, {"generator", "lindblad"}},
                 "bad3.json");
    expect_code2({{"scenario", "tls"},
                  {"generator", "lindblad"},
                  {"spectral_mode", "symmetrized"}},
                 "bad4.json");
    expect_code2({{"scenario", "tls"},
                  {"generator", "lindblad"},
                  {"params", {{"initial_sz", 2.0}}}},
                 "bad5.json");

    // malformed JSON and a missing file
    fs::path broken = work_dir() / "broken.json";
    std::ofstream(broken) << "{not json";
    REQUIRE(run("simulate --config " + broken.string()) == 2);
    REQUIRE(run("simulate --config " + (work_dir() / "absent.json").string()) == 2);

    // bad flags / missing subcommand
    REQUIRE(run("simulate") == 2);
    REQUIRE(run("") == 2);
    REQUIRE(run("check --level bogus") == 2);
}

TEST_CASE("fast invariant suite passes through the binary") {
    int rc = run("check --level fast");
    REQUIRE(rc == 0);
    std::string out = slurp(work_dir() / "stdout.txt");
    REQUIRE(out.find("FAIL") == std::string::npos);
    REQUIRE(out.find("all passed") != std::string::npos);
}

TEST_CASE("help exits cleanly") { REQUIRE(run("--help") == 0); }
