#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {
const std::string kCli = HAARLAB_CLI_PATH;
const fs::path kTmp = HAARLAB_TEST_TMPDIR;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > " + (kTmp / "stdout.txt").string() +
                            " 2> " + (kTmp / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TmpSetup {
    TmpSetup() { fs::create_directories(kTmp); }
} setup;
}  // namespace

TEST_CASE("measure diagnostics on the uniform measure") {
    const fs::path cfg = kTmp / "measure_leb.json";
    write_file(cfg, R"({"measure": {"kind": "lebesgue", "dim": 1, "depth": 6}})");
    CHECK(run("measure --config " + cfg.string() + " --out " + kTmp.string()) == 0);
    const std::string csv = slurp(kTmp / "measure_diagnostics.csv");
    CHECK(csv.find("# version=") != std::string::npos);
    CHECK(csv.find("# config_hash=") != std::string::npos);
    CHECK(csv.find("C_inc=0.5") != std::string::npos);
    CHECK(csv.find("C_dec=2") != std::string::npos);
    CHECK(csv.find("C_doub=2") != std::string::npos);
    CHECK(csv.find("degenerate_child=0") != std::string::npos);
}

TEST_CASE("czd verification exits 0 and reports passing rows") {
    const fs::path cfg = kTmp / "czd.json";
    write_file(cfg, R"({
        "measure": {"kind": "split", "depth": 8, "formula": "a"},
        "function": {"kind": "random", "seed": 3},
        "lambda_count": 3
    })");
    CHECK(run("czd --config " + cfg.string() + " --out " + kTmp.string() + " --seed 3") == 0);
    const std::string csv = slurp(kTmp / "czd_report.csv");
    CHECK(csv.find("lambda,") != std::string::npos);
    CHECK(csv.find(",0\n") == std::string::npos);  // no failing pass column
}

TEST_CASE("lambda below the global average is a usage error") {
    const fs::path cfg = kTmp / "czd_bad.json";
    write_file(cfg, R"({
        "measure": {"kind": "lebesgue", "dim": 1, "depth": 4},
        "function": {"kind": "random", "seed": 1},
        "lambdas": [1e-9]
    })");
    CHECK(run("czd --config " + cfg.string() + " --out " + kTmp.string()) == 2);
}

TEST_CASE("malformed configs and unknown studies exit 2") {
    const fs::path bad = kTmp / "bad.json";
    write_file(bad, "{ not json");
    CHECK(run("measure --config " + bad.string() + " --out " + kTmp.string()) == 2);
    CHECK(run("czd --config " + bad.string() + " --out " + kTmp.string()) == 2);
    CHECK(run("reproduce --study nope --out " + kTmp.string()) == 2);
    CHECK(run("measure --out " + kTmp.string()) == 2);  // missing required --config
    const fs::path missing = kTmp / "does_not_exist.json";
    CHECK(run("measure --config " + missing.string() + " --out " + kTmp.string()) == 2);
}

TEST_CASE("weak11 reports are byte-identical across runs") {
    const fs::path cfg = kTmp / "weak11.json";
    write_file(cfg, R"({
        "measure": {"kind": "split", "depth": 8, "formula": "a"},
        "operators": [
            {"type": "hilbert"},
            {"type": "maximal"}
        ],
        "battery": {"kind": "all", "samples_per_gen": 2, "random_count": 4}
    })");
    const fs::path out1 = kTmp / "w1";
    const fs::path out2 = kTmp / "w2";
    fs::create_directories(out1);
    fs::create_directories(out2);
    const std::string base = "weak11 --config " + cfg.string() + " --seed 9 --out ";
    CHECK(run(base + out1.string()) == 0);
    CHECK(run(base + out2.string()) == 0);
    const std::string a = slurp(out1 / "weak11_report.csv");
    const std::string b = slurp(out2 / "weak11_report.csv");
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(a.find("hilbert") != std::string::npos);
    CHECK(a.find("maximal") != std::string::npos);
}

TEST_CASE("canned studies run end to end") {
    CHECK(run("reproduce --study ex_a --depth 12 --out " + kTmp.string()) == 0);
    const std::string csv = slurp(kTmp / "ex_a.csv");
    CHECK(csv.find("chain_ratio") != std::string::npos);
    CHECK(run("reproduce --study r2_nonstandard --out " + kTmp.string()) == 0);
    CHECK(slurp(kTmp / "r2_nonstandard.csv").find("standardness") != std::string::npos);
}
