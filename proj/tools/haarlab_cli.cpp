// haarlab: batch experiment runner. Subcommands build measures and Haar
// systems from JSON specs, run diagnostics / decomposition checks / weak-type
// batteries, and write CSV reports. Exit codes: 0 ok, 1 verification failure,
// 2 usage or config error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "haarlab/czd.hpp"
#include "haarlab/func.hpp"
#include "haarlab/grid.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/io.hpp"
#include "haarlab/measure.hpp"
#include "haarlab/ops.hpp"

namespace fs = std::filesystem;
using namespace haarlab;

namespace {

constexpr const char* kVersion = "1.0.0";

int thread_cap() {
    const char* env = std::getenv("HAARLAB_THREADS");
    if (!env) return 1;
    const long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<int>(v) : 1;
}

struct Csv {
    std::vector<std::string> meta;  // "# key=value" lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void metadata(const std::string& key, const std::string& value) {
        meta.push_back("# " + key + "=" + value);
    }
    void write(const fs::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + path.string());
        for (const auto& m : meta) out << m << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out << (i ? "," : "") << columns[i];
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
            out << "\n";
        }
    }
};

std::string fmt(double v) { return format_double(v); }

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int depth = 0;  // 0: use config / study default
    std::string study;
};

json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    return json::parse(in);
}

std::uint64_t hash_file_or(const std::string& path, const std::string& fallback) {
    if (path.empty()) return fnv1a(fallback);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a(ss.str());
}

void stamp(Csv& csv, const CommonOpts& opt, int depth, std::uint64_t config_hash) {
    csv.metadata("version", kVersion);
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(config_hash));
    csv.metadata("config_hash", hex);
    csv.metadata("seed", std::to_string(opt.seed));
    csv.metadata("depth", std::to_string(depth));
    csv.metadata("threads", std::to_string(thread_cap()));
}

// ---- measure ----

int cmd_measure(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    const json mspec = cfg.contains("measure") ? cfg.at("measure") : cfg;
    MeasureTree mu = measure_from_json(mspec);
    const int upto = cfg.value("upto_gen", mu.depth - 1);
    std::vector<double> exps = cfg.value("growth_exponents", std::vector<double>{});
    const DiagnosticsReport rep = diagnostics(mu, upto, exps);

    Csv csv;
    stamp(csv, opt, mu.depth, hash_file_or(opt.config_path, ""));
    csv.metadata("total_mass", fmt(mu.total()));
    csv.metadata("C_inc", fmt(rep.C_inc));
    csv.metadata("C_dec", fmt(rep.C_dec));
    csv.metadata("C_doub", fmt(rep.C_doub));
    csv.metadata("degenerate_child", rep.degenerate_child ? "1" : "0");
    csv.columns = {"gen", "inc", "dec", "doub"};
    for (double t : exps) csv.columns.push_back("growth_t" + fmt(t));
    for (int g = 1; g <= rep.upto_gen; ++g) {
        std::vector<std::string> row{std::to_string(g)};
        row.push_back(rep.inc_by_gen.empty() ? "" : fmt(rep.inc_by_gen[g]));
        row.push_back(rep.dec_by_gen.empty() ? "" : fmt(rep.dec_by_gen[g]));
        row.push_back(fmt(rep.doub_by_gen[g]));
        for (double t : exps) row.push_back(fmt(rep.growth.at(t)[g]));
        csv.rows.push_back(std::move(row));
    }
    csv.write(fs::path(opt.out_dir) / "measure_diagnostics.csv");
    std::cout << "C_inc=" << fmt(rep.C_inc) << " C_dec=" << fmt(rep.C_dec)
              << " C_doub=" << fmt(rep.C_doub) << "\n";
    return 0;
}

// ---- czd ----

SimpleFunction function_from_config(const json& cfg, const MeasureTree& mu, std::uint64_t seed) {
    if (cfg.contains("values")) return function_from_json(cfg);
    const std::string kind = cfg.value("kind", "random");
    if (kind == "random") {
        std::mt19937_64 rng(cfg.value("seed", seed));
        const int res = cfg.value("resolution", mu.depth);
        SimpleFunction f = SimpleFunction::zero(mu.dim, res);
        std::uniform_real_distribution<double> unif(-3.0, 5.0);
        for (auto& v : f.values) v = unif(rng);
        return f;
    }
    throw std::invalid_argument("unknown function kind: " + kind);
}

int cmd_czd(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    MeasureTree mu = measure_from_json(cfg.at("measure"));
    SimpleFunction f = function_from_config(cfg.value("function", json{{"kind", "random"}}),
                                            mu, opt.seed);
    const double root_avg =
        mu.total() > 0 ? lp_norm(f, 1.0, mu) / mu.total() : 0.0;
    std::vector<double> lambdas;
    if (cfg.contains("lambdas")) {
        lambdas = cfg.at("lambdas").get<std::vector<double>>();
    } else {
        const int count = cfg.value("lambda_count", 6);
        double lam = root_avg * cfg.value("lambda_factor", 1.5);
        for (int i = 0; i < count; ++i, lam *= 2) lambdas.push_back(lam);
    }
    const std::vector<int> moments = cfg.value("moments", std::vector<int>{1, 2, 3});

    Csv csv;
    stamp(csv, opt, mu.depth, hash_file_or(opt.config_path, ""));
    csv.metadata("root_average", fmt(root_avg));
    csv.columns = {"lambda", "check", "measured", "bound", "pass"};
    bool all_pass = true;
    for (double lam : lambdas) {
        if (lam <= root_avg) {
            std::cerr << "lambda " << fmt(lam)
                      << " is at or below the global average " << fmt(root_avg)
                      << "; decomposition is defined only above it\n";
            return 2;
        }
        const CZDecomposition dec = decompose(f, lam, mu);
        const VerificationReport rep = verify(dec, f, mu, moments);
        all_pass = all_pass && rep.ok;
        for (const auto& c : rep.checks)
            csv.rows.push_back(
                {fmt(lam), c.name, fmt(c.measured), fmt(c.bound), c.pass ? "1" : "0"});
    }
    csv.write(fs::path(opt.out_dir) / "czd_report.csv");
    std::cout << (all_pass ? "all checks passed" : "verification FAILED") << "\n";
    return all_pass ? 0 : 1;
}

// ---- weak11 ----

struct BuiltOperator {
    OperatorHandle handle;
    std::shared_ptr<HaarSystem> system;  // battery system (may be null)
};

BuiltOperator build_operator(const json& spec, const MeasureTree& mu,
                             const std::shared_ptr<HaarSystem>& default_sys, int upto_gen) {
    const std::string type = spec.at("type").get<std::string>();
    auto mu_ptr = std::make_shared<MeasureTree>(mu);
    BuiltOperator out;
    out.system = default_sys;
    if (type == "maximal") {
        out.handle = {"maximal",
                      [mu_ptr](const SimpleFunction& f) { return maximal(f, *mu_ptr); },
                      1.0};
        return out;
    }
    if (type == "square") {
        out.handle = {"square",
                      [mu_ptr](const SimpleFunction& f) { return square_function(f, *mu_ptr); },
                      std::numeric_limits<double>::quiet_NaN()};
        return out;
    }
    if (type == "paraproduct" || type == "paraproduct_adjoint") {
        auto gamma = std::make_shared<CoefficientSequence>(CoefficientSequence::zero(mu.dim, mu.depth));
        for (const auto& e : spec.at("gamma"))
            gamma->set(parse_address(mu.dim, e.at("cube").get<std::string>()),
                       e.at("value").get<double>());
        const bool adj = (type == "paraproduct_adjoint");
        auto sys = default_sys;
        out.handle = {type,
                      [gamma, sys, mu_ptr, adj](const SimpleFunction& f) {
                          return adj ? paraproduct_adjoint(*gamma, *sys, f, *mu_ptr)
                                     : paraproduct(*gamma, *sys, f, *mu_ptr);
                      },
                      std::numeric_limits<double>::quiet_NaN()};
        return out;
    }
    // shift family
    ShiftCoefficients coeffs;
    std::shared_ptr<HaarSystem> phi = default_sys, psi = default_sys;
    if (type == "hilbert") {
        coeffs = ShiftCoefficients::hilbert();
    } else if (type == "hilbert_adjoint") {
        coeffs = ShiftCoefficients::hilbert_adjoint();
    } else if (type == "multiplier") {
        coeffs = ShiftCoefficients::constant(0, 0, 1.0);
    } else if (type == "shift") {
        const int r = spec.at("r").get<int>();
        const int s = spec.at("s").get<int>();
        const std::string source = spec.value("source", "constant");
        if (source == "constant")
            coeffs = ShiftCoefficients::constant(r, s, spec.value("value", 1.0));
        else if (source == "signs")
            coeffs = ShiftCoefficients::signs(r, s, spec.value("seed", std::uint64_t{1}));
        else
            throw std::invalid_argument("unknown shift source: " + source);
    } else {
        throw std::invalid_argument("unknown operator type: " + type);
    }
    const double ceiling = (phi->cancellative && psi->cancellative)
                               ? weak11_ceiling(coeffs, *phi, *psi, *mu_ptr, upto_gen)
                               : std::numeric_limits<double>::quiet_NaN();
    out.handle = {type,
                  [coeffs, phi, psi, mu_ptr](const SimpleFunction& f) {
                      return haar_shift(coeffs, *phi, *psi, f, *mu_ptr);
                  },
                  ceiling};
    return out;
}

int cmd_weak11(const CommonOpts& opt) {
    const json cfg = load_config(opt.config_path);
    MeasureTree mu = measure_from_json(cfg.at("measure"));
    std::shared_ptr<HaarSystem> sys;
    if (cfg.contains("system"))
        sys = std::make_shared<HaarSystem>(system_from_json(cfg.at("system"), mu));
    else if (mu.dim == 1)
        sys = std::make_shared<HaarSystem>(canonical_1d(mu));
    else
        throw std::invalid_argument("a system spec is required when dim > 1");

    BatterySpec battery;
    if (cfg.contains("battery")) {
        const json& b = cfg.at("battery");
        const std::string kind = b.value("kind", "all");
        using K = BatterySpec::Kind;
        battery.kind = kind == "haar"         ? K::haar_family
                       : kind == "adversarial" ? K::adversarial_family
                       : kind == "indicators"  ? K::normalized_indicators
                       : kind == "random"      ? K::random_signs
                                               : K::all;
        battery.seed = b.value("seed", opt.seed);
        battery.upto_gen = b.value("upto_gen", -1);
        battery.samples_per_gen = b.value("samples_per_gen", 8);
        battery.random_count = b.value("random_count", 16);
    } else {
        battery.seed = opt.seed;
    }
    const int upto = battery.upto_gen >= 0 ? battery.upto_gen : std::max(0, mu.depth - 2);

    Csv csv;
    stamp(csv, opt, mu.depth, hash_file_or(opt.config_path, ""));
    csv.columns = {"operator", "gen", "ratio", "ceiling"};
    for (const json& ospec : cfg.at("operators")) {
        BuiltOperator op = build_operator(ospec, mu, sys, upto);
        const Weak11Report rep = weak11_estimate(op.handle, mu, battery, op.system.get());
        csv.metadata("witness_" + op.handle.name, rep.witness);
        csv.metadata("max_ratio_" + op.handle.name, fmt(rep.max_ratio));
        for (std::size_t g = 0; g < rep.ratio_by_gen.size(); ++g)
            csv.rows.push_back({op.handle.name, std::to_string(g), fmt(rep.ratio_by_gen[g]),
                                fmt(op.handle.weak_ceiling)});
        std::cout << op.handle.name << ": max ratio " << fmt(rep.max_ratio) << "\n";
    }
    csv.write(fs::path(opt.out_dir) / "weak11_report.csv");
    return 0;
}

// ---- reproduce ----

SplitSequenceSpec::Kind formula_kind(char which) {
    using K = SplitSequenceSpec::Kind;
    switch (which) {
        case 'a': return K::formula_a;
        case 'b': return K::formula_b;
        case 'c': return K::formula_c;
        default: return K::formula_d;
    }
}

int study_split(const CommonOpts& opt, char which) {
    const int depth = opt.depth > 0 ? opt.depth : 20;
    SplitSequenceSpec spec{formula_kind(which), {}, depth};
    const std::vector<double> b = split_fractions(spec);
    MeasureTree mu = build_split_measure(spec);
    const DiagnosticsReport rep = diagnostics(mu, depth - 1);

    Csv csv;
    const std::string study = std::string("ex_") + which;
    stamp(csv, opt, depth, fnv1a(study + ":" + std::to_string(depth)));
    csv.metadata("study", study);
    csv.metadata("C_inc", fmt(rep.C_inc));
    csv.metadata("C_dec", fmt(rep.C_dec));
    csv.metadata("C_doub", fmt(rep.C_doub));
    csv.columns = {"k", "chain_ratio", "chain_formula", "chain_rel_err",
                   "side_ratio", "side_formula", "side_rel_err", "doub"};
    double max_rel = 0;
    for (int k = 2; k <= depth - 1; ++k) {
        // I_k is node 0 at generation k; its right sibling I_k^b is node 1.
        const double chain = m_value(mu, k, 0) / m_value(mu, k - 1, 0);
        const double side = m_value(mu, k, 1) / m_value(mu, k - 1, 0);
        const double a_k = 1 - b[k];
        const double chain_f = (1 - b[k + 1]) * b[k + 1] / b[k];
        const double side_f = 1 / (4 * a_k);
        const double e1 = std::abs(chain - chain_f) / chain_f;
        const double e2 = std::abs(side - side_f) / side_f;
        max_rel = std::max({max_rel, e1, e2});
        csv.rows.push_back({std::to_string(k), fmt(chain), fmt(chain_f), fmt(e1), fmt(side),
                            fmt(side_f), fmt(e2), fmt(rep.doub_by_gen[k])});
    }
    csv.metadata("max_rel_err", fmt(max_rel));
    csv.write(fs::path(opt.out_dir) / (study + ".csv"));
    std::cout << study << ": max relative error " << fmt(max_rel) << "\n";
    return max_rel <= 1e-12 ? 0 : 1;
}

// Multiplier system on the unit blocks [k,k+1)^2: two quadrants carry mass
// ~1/k^2 each and the function takes values proportional to (k/2, -k/2, c, -c)
// with c = k/sqrt(2(k^2-2)), normalized in L^2(mu).
HaarSystem r2_multiplier_system(const MeasureTree& mu, int K) {
    std::vector<std::pair<CubeId, std::vector<double>>> entries;
    for (int k = 2; k <= K; ++k) {
        const CubeId q = r2_block(K, k);
        const double c = k / std::sqrt(2.0 * (k * k - 2));
        std::vector<double> v{k / 2.0, -k / 2.0, c, -c};
        double n2 = 0;
        const std::uint64_t n = node_index(q);
        for (int i = 0; i < 4; ++i)
            n2 += v[i] * v[i] * mu.level[q.gen + 1][(n << 2) + static_cast<std::uint64_t>(i)];
        for (auto& x : v) x /= std::sqrt(n2);
        entries.emplace_back(q, std::move(v));
    }
    return custom_system(mu, entries, true);
}

int study_r2(const CommonOpts& opt) {
    const int K = 12;
    const int depth = opt.depth > 0 ? opt.depth : r2_block_gen(K) + 1;
    MeasureTree mu = build_r2_nonstandard(K, depth);
    HaarSystem sys = r2_multiplier_system(mu, K);
    const ShiftCoefficients mult = ShiftCoefficients::constant(0, 0, 1.0);

    Csv csv;
    stamp(csv, opt, depth, fnv1a("r2_nonstandard:" + std::to_string(depth)));
    csv.metadata("study", "r2_nonstandard");
    csv.metadata("K", std::to_string(K));
    csv.columns = {"k", "standardness", "standardness_floor", "weak_ratio", "l1_ratio_formula",
                   "ratio_floor"};
    bool ok = true;
    double prev_ratio = 0;
    for (int k = 2; k <= K; ++k) {
        const CubeId q = r2_block(K, k);
        const HaarFunction phi = sys.function_at(q);
        const double std_val = l1_norm(phi, mu) * linf_norm(phi, mu);
        const double std_floor = std::sqrt(k * k - 2.0) / (2 * std::sqrt(2.0));
        SimpleFunction f = SimpleFunction::indicator(child(q, 0), depth);
        f = (1.0 / mu.mass(child(q, 0))) * f;
        const SimpleFunction tf = haar_shift(mult, sys, sys, f, mu);
        const double ratio = weak_l1_norm(tf, mu) / lp_norm(f, 1.0, mu);
        const double formula = 0.5 + std::sqrt((k * k - 2.0) / 8.0);
        ok = ok && std_val >= std_floor * (1 - 1e-12) && ratio >= formula / 4;
        if (k > 2) ok = ok && ratio > prev_ratio;
        prev_ratio = ratio;
        csv.rows.push_back({std::to_string(k), fmt(std_val), fmt(std_floor), fmt(ratio),
                            fmt(formula), fmt(formula / 4)});
    }
    csv.write(fs::path(opt.out_dir) / "r2_nonstandard.csv");
    std::cout << "r2_nonstandard: " << (ok ? "growth confirmed" : "FAILED") << "\n";
    return ok ? 0 : 1;
}

int study_paraproduct(const CommonOpts& opt) {
    const int trials = 100;
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<int> depth_pick(3, 8);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> mass(0.05, 1.0);

    Csv csv;
    stamp(csv, opt, 0, fnv1a("paraproduct"));
    csv.metadata("study", "paraproduct");
    csv.metadata("trials", std::to_string(trials));
    csv.columns = {"trial", "l2_ratio", "carleson", "bound", "pass"};
    bool ok = true;
    for (int t = 0; t < trials; ++t) {
        const int N = opt.depth > 0 ? opt.depth : depth_pick(rng);
        MeasureTree mu{1, N, 1.0, {}};
        mu.level.resize(N + 1);
        for (int k = 0; k <= N; ++k) mu.level[k].assign(nodes_at_gen(1, k), 0.0);
        for (auto& m : mu.level[N]) m = mass(rng);
        for (int k = N - 1; k >= 0; --k)
            for (std::uint64_t n = 0; n < mu.level[k].size(); ++n)
                mu.level[k][n] = mu.level[k + 1][2 * n] + mu.level[k + 1][2 * n + 1];
        const HaarSystem psi = canonical_1d(mu);
        CoefficientSequence gamma = CoefficientSequence::zero(1, N);
        for (int k = 0; k < N; ++k)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, k); ++n) gamma.set(k, n, unif(rng));
        SimpleFunction f = SimpleFunction::zero(1, N);
        for (auto& v : f.values) v = unif(rng);
        const double fn = lp_norm(f, 2.0, mu);
        if (fn == 0) continue;
        const double ratio = lp_norm(paraproduct(gamma, psi, f, mu), 2.0, mu) / fn;
        const double car = carleson_norm(gamma, mu, N - 1);
        const double bound = 2 * car;
        const bool pass = ratio <= bound * (1 + 1e-12);
        ok = ok && pass;
        csv.rows.push_back({std::to_string(t), fmt(ratio), fmt(car), fmt(bound), pass ? "1" : "0"});
    }
    csv.write(fs::path(opt.out_dir) / "paraproduct.csv");
    std::cout << "paraproduct: " << (ok ? "all ratios within bound" : "FAILED") << "\n";
    return ok ? 0 : 1;
}

int study_square(const CommonOpts& opt) {
    const int depth = opt.depth > 0 ? opt.depth : 16;
    Csv csv;
    stamp(csv, opt, depth, fnv1a("square:" + std::to_string(depth)));
    csv.metadata("study", "square");
    csv.columns = {"measure", "max_ratio"};
    double worst = 0;
    for (char which : {'a', 'b', 'c', 'd'}) {
        SplitSequenceSpec spec{formula_kind(which), {}, depth};
        MeasureTree mu = build_split_measure(spec);
        auto mu_ptr = std::make_shared<MeasureTree>(mu);
        OperatorHandle op{"square",
                          [mu_ptr](const SimpleFunction& f) { return square_function(f, *mu_ptr); },
                          std::numeric_limits<double>::quiet_NaN()};
        BatterySpec battery;
        battery.seed = opt.seed;
        HaarSystem sys = canonical_1d(mu);
        const Weak11Report rep = weak11_estimate(op, mu, battery, &sys);
        worst = std::max(worst, rep.max_ratio);
        csv.rows.push_back({std::string("formula_") + which, fmt(rep.max_ratio)});
    }
    csv.metadata("worst_ratio", fmt(worst));
    csv.write(fs::path(opt.out_dir) / "square.csv");
    std::cout << "square: worst weak ratio " << fmt(worst) << "\n";
    return 0;
}

int cmd_reproduce(const CommonOpts& opt) {
    if (opt.study == "ex_a") return study_split(opt, 'a');
    if (opt.study == "ex_b") return study_split(opt, 'b');
    if (opt.study == "ex_c") return study_split(opt, 'c');
    if (opt.study == "ex_d") return study_split(opt, 'd');
    if (opt.study == "r2_nonstandard") return study_r2(opt);
    if (opt.study == "paraproduct") return study_paraproduct(opt);
    if (opt.study == "square") return study_square(opt);
    throw std::invalid_argument("unknown study: " + opt.study);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dyadic harmonic analysis experiment runner"};
    app.require_subcommand(1);
    CommonOpts opt;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* c = sub->add_option("--config", opt.config_path, "JSON config file");
        if (need_config) c->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "RNG seed");
        sub->add_option("--depth", opt.depth, "override tree depth");
    };
    CLI::App* measure = app.add_subcommand("measure", "measure diagnostics");
    add_common(measure, true);
    CLI::App* czd = app.add_subcommand("czd", "decomposition verification");
    add_common(czd, true);
    CLI::App* weak11 = app.add_subcommand("weak11", "weak-type ratio battery");
    add_common(weak11, true);
    CLI::App* repro = app.add_subcommand("reproduce", "canned example studies");
    add_common(repro, false);
    repro->add_option("--study", opt.study, "study name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        fs::create_directories(opt.out_dir);
        if (app.got_subcommand(measure)) return cmd_measure(opt);
        if (app.got_subcommand(czd)) return cmd_czd(opt);
        if (app.got_subcommand(weak11)) return cmd_weak11(opt);
        return cmd_reproduce(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
