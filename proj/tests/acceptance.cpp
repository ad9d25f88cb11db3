// Acceptance gate: one pass/fail line per criterion, exit code 0 only if all
// pass. Thresholds are pinned here; each check states the measured value.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "haarlab/czd.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/io.hpp"
#include "haarlab/ops.hpp"
#include "oracle.hpp"

using namespace haarlab;

namespace {

int g_failures = 0;

void report(int num, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", num, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(double v) { return format_double(v); }

SplitSequenceSpec formula(char which, int depth) {
    using K = SplitSequenceSpec::Kind;
    SplitSequenceSpec s;
    s.depth = depth;
    s.kind = which == 'a'   ? K::formula_a
             : which == 'b' ? K::formula_b
             : which == 'c' ? K::formula_c
                            : K::formula_d;
    return s;
}

// ---------------------------------------------------------------- criterion 1
void criterion_decomposition() {
    int failures = 0;
    int checked = 0;
    auto run_one = [&](const MeasureTree& mu, const SimpleFunction& f, double factor) {
        const double root_avg = lp_norm(f, 1.0, mu) / mu.total();
        if (root_avg <= 0) return;
        const CZDecomposition dec = decompose(f, root_avg * factor, mu);
        const VerificationReport rep = verify(dec, f, mu, {1, 2, 3});
        ++checked;
        if (!rep.ok) ++failures;
    };
    const double factors[3] = {1.2, 2.0, 8.0};
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const int dim = 1 + static_cast<int>(seed % 2);
        const int N = dim == 1 ? 5 + static_cast<int>(seed % 3) : 3 + static_cast<int>(seed % 2);
        const MeasureTree mu = oracle::random_measure(dim, N, seed, seed % 5 ? 0.0 : 0.1);
        const SimpleFunction f = oracle::random_function(dim, N, seed + 7000);
        run_one(mu, f, factors[seed % 3]);
    }
    for (char which : {'a', 'b', 'c', 'd'}) {
        const MeasureTree mu = build_split_measure(formula(which, 20));
        const SimpleFunction f = oracle::random_function(1, 20, 42 + which);
        for (double factor : factors) run_one(mu, f, factor);
    }
    report(1, "three-part decomposition suite", failures == 0,
           std::to_string(checked) + " triples, " + std::to_string(failures) + " failures");
}

// ---------------------------------------------------------------- criterion 2
void criterion_closed_forms() {
    double worst = 0;
    for (char which : {'a', 'b', 'c', 'd'}) {
        const SplitSequenceSpec spec = formula(which, 20);
        const std::vector<double> b = split_fractions(spec);
        const MeasureTree mu = build_split_measure(spec);
        for (int k = 2; k <= 18; ++k) {
            const double m_chain = mu.mass(k + 1, 0) * mu.mass(k + 1, 1) / mu.mass(k, 0);
            const double m_side = mu.mass(k + 1, 2) * mu.mass(k + 1, 3) / mu.mass(k, 1);
            const double m_parent = mu.mass(k, 0) * mu.mass(k, 1) / mu.mass(k - 1, 0);
            const double chain_f = (1 - b[k + 1]) * b[k + 1] / b[k];
            const double side_f = 1.0 / (4 * (1 - b[k]));
            worst = std::max(worst, std::abs(m_chain / m_parent - chain_f) / chain_f);
            worst = std::max(worst, std::abs(m_side / m_parent - side_f) / side_f);
        }
    }
    report(2, "split-ratio closed forms", worst <= 1e-12, "max rel err " + fmt(worst));
}

// ---------------------------------------------------------------- criterion 3
void criterion_classification() {
    bool ok = true;
    std::string detail;

    {  // formula a: equilibrated m, unbounded doubling
        const MeasureTree mu = build_split_measure(formula('a', 20));
        const DiagnosticsReport rep = diagnostics(mu, 19);
        bool doub_grows = true;
        for (int g = 2; g <= 19; ++g) doub_grows = doub_grows && rep.doub_by_gen[g] >= g - 1;
        ok = ok && rep.C_inc <= 4.0 && rep.C_dec <= 4.0 && doub_grows;
        detail += "a: C_inc " + fmt(rep.C_inc) + " C_dec " + fmt(rep.C_dec) +
                  (doub_grows ? " doub>=g-1" : " doub FAIL");
    }
    {  // formula b: m-decreasing, doubling ratio blows up like 2^(k^2)
        const MeasureTree mu = build_split_measure(formula('b', 20));
        const DiagnosticsReport rep = diagnostics(mu, 19);
        bool blows = true;
        for (int k = 2; k <= 17; ++k)
            blows = blows && rep.doub_by_gen[k] >= std::ldexp(0.5, k * k);
        ok = ok && rep.C_inc <= 4.0 && blows;
        detail += "; b: C_inc " + fmt(rep.C_inc) + (blows ? " doub>=2^(k^2)/2" : " doub FAIL");
    }
    {  // formula c: consecutive fractions within factor 2, m-increase ~ n/2 at
        // the block ends k = n(n+1)/2
        const std::vector<double> b = split_fractions(formula('c', 20));
        bool frac_ok = true;
        for (int k = 1; k < 20; ++k) frac_ok = frac_ok && b[k] / b[k + 1] <= 2.0 + 1e-15;
        const MeasureTree mu = build_split_measure(formula('c', 20));
        const DiagnosticsReport rep = diagnostics(mu, 19);
        bool peaks = true;
        for (int n : {3, 4, 5})
            peaks = peaks && rep.inc_by_gen[n * (n + 1) / 2] >= n / 4.0;
        ok = ok && frac_ok && peaks;
        detail += std::string("; c: b_k/b_{k+1}<=2 ") + (frac_ok ? "ok" : "FAIL") +
                  ", block-end m-increase >= n/4 " + (peaks ? "ok" : "FAIL");
    }
    {  // formula d: linear growth, both m-monotonicity series diverge
        const MeasureTree mu = build_split_measure(formula('d', 20));
        const DiagnosticsReport rep = diagnostics(mu, 19, {1.0});
        bool growth_ok = true;
        for (int g = 0; g <= 19; ++g)
            growth_ok = growth_ok && rep.growth.at(1.0)[g] <= 2.0 + 1e-12;
        // the side ratio m(I^b)/m(parent) at generation 2k+1 is exactly k/4
        double worst = 0;
        for (int k = 2; k <= 9; ++k) {
            const int g = 2 * k + 1;
            const double m_side = m_value(mu, g, 1) / m_value(mu, g - 1, 0);
            worst = std::max(worst, std::abs(m_side - k / 4.0) / (k / 4.0));
        }
        double inc_max = 0, dec_max = 0;
        for (int g = 2; g <= 19; ++g) {
            inc_max = std::max(inc_max, rep.inc_by_gen[g]);
            dec_max = std::max(dec_max, rep.dec_by_gen[g]);
        }
        ok = ok && growth_ok && worst <= 1e-12 && inc_max >= 2.0 && dec_max >= 2.0;
        detail += std::string("; d: growth<=2 ") + (growth_ok ? "ok" : "FAIL") +
                  ", k/4 rel err " + fmt(worst) + ", inc_max " + fmt(inc_max) + ", dec_max " +
                  fmt(dec_max);
    }
    report(3, "measure classification", ok, detail);
}

// ---------------------------------------------------------------- criterion 4
Weak11Report run_haar_battery(const OperatorHandle& op, const MeasureTree& mu,
                              const HaarSystem& sys, int upto) {
    BatterySpec battery;
    battery.kind = BatterySpec::Kind::haar_family;
    battery.seed = 1;
    battery.upto_gen = upto;
    battery.samples_per_gen = 2;
    return weak11_estimate(op, mu, battery, &sys);
}

void criterion_dichotomy() {
    bool ok = true;
    std::string detail;
    const ShiftCoefficients H = ShiftCoefficients::hilbert();
    const ShiftCoefficients Hs = ShiftCoefficients::hilbert_adjoint();

    const MeasureTree mu_a = build_split_measure(formula('a', 20));
    const HaarSystem sys_a = canonical_1d(mu_a);
    OperatorHandle op_h_a{"hilbert",
                          [&](const SimpleFunction& f) {
                              return haar_shift(H, sys_a, sys_a, f, mu_a);
                          },
                          0.0};
    const Weak11Report rep_a = run_haar_battery(op_h_a, mu_a, sys_a, 18);
    double lo = 1e300, hi = 0;
    for (int g = 4; g <= 18; ++g) {
        lo = std::min(lo, rep_a.ratio_by_gen[g]);
        hi = std::max(hi, rep_a.ratio_by_gen[g]);
    }
    const bool a_flat = hi / lo <= 4.0;
    ok = ok && a_flat;
    detail += "equilibrated H max/min " + fmt(hi / lo);

    const MeasureTree mu_b = build_split_measure(formula('b', 20));
    const HaarSystem sys_b = canonical_1d(mu_b);
    OperatorHandle op_hs_b{"hilbert_adjoint",
                           [&](const SimpleFunction& f) {
                               return haar_shift(Hs, sys_b, sys_b, f, mu_b);
                           },
                           0.0};
    const Weak11Report rep_b = run_haar_battery(op_hs_b, mu_b, sys_b, 18);
    const double b_factor = rep_b.ratio_by_gen[18] / rep_b.ratio_by_gen[6];
    ok = ok && b_factor >= 2.0;
    detail += "; m-decreasing H* gen6->18 factor " + fmt(b_factor);

    // m-increasing measure: the H ratios climb along the block-end
    // generations, the divergent subsequence of the lower bound
    const MeasureTree mu_c = build_split_measure(formula('c', 20));
    const HaarSystem sys_c = canonical_1d(mu_c);
    OperatorHandle op_h_c{"hilbert",
                          [&](const SimpleFunction& f) {
                              return haar_shift(H, sys_c, sys_c, f, mu_c);
                          },
                          0.0};
    const Weak11Report rep_c = run_haar_battery(op_h_c, mu_c, sys_c, 18);
    const double p3 = rep_c.ratio_by_gen[5];
    const double p4 = rep_c.ratio_by_gen[9];
    const double p5 = rep_c.ratio_by_gen[14];
    const bool c_grows = p3 < p4 && p4 < p5;
    ok = ok && c_grows;
    detail += "; m-increasing H block-end peaks " + fmt(p3) + " < " + fmt(p4) + " < " + fmt(p5);

    // ceiling check on the m-equilibrated measure
    const double ceil_h = weak11_ceiling(H, sys_a, sys_a, mu_a, 18);
    OperatorHandle op_hs_a{"hilbert_adjoint",
                           [&](const SimpleFunction& f) {
                               return haar_shift(Hs, sys_a, sys_a, f, mu_a);
                           },
                           0.0};
    const Weak11Report rep_as = run_haar_battery(op_hs_a, mu_a, sys_a, 18);
    const double ceil_hs = weak11_ceiling(Hs, sys_a, sys_a, mu_a, 18);
    const bool under = rep_a.max_ratio <= ceil_h && rep_as.max_ratio <= ceil_hs;
    ok = ok && under;
    detail += "; ceilings " + fmt(rep_a.max_ratio) + "<=" + fmt(ceil_h) + ", " +
              fmt(rep_as.max_ratio) + "<=" + fmt(ceil_hs);
    report(4, "shift dichotomy probe", ok, detail);
}

// ---------------------------------------------------------------- criterion 5
double gram_worst(const MeasureTree& mu,
                  std::vector<HaarFunction> (*basis)(const MeasureTree&, int, std::uint64_t)) {
    double worst = 0;
    for (int g = 0; g < mu.depth; ++g)
        for (std::uint64_t n = 0; n < nodes_at_gen(mu.dim, g); ++n) {
            const auto fam = basis(mu, g, n);
            for (std::size_t i = 0; i < fam.size(); ++i) {
                if (fam[i].is_zero) continue;
                for (std::size_t j = i; j < fam.size(); ++j) {
                    if (fam[j].is_zero) continue;
                    const double want = (i == j) ? 1.0 : 0.0;
                    worst = std::max(worst,
                                     std::abs(inner_product(fam[i], fam[j], mu) - want));
                }
            }
        }
    return worst;
}

void criterion_haar_systems() {
    bool ok = true;
    std::string detail;

    // 1D measures at depth 20: canonical system normalization and L1 identity
    std::vector<MeasureTree> d1;
    d1.push_back(build_lebesgue(1, 20));
    d1.push_back(oracle::random_measure(1, 20, 5, 0.02));
    for (char w : {'a', 'b', 'c', 'd'}) d1.push_back(build_split_measure(formula(w, 20)));
    double worst_gram1 = 0, worst_l1 = 0;
    for (const auto& mu : d1) {
        const HaarSystem sys = canonical_1d(mu);
        for (int g = 0; g < 20; ++g)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, g); ++n) {
                if (!sys.in_domain(g, n)) continue;
                const HaarFunction h = sys.function_at(g, n);
                worst_gram1 = std::max(worst_gram1, std::abs(inner_product(h, h, mu) - 1.0));
                const double m = m_value(mu, g, n);
                worst_l1 = std::max(worst_l1,
                                    std::abs(l1_norm(h, mu) - 2 * std::sqrt(m)) /
                                        (2 * std::sqrt(m)));
            }
    }
    ok = ok && worst_gram1 <= 1e-10 && worst_l1 <= 1e-12;
    detail += "d1 gram err " + fmt(worst_gram1) + ", L1=2*sqrt(m) rel err " + fmt(worst_l1);

    // 2D measures at depth 8 (5 for the block measure): full per-cube Gram
    std::vector<MeasureTree> d2;
    d2.push_back(build_lebesgue(2, 8));
    d2.push_back(oracle::random_measure(2, 8, 6, 0.02));
    d2.push_back(build_r2_nonstandard(12, 5));
    d2.push_back(build_product({build_split_measure(formula('a', 8)),
                                build_split_measure(formula('b', 8))}));
    double worst_gram2 = 0;
    for (const auto& mu : d2) {
        worst_gram2 = std::max(worst_gram2, gram_worst(mu, &wilson_basis));
        worst_gram2 = std::max(worst_gram2, gram_worst(mu, &mitrea_basis));
    }
    ok = ok && worst_gram2 <= 1e-10;
    detail += "; d2 gram err " + fmt(worst_gram2);

    // tensor with one cancellative factor over a lopsided measure: the
    // standardness constant reaches its two-value ceiling of 2
    const MeasureTree f1 = build_split_measure(formula('b', 8));
    const MeasureTree f2 = build_lebesgue(1, 8);
    const MeasureTree prod = build_product({f1, f2});
    const double st = standardness(tensor({f1, f2}, {1, 0}), prod, 7);
    ok = ok && std::abs(st - 2.0) <= 1e-12;
    detail += "; tensor standardness " + fmt(st);

    // block multiplier system: standardness of each block function is at
    // least sqrt(k^2-2)/(2 sqrt(2))
    const int K = 12;
    const MeasureTree r2 = build_r2_nonstandard(K, r2_block_gen(K) + 1);
    std::vector<std::pair<CubeId, std::vector<double>>> entries;
    for (int k = 2; k <= K; ++k) {
        const CubeId q = r2_block(K, k);
        const double c = k / std::sqrt(2.0 * (k * k - 2));
        std::vector<double> v{k / 2.0, -k / 2.0, c, -c};
        double n2 = 0;
        for (int i = 0; i < 4; ++i)
            n2 += v[i] * v[i] * r2.level[q.gen + 1][(node_index(q) << 2) + i];
        for (auto& x : v) x /= std::sqrt(n2);
        entries.emplace_back(q, v);
    }
    const HaarSystem blocks = custom_system(r2, entries, true);
    bool bounds = validate(blocks, r2).ok;
    for (int k = 2; k <= K; ++k) {
        const HaarFunction phi = blocks.function_at(r2_block(K, k));
        const double prod_norm = l1_norm(phi, r2) * linf_norm(phi, r2);
        bounds = bounds && prod_norm >= std::sqrt(k * k - 2.0) / (2 * std::sqrt(2.0)) - 1e-12;
    }
    ok = ok && bounds;
    detail += std::string("; block standardness bounds ") + (bounds ? "ok" : "FAIL");
    report(5, "haar system suite", ok, detail);
}

// ---------------------------------------------------------------- criterion 6
void criterion_multiplier_growth() {
    const int K = 12;
    const int g = r2_block_gen(K);
    const MeasureTree mu = build_r2_nonstandard(K, g + 1);
    std::vector<std::pair<CubeId, std::vector<double>>> entries;
    for (int k = 2; k <= K; ++k) {
        const CubeId q = r2_block(K, k);
        const double c = k / std::sqrt(2.0 * (k * k - 2));
        std::vector<double> v{k / 2.0, -k / 2.0, c, -c};
        double n2 = 0;
        for (int i = 0; i < 4; ++i)
            n2 += v[i] * v[i] * mu.level[q.gen + 1][(node_index(q) << 2) + i];
        for (auto& x : v) x /= std::sqrt(n2);
        entries.emplace_back(q, v);
    }
    const HaarSystem sys = custom_system(mu, entries, true);
    const ShiftCoefficients mult = ShiftCoefficients::constant(0, 0, 1.0);
    bool ok = true;
    std::string detail = "ratios";
    double prev = 0;
    for (int k = 2; k <= K; ++k) {
        const CubeId q = r2_block(K, k);
        const std::uint64_t child = node_index(q) << 2;  // first quadrant
        const double m1 = mu.level[q.gen + 1][child];
        SimpleFunction f = (1.0 / m1) * SimpleFunction::indicator(
                                            cube_from_node(2, q.gen + 1, child), g + 1);
        const double ratio = weak_l1_norm(haar_shift(mult, sys, sys, f, mu), mu) /
                             lp_norm(f, 1.0, mu);
        const double formula_val =
            (k / 2.0) * (1.0 / k + std::sqrt((k * k - 2.0) / (2.0 * k * k)));
        if (k >= 3) {
            ok = ok && ratio >= formula_val / 4.0 && ratio > prev;
            detail += " " + fmt(ratio);
        }
        prev = ratio;
    }
    report(6, "non-standard multiplier growth", ok, detail);
}

// ---------------------------------------------------------------- criterion 7
void criterion_paraproducts() {
    bool ok = true;
    std::string detail;

    int l2_failures = 0;
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
        const int N = 5 + static_cast<int>(seed % 2);
        const MeasureTree mu = oracle::random_measure(1, N, seed + 3000);
        const HaarSystem psi = canonical_1d(mu);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        CoefficientSequence gamma = CoefficientSequence::zero(1, N);
        for (int g = 0; g < N; ++g)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, g); ++n) gamma.set(g, n, unif(rng));
        const SimpleFunction f = oracle::random_function(1, N, seed + 4000);
        const double lhs = lp_norm(paraproduct(gamma, psi, f, mu), 2.0, mu);
        const double rhs = 2 * carleson_norm(gamma, mu, N - 1) * lp_norm(f, 2.0, mu);
        if (lhs > rhs * (1 + 1e-12)) ++l2_failures;
    }
    ok = ok && l2_failures == 0;
    detail += "L2 bound failures " + std::to_string(l2_failures) + "/500";

    int duality_failures = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const int N = 6;
        const MeasureTree mu = oracle::random_measure(1, N, seed + 5000);
        const HaarSystem theta = canonical_1d(mu);
        const SimpleFunction rho = oracle::random_function(1, N, seed + 5100);
        CoefficientSequence gamma = CoefficientSequence::zero(1, N);
        for (int g = 0; g < N; ++g)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, g); ++n)
                if (theta.in_domain(g, n))
                    gamma.set(g, n, inner_product(rho, theta.function_at(g, n), mu));
        if (carleson_norm(gamma, mu, N - 1) > bmo_norm(rho, mu, N - 1) * (1 + 1e-10))
            ++duality_failures;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        CoefficientSequence free = CoefficientSequence::zero(1, N);
        for (int g = 0; g < N; ++g)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, g); ++n) free.set(g, n, unif(rng));
        const SimpleFunction built = bmo_from_carleson(free, theta, mu);
        if (bmo_norm(built, mu, N) > carleson_norm(free, mu, N - 1) + 1e-9) ++duality_failures;
    }
    ok = ok && duality_failures == 0;
    detail += "; carleson/bmo duality failures " + std::to_string(duality_failures);

    // adjoint paraproduct is weak (1,1)-bounded on the doubling measure
    {
        const MeasureTree mu = build_lebesgue(1, 12);
        const HaarSystem psi = canonical_1d(mu);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        CoefficientSequence gamma = CoefficientSequence::zero(1, 12);
        for (int g = 0; g < 12; ++g)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, g); ++n) gamma.set(g, n, unif(rng));
        const double car = carleson_norm(gamma, mu, 11);
        OperatorHandle op{"paraproduct_adjoint",
                          [&](const SimpleFunction& f) {
                              return (1.0 / car) *
                                     paraproduct_adjoint(gamma, psi, f, mu);
                          },
                          0.0};
        BatterySpec battery;
        battery.seed = 2;
        battery.samples_per_gen = 2;
        battery.random_count = 4;
        const Weak11Report rep = weak11_estimate(op, mu, battery, &psi);
        ok = ok && rep.max_ratio <= 16.0;
        detail += "; doubling adjoint max ratio " + fmt(rep.max_ratio);
    }

    // on the equilibrated non-doubling measure the necessity pair makes the
    // Carleson-normalized adjoint ratio diverge like sqrt(generation)
    {
        const MeasureTree mu = build_split_measure(formula('a', 20));
        const HaarSystem psi = canonical_1d(mu);
        auto necessity_ratio = [&](int g) {
            const std::uint64_t n = 0;  // chain cube
            CoefficientSequence gamma = CoefficientSequence::zero(1, 20);
            gamma.set(g, n, std::sqrt(mu.mass(g, n)));  // Carleson norm exactly 1
            const HaarFunction h = psi.function_at(g, n);
            const int best =
                std::abs(h.child_values[1]) > std::abs(h.child_values[0]) ? 1 : 0;
            const double sgn = h.child_values[best] >= 0 ? 1.0 : -1.0;
            const double mc = mu.mass(g + 1, 2 * n + best);
            SimpleFunction f = (sgn / mc) * SimpleFunction::indicator(
                                                cube_from_node(1, g + 1, 2 * n + best), g + 1);
            return weak_l1_norm(paraproduct_adjoint(gamma, psi, f, mu), mu) /
                   lp_norm(f, 1.0, mu);
        };
        bool increasing = true;
        double prev = 0;
        for (int g = 6; g <= 16; ++g) {
            const double r = necessity_ratio(g);
            increasing = increasing && r > prev;
            prev = r;
        }
        const double r6 = necessity_ratio(6);
        const double r16 = necessity_ratio(16);
        const bool grows = increasing && r16 * r16 >= 2.0 * r6 * r6;
        ok = ok && grows;
        detail += "; necessity ratio gen6 " + fmt(r6) + " -> gen16 " + fmt(r16) +
                  " (squared factor " + fmt(r16 * r16 / (r6 * r6)) + ")";
    }
    report(7, "paraproduct suite", ok, detail);
}

// ---------------------------------------------------------------- criterion 8
void criterion_operator_algebra() {
    bool ok = true;
    double worst_adj = 0, worst_mult = 0, worst_coef = 0;
    const ShiftCoefficients H = ShiftCoefficients::hilbert();
    const ShiftCoefficients Hs = ShiftCoefficients::hilbert_adjoint();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const int N = 6;
        const MeasureTree mu = oracle::random_measure(1, N, seed + 8000);
        const HaarSystem sys = canonical_1d(mu);
        const SimpleFunction f = oracle::random_function(1, N, seed + 8100);
        const SimpleFunction g = oracle::random_function(1, N, seed + 8200);

        // shift adjointness
        const double lhs = inner_product(haar_shift(H, sys, sys, f, mu), g, mu);
        const double rhs = inner_product(f, haar_shift(Hs, sys, sys, g, mu), mu);
        worst_adj = std::max(worst_adj, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1.0));

        // paraproduct adjointness
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        CoefficientSequence gamma = CoefficientSequence::zero(1, N);
        for (int k = 0; k < N; ++k)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, k); ++n) gamma.set(k, n, unif(rng));
        const double pl = inner_product(paraproduct(gamma, sys, f, mu), g, mu);
        const double pr = inner_product(f, paraproduct_adjoint(gamma, sys, g, mu), mu);
        worst_adj = std::max(worst_adj, std::abs(pl - pr) / std::max(std::abs(pl), 1.0));

        // martingale transform == haar multiplier in d=1
        MartingaleTransformSpec spec{CoefficientSequence::zero(1, N)};
        for (int k = 0; k < N; ++k)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, k); ++n)
                spec.alpha.set(k, n, unif(rng));
        SimpleFunction mult = SimpleFunction::zero(1, N);
        for (int k = 0; k < N; ++k)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, k); ++n) {
                if (!sys.in_domain(k, n)) continue;
                const SimpleFunction h = to_simple(sys.function_at(k, n), N);
                mult = mult + (spec.alpha.get(k, n) * inner_product(f, h, mu)) * h;
            }
        worst_mult = std::max(worst_mult,
                              lp_norm(martingale_transform(spec, f, mu) - mult, 2.0, mu) /
                                  std::max(lp_norm(mult, 2.0, mu), 1.0));

        // coefficient-level action of H and H*
        for (int k = 1; k < N - 1; ++k)
            for (std::uint64_t n = 0; n < nodes_at_gen(1, k); n += 3) {
                if (!sys.in_domain(k, n)) continue;
                const SimpleFunction hI = to_simple(sys.function_at(k, n), N);
                const SimpleFunction HhI = haar_shift(H, sys, sys, hI, mu);
                const SimpleFunction HshI = haar_shift(Hs, sys, sys, hI, mu);
                for (int k2 = 0; k2 < N; ++k2)
                    for (std::uint64_t n2 = 0; n2 < nodes_at_gen(1, k2); ++n2) {
                        if (!sys.in_domain(k2, n2)) continue;
                        const SimpleFunction hJ = to_simple(sys.function_at(k2, n2), N);
                        double want = 0;
                        if (k2 == k + 1 && n2 == 2 * n) want = 1;
                        if (k2 == k + 1 && n2 == 2 * n + 1) want = -1;
                        worst_coef = std::max(worst_coef,
                                              std::abs(inner_product(HhI, hJ, mu) - want));
                        double want_s = 0;
                        if (k2 == k - 1 && n2 == n / 2)
                            want_s = (n % 2 == 0) ? 1.0 : -1.0;
                        worst_coef = std::max(worst_coef,
                                              std::abs(inner_product(HshI, hJ, mu) - want_s));
                    }
            }
    }
    ok = worst_adj <= 1e-10 && worst_mult <= 1e-12 && worst_coef <= 1e-12;
    report(8, "operator algebra",
           ok, "adjointness rel err " + fmt(worst_adj) + ", transform vs multiplier " +
                   fmt(worst_mult) + ", H coefficient err " + fmt(worst_coef));
}

// ---------------------------------------------------------------- criterion 9
void criterion_maximal_square() {
    bool ok = true;
    int weak_failures = 0;
    auto check_weak = [&](const MeasureTree& mu, const SimpleFunction& f) {
        if (weak_l1_norm(maximal(f, mu), mu) > lp_norm(f, 1.0, mu) * (1 + 1e-12))
            ++weak_failures;
    };
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const int dim = 1 + static_cast<int>(seed % 2);
        const int N = dim == 1 ? 7 : 4;
        const MeasureTree mu = oracle::random_measure(dim, N, seed + 9000, seed % 4 ? 0.0 : 0.1);
        check_weak(mu, oracle::random_function(dim, N, seed + 9100));
    }
    std::vector<MeasureTree> formulas;
    for (char w : {'a', 'b', 'c', 'd'}) formulas.push_back(build_split_measure(formula(w, 20)));
    for (std::size_t i = 0; i < formulas.size(); ++i)
        check_weak(formulas[i], oracle::random_function(1, 20, 9200 + i));
    ok = ok && weak_failures == 0;
    std::string detail = "maximal weak bound failures " + std::to_string(weak_failures);

    double square_max = 0;
    for (const auto& mu : formulas) {
        const HaarSystem sys = canonical_1d(mu);
        OperatorHandle op{"square",
                          [&](const SimpleFunction& f) { return square_function(f, mu); },
                          0.0};
        BatterySpec battery;
        battery.seed = 3;
        battery.upto_gen = 18;
        battery.samples_per_gen = 1;
        battery.random_count = 2;
        square_max = std::max(square_max, weak11_estimate(op, mu, battery, &sys).max_ratio);
    }
    ok = ok && square_max <= 10.0;
    detail += ", square battery max ratio " + fmt(square_max);
    report(9, "maximal and square function bounds", ok, detail);
}

}  // namespace

int main() {
    criterion_decomposition();
    criterion_closed_forms();
    criterion_classification();
    criterion_dichotomy();
    criterion_haar_systems();
    criterion_multiplier_growth();
    criterion_paraproducts();
    criterion_operator_algebra();
    criterion_maximal_square();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
