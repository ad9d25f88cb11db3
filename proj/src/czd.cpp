#include "haarlab/czd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace haarlab {

namespace {
struct LeafRange {
    std::uint64_t lo, hi;
    int shift;
};
LeafRange leaf_range(int dim, int gen, std::uint64_t node, int resolution) {
    const int shift = dim * (resolution - gen);
    return {node << shift, (node + 1) << shift, shift};
}
}  // namespace

std::vector<CubeId> maximal_cubes(const SimpleFunction& f, double lambda, const MeasureTree& mu) {
    if (lambda <= 0) throw std::invalid_argument("lambda must be positive");
    const auto t = abs_integrals(f, mu);
    const double root_avg = mu.total() > 0 ? t.at(0, 0) / mu.total() : 0.0;
    if (lambda <= root_avg) throw std::invalid_argument("lambda below global average");
    const int d = f.dim;
    const int M = f.resolution;
    std::vector<CubeId> out;
    std::vector<std::pair<int, std::uint64_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [g, n] = stack.back();
        stack.pop_back();
        const double m = mu.level[g][n];
        if (m <= 0) continue;
        if (t.at(g, n) / m > lambda) {
            out.push_back(cube_from_node(d, g, n));
            continue;
        }
        if (g < M)
            for (int c = (1 << d) - 1; c >= 0; --c)
                stack.push_back({g + 1, (n << d) + static_cast<std::uint64_t>(c)});
    }
    std::sort(out.begin(), out.end(), [](const CubeId& a, const CubeId& b) {
        return std::tie(a.gen, a.coords) < std::tie(b.gen, b.coords);
    });
    return out;
}

CZDecomposition decompose(const SimpleFunction& f, double lambda, const MeasureTree& mu) {
    CZDecomposition dec;
    dec.lambda = lambda;
    dec.maximal_cubes = maximal_cubes(f, lambda, mu);
    const int d = f.dim;
    const int M = f.resolution;
    const auto t = integrals(f, mu);
    dec.g = f;
    dec.g3 = SimpleFunction::zero(d, M);
    for (const auto& q : dec.maximal_cubes) {
        const std::uint64_t n = node_index(q);
        const std::uint64_t pn = n >> d;
        const double mq = mu.level[q.gen][n];
        const double mp = mu.level[q.gen - 1][pn];
        const double aq = t.at(q.gen, n) / mq;  // maximal cubes have positive mass
        const double ap = mp > 0 ? t.at(q.gen - 1, pn) / mp : 0.0;
        dec.avg_on_cube.push_back(aq);
        dec.avg_on_parent.push_back(ap);
        const double ratio = mp > 0 ? mq / mp : 0.0;
        dec.mass_ratio.push_back(ratio);
        const auto rq = leaf_range(d, q.gen, n, M);
        for (std::uint64_t l = rq.lo; l < rq.hi; ++l) dec.g.values[l] = ap;
        const double c3 = (aq - ap) * ratio;
        const auto rp = leaf_range(d, q.gen - 1, pn, M);
        for (std::uint64_t l = rp.lo; l < rp.hi; ++l) dec.g3.values[l] += c3;
    }
    for (std::uint64_t l = 0; l < dec.g.values.size(); ++l) dec.g.values[l] += dec.g3.values[l];
    return dec;
}

SimpleFunction CZDecomposition::b_part(const SimpleFunction& f, const MeasureTree& mu,
                                       std::size_t j) const {
    const auto& q = maximal_cubes[j];
    SimpleFunction out = SimpleFunction::zero(f.dim, f.resolution);
    const auto r = leaf_range(f.dim, q.gen, node_index(q), f.resolution);
    for (std::uint64_t l = r.lo; l < r.hi; ++l) out.values[l] = f.values[l] - avg_on_cube[j];
    (void)mu;
    return out;
}

SimpleFunction CZDecomposition::beta_part(std::size_t j, int resolution) const {
    const auto& q = maximal_cubes[j];
    const double c = avg_on_cube[j] - avg_on_parent[j];
    SimpleFunction out = SimpleFunction::zero(q.dim, resolution);
    const auto rp = leaf_range(q.dim, q.gen - 1, node_index(q) >> q.dim, resolution);
    for (std::uint64_t l = rp.lo; l < rp.hi; ++l) out.values[l] = -c * mass_ratio[j];
    const auto rq = leaf_range(q.dim, q.gen, node_index(q), resolution);
    for (std::uint64_t l = rq.lo; l < rq.hi; ++l) out.values[l] += c;
    return out;
}

SimpleFunction CZDecomposition::b_total(const SimpleFunction& f, const MeasureTree& mu) const {
    SimpleFunction out = SimpleFunction::zero(f.dim, f.resolution);
    for (std::size_t j = 0; j < maximal_cubes.size(); ++j) {
        const auto& q = maximal_cubes[j];
        const auto r = leaf_range(f.dim, q.gen, node_index(q), f.resolution);
        for (std::uint64_t l = r.lo; l < r.hi; ++l) out.values[l] = f.values[l] - avg_on_cube[j];
    }
    (void)mu;
    return out;
}

SimpleFunction CZDecomposition::beta_total(int resolution) const {
    SimpleFunction out =
        SimpleFunction::zero(maximal_cubes.empty() ? g.dim : maximal_cubes[0].dim, resolution);
    for (std::size_t j = 0; j < maximal_cubes.size(); ++j) {
        const auto& q = maximal_cubes[j];
        const double c = avg_on_cube[j] - avg_on_parent[j];
        const auto rp = leaf_range(q.dim, q.gen - 1, node_index(q) >> q.dim, resolution);
        for (std::uint64_t l = rp.lo; l < rp.hi; ++l) out.values[l] -= c * mass_ratio[j];
        const auto rq = leaf_range(q.dim, q.gen, node_index(q), resolution);
        for (std::uint64_t l = rq.lo; l < rq.hi; ++l) out.values[l] += c;
    }
    return out;
}

VerificationReport verify(const CZDecomposition& dec, const SimpleFunction& f,
                          const MeasureTree& mu, const std::vector<int>& p_list) {
    VerificationReport rep;
    auto add = [&](const std::string& name, double measured, double bound) {
        const bool pass = measured <= bound;
        rep.checks.push_back({name, bound, measured, pass});
        rep.ok = rep.ok && pass;
    };
    const int d = f.dim;
    const int M = f.resolution;
    const double f_l1 = lp_norm(f, 1.0, mu);
    const double f_sup = [&] {
        double s = 0;
        for (double v : f.values) s = std::max(s, std::abs(v));
        return s;
    }();

    // pointwise reconstruction
    {
        const SimpleFunction sum = dec.g + dec.b_total(f, mu) + dec.beta_total(M);
        double worst = 0;
        for (std::uint64_t l = 0; l < sum.values.size(); ++l)
            worst = std::max(worst, std::abs(sum.values[l] - f.values[l]));
        add("reconstruction", worst / std::max(f_sup, 1e-300), 1e-9);
    }
    // supports: b vanishes off the maximal cubes, beta off their parents
    {
        std::vector<char> in_b(f.values.size(), 0), in_beta(f.values.size(), 0);
        for (const auto& q : dec.maximal_cubes) {
            const auto rq = leaf_range(d, q.gen, node_index(q), M);
            for (std::uint64_t l = rq.lo; l < rq.hi; ++l) in_b[l] = 1;
            const auto rp = leaf_range(d, q.gen - 1, node_index(q) >> d, M);
            for (std::uint64_t l = rp.lo; l < rp.hi; ++l) in_beta[l] = 1;
        }
        const SimpleFunction bt = dec.b_total(f, mu);
        const SimpleFunction et = dec.beta_total(M);
        double worst = 0;
        for (std::uint64_t l = 0; l < bt.values.size(); ++l) {
            if (!in_b[l]) worst = std::max(worst, std::abs(bt.values[l]));
            if (!in_beta[l]) worst = std::max(worst, std::abs(et.values[l]));
        }
        add("supports", worst, 0.0);
    }
    // mean-zero blocks and block L1 sums
    {
        double worst_mean = 0, sum_b = 0, sum_beta = 0;
        for (std::size_t j = 0; j < dec.maximal_cubes.size(); ++j) {
            const auto& q = dec.maximal_cubes[j];
            const std::uint64_t n = node_index(q);
            const auto r = leaf_range(d, q.gen, n, M);
            double ib = 0, ib_abs = 0;
            for (std::uint64_t l = r.lo; l < r.hi; ++l) {
                const double v = f.values[l] - dec.avg_on_cube[j];
                const double m = mu.level[M][l];
                ib += v * m;
                ib_abs += std::abs(v) * m;
            }
            sum_b += ib_abs;
            const double c = dec.avg_on_cube[j] - dec.avg_on_parent[j];
            const double mq = mu.level[q.gen][n];
            const double mp = mu.level[q.gen - 1][n >> d];
            const double ibeta = c * (mq - dec.mass_ratio[j] * mp);
            sum_beta += std::abs(c) * (std::abs(1.0 - dec.mass_ratio[j]) * mq +
                                       dec.mass_ratio[j] * (mp - mq));
            worst_mean = std::max({worst_mean, std::abs(ib), std::abs(ibeta)});
        }
        add("mean_zero_blocks", worst_mean, 1e-12 * std::max(f_l1, 1e-300));
        add("b_l1_sum", sum_b, 2.0 * f_l1 + 1e-12 * f_l1);
        add("beta_l1_sum", sum_beta, 4.0 * f_l1 + 1e-12 * f_l1);
    }
    // good part bounds
    add("g_l1", lp_norm(dec.g, 1.0, mu), 4.0 * f_l1 + 1e-12 * f_l1);
    for (int m : p_list) {
        const double lhs = std::pow(lp_norm(dec.g3, m, mu), m);
        double mfact = 1;
        for (int i = 2; i <= m; ++i) mfact *= i;
        const double rhs = std::ldexp(mfact, m) * std::pow(dec.lambda, m - 1) * f_l1;
        add("g3_moment_m" + std::to_string(m), lhs, rhs * (1 + 1e-12));
    }
    return rep;
}

SimpleFunction lemma_aux_operator(const std::vector<CubeId>& cubes, const SimpleFunction& f,
                                  const MeasureTree& mu) {
    const int d = f.dim;
    int maxg = f.resolution;
    // disjointness via leaf intervals at a common depth
    std::vector<std::pair<std::uint64_t, std::uint64_t>> iv;
    for (const auto& q : cubes) {
        if (q.gen == 0) throw std::invalid_argument("root cube not allowed");
        maxg = std::max(maxg, q.gen);
    }
    for (const auto& q : cubes) {
        const int shift = d * (maxg - q.gen);
        iv.emplace_back(node_index(q) << shift, (node_index(q) + 1) << shift);
    }
    std::sort(iv.begin(), iv.end());
    for (std::size_t i = 1; i < iv.size(); ++i)
        if (iv[i].first < iv[i - 1].second)
            throw std::invalid_argument("cubes are not pairwise disjoint");

    SimpleFunction out = SimpleFunction::zero(d, f.resolution);
    const auto t = abs_integrals(f, mu);
    for (const auto& q : cubes) {
        const std::uint64_t n = node_index(q);
        const std::uint64_t pn = n >> d;
        const double mp = mu.level[q.gen - 1][pn];
        if (mp <= 0) continue;
        double num = 0;
        if (q.gen <= f.resolution) {
            num = t.at(q.gen, n);
        } else {
            num = std::abs(f.values[n >> (d * (q.gen - f.resolution))]) * mu.level[q.gen][n];
        }
        const double c = num / mp;
        if (q.gen - 1 > f.resolution) throw std::out_of_range("cube finer than function");
        const int shift = d * (f.resolution - (q.gen - 1));
        for (std::uint64_t l = pn << shift; l < (pn + 1) << shift; ++l) out.values[l] += c;
    }
    return out;
}

}  // namespace haarlab
