#include "haarlab/func.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "haarlab/haar.hpp"

namespace haarlab {

SimpleFunction SimpleFunction::zero(int dim, int resolution) {
    return constant(dim, resolution, 0.0);
}

SimpleFunction SimpleFunction::constant(int dim, int resolution, double c) {
    if (dim < 1 || resolution < 0 || dim * resolution > 40)
        throw std::invalid_argument("bad function shape");
    SimpleFunction f{dim, resolution, {}};
    f.values.assign(nodes_at_gen(dim, resolution), c);
    return f;
}

SimpleFunction SimpleFunction::indicator(const CubeId& q, int resolution) {
    if (resolution < q.gen) throw std::invalid_argument("resolution above cube generation");
    SimpleFunction f = zero(q.dim, resolution);
    const int shift = q.dim * (resolution - q.gen);
    const std::uint64_t lo = node_index(q) << shift;
    const std::uint64_t hi = (node_index(q) + 1) << shift;
    for (std::uint64_t n = lo; n < hi; ++n) f.values[n] = 1.0;
    return f;
}

SimpleFunction refine(const SimpleFunction& f, int new_resolution) {
    if (new_resolution < f.resolution) throw std::invalid_argument("cannot coarsen");
    if (new_resolution == f.resolution) return f;
    if (f.dim * new_resolution > 40) throw std::out_of_range("depth overflow");
    SimpleFunction g{f.dim, new_resolution, {}};
    const int shift = f.dim * (new_resolution - f.resolution);
    g.values.resize(nodes_at_gen(f.dim, new_resolution));
    for (std::uint64_t n = 0; n < g.values.size(); ++n) g.values[n] = f.values[n >> shift];
    return g;
}

namespace {
std::pair<SimpleFunction, SimpleFunction> aligned(const SimpleFunction& a,
                                                  const SimpleFunction& b) {
    if (a.dim != b.dim) throw std::invalid_argument("dimension mismatch");
    const int m = std::max(a.resolution, b.resolution);
    return {refine(a, m), refine(b, m)};
}
}  // namespace

SimpleFunction operator+(const SimpleFunction& a, const SimpleFunction& b) {
    auto [x, y] = aligned(a, b);
    for (std::uint64_t n = 0; n < x.values.size(); ++n) x.values[n] += y.values[n];
    return x;
}

SimpleFunction operator-(const SimpleFunction& a, const SimpleFunction& b) {
    auto [x, y] = aligned(a, b);
    for (std::uint64_t n = 0; n < x.values.size(); ++n) x.values[n] -= y.values[n];
    return x;
}

SimpleFunction operator*(double c, const SimpleFunction& f) {
    SimpleFunction g = f;
    for (auto& v : g.values) v *= c;
    return g;
}

namespace {
IntegralTree integrals_impl(const SimpleFunction& f, const MeasureTree& mu, bool absolute) {
    if (f.dim != mu.dim) throw std::invalid_argument("dimension mismatch");
    if (f.resolution > mu.depth) throw std::invalid_argument("function finer than measure");
    IntegralTree t;
    t.integral.resize(f.resolution + 1);
    auto& leaf = t.integral[f.resolution];
    leaf.resize(f.values.size());
    for (std::uint64_t n = 0; n < f.values.size(); ++n) {
        const double v = absolute ? std::abs(f.values[n]) : f.values[n];
        leaf[n] = v * mu.level[f.resolution][n];
    }
    const int fanout = 1 << f.dim;
    for (int k = f.resolution - 1; k >= 0; --k) {
        t.integral[k].assign(nodes_at_gen(f.dim, k), 0.0);
        for (std::uint64_t n = 0; n < t.integral[k].size(); ++n) {
            double s = 0;
            for (int c = 0; c < fanout; ++c) s += t.integral[k + 1][(n << f.dim) + c];
            t.integral[k][n] = s;
        }
    }
    return t;
}
}  // namespace

IntegralTree integrals(const SimpleFunction& f, const MeasureTree& mu) {
    return integrals_impl(f, mu, false);
}

IntegralTree abs_integrals(const SimpleFunction& f, const MeasureTree& mu) {
    return integrals_impl(f, mu, true);
}

namespace {
double integral_on(const SimpleFunction& f, const MeasureTree& mu, int gen, std::uint64_t node) {
    if (gen >= f.resolution) {
        // f is constant on this cube
        return f.values[node >> (f.dim * (gen - f.resolution))] * mu.level[gen][node];
    }
    const int shift = f.dim * (f.resolution - gen);
    double s = 0;
    for (std::uint64_t n = node << shift; n < (node + 1) << shift; ++n)
        s += f.values[n] * mu.level[f.resolution][n];
    return s;
}
}  // namespace

double average(const SimpleFunction& f, int gen, std::uint64_t node, const MeasureTree& mu) {
    const double m = mu.level[gen][node];
    if (m <= 0) return 0.0;
    return integral_on(f, mu, gen, node) / m;
}

double average(const SimpleFunction& f, const CubeId& q, const MeasureTree& mu) {
    return average(f, q.gen, node_index(q), mu);
}

double integral(const SimpleFunction& f, const MeasureTree& mu) {
    return integral_on(f, mu, 0, 0);
}

double lp_norm(const SimpleFunction& f, double p, const MeasureTree& mu) {
    if (std::isinf(p)) return linf_norm(f, mu);
    if (p < 1) throw std::invalid_argument("p must be >= 1");
    if (f.resolution > mu.depth) throw std::invalid_argument("function finer than measure");
    double s = 0;
    for (std::uint64_t n = 0; n < f.values.size(); ++n) {
        const double m = mu.level[f.resolution][n];
        if (m > 0) s += std::pow(std::abs(f.values[n]), p) * m;
    }
    return std::pow(s, 1.0 / p);
}

double linf_norm(const SimpleFunction& f, const MeasureTree& mu) {
    double s = 0;
    for (std::uint64_t n = 0; n < f.values.size(); ++n)
        if (mu.level[f.resolution][n] > 0) s = std::max(s, std::abs(f.values[n]));
    return s;
}

double weak_l1_norm(const SimpleFunction& f, const MeasureTree& mu) {
    std::vector<std::pair<double, double>> vm;  // (|value|, mass)
    vm.reserve(f.values.size());
    for (std::uint64_t n = 0; n < f.values.size(); ++n) {
        const double m = mu.level[f.resolution][n];
        if (m > 0 && f.values[n] != 0) vm.emplace_back(std::abs(f.values[n]), m);
    }
    std::sort(vm.begin(), vm.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double cum = 0, best = 0;
    for (auto& [v, m] : vm) {
        cum += m;
        best = std::max(best, v * cum);
    }
    return best;
}

std::size_t distinct_value_count(const SimpleFunction& f, const MeasureTree& mu) {
    std::set<double> vals;
    for (std::uint64_t n = 0; n < f.values.size(); ++n)
        if (mu.level[f.resolution][n] > 0 && f.values[n] != 0)
            vals.insert(std::abs(f.values[n]));
    return vals.size();
}

double inner_product(const SimpleFunction& f, const SimpleFunction& g, const MeasureTree& mu) {
    auto [x, y] = aligned(f, g);
    double s = 0;
    for (std::uint64_t n = 0; n < x.values.size(); ++n)
        s += x.values[n] * y.values[n] * mu.level[x.resolution][n];
    return s;
}

double inner_product(const SimpleFunction& f, const HaarFunction& phi, const MeasureTree& mu) {
    if (phi.is_zero) return 0.0;
    double s = 0;
    for (int c = 0; c < (1 << phi.dim); ++c) {
        const double v = phi.child_values[c];
        if (v != 0)
            s += v * integral_on(f, mu, phi.gen + 1, (phi.node << phi.dim) + c);
    }
    return s;
}

CoefficientSequence CoefficientSequence::zero(int dim, int depth) {
    CoefficientSequence g;
    g.dim = dim;
    g.depth = depth;
    g.level.resize(depth);
    return g;
}

double CoefficientSequence::get(int gen, std::uint64_t node) const {
    if (gen < 0 || gen >= depth || level[gen].empty()) return 0.0;
    return level[gen][node];
}

void CoefficientSequence::set(int gen, std::uint64_t node, double v) {
    if (gen < 0 || gen >= depth) throw std::out_of_range("coefficient generation out of range");
    if (level[gen].empty()) level[gen].assign(nodes_at_gen(dim, gen), 0.0);
    level[gen][node] = v;
}

double bmo_norm(const SimpleFunction& rho, const MeasureTree& mu, int upto_gen) {
    const auto t1 = integrals(rho, mu);
    SimpleFunction sq = rho;
    for (auto& v : sq.values) v *= v;
    const auto t2 = integrals(sq, mu);
    double best = 0;
    const int top = std::min(upto_gen, rho.resolution);
    for (int g = 0; g <= top; ++g) {
        for (std::uint64_t n = 0; n < mu.level[g].size(); ++n) {
            const double m = mu.level[g][n];
            if (m <= 0) continue;
            const double mean = t1.at(g, n) / m;
            const double osc2 = std::max(0.0, t2.at(g, n) / m - mean * mean);
            best = std::max(best, osc2);
        }
    }
    return std::sqrt(best);
}

double carleson_norm(const CoefficientSequence& gamma, const MeasureTree& mu, int upto_gen) {
    if (gamma.dim != mu.dim) throw std::invalid_argument("dimension mismatch");
    const int top = std::min(gamma.depth, mu.depth + 1) - 1;
    // subtree sums of gamma^2, bottom-up
    std::vector<std::vector<double>> s(top + 1);
    const int fanout = 1 << mu.dim;
    for (int g = top; g >= 0; --g) {
        s[g].assign(nodes_at_gen(mu.dim, g), 0.0);
        for (std::uint64_t n = 0; n < s[g].size(); ++n) {
            double v = gamma.get(g, n);
            if (v != 0 && mu.level[g][n] <= 0)
                throw std::invalid_argument("nonzero coefficient on zero-mass cube");
            double acc = v * v;
            if (g < top)
                for (int c = 0; c < fanout; ++c) acc += s[g + 1][(n << mu.dim) + c];
            s[g][n] = acc;
        }
    }
    double best = 0;
    for (int g = 0; g <= std::min(upto_gen, top); ++g)
        for (std::uint64_t n = 0; n < s[g].size(); ++n)
            if (mu.level[g][n] > 0) best = std::max(best, s[g][n] / mu.level[g][n]);
    return std::sqrt(best);
}

SimpleFunction bmo_from_carleson(const CoefficientSequence& gamma, const HaarSystem& theta,
                                 const MeasureTree& mu) {
    if (!theta.cancellative)
        throw std::invalid_argument("bmo_from_carleson needs a cancellative system");
    const int N = mu.depth;
    const int d = mu.dim;
    SimpleFunction rho = SimpleFunction::zero(d, N);
    const int sys_top = std::min(theta.depth, N);  // functions at gen < sys_top
    for (std::uint64_t L = 0; L < rho.values.size(); ++L) {
        // deepest corner-chain cube containing this leaf
        int kx = N;
        if (L > 0) {
            int bits = 64 - static_cast<int>(__builtin_clzll(L));
            kx = N - (bits + d - 1) / d;
        }
        double v = 0;
        for (int g = kx; g < sys_top; ++g) {
            const std::uint64_t anc = L >> (d * (N - g));
            const double gq = gamma.get(g, anc);
            if (gq == 0) continue;
            const int c = static_cast<int>((L >> (d * (N - g - 1))) & ((1u << d) - 1));
            v += gq * theta.child_value(g, anc, c);
        }
        rho.values[L] = v;
    }
    return rho;
}

}  // namespace haarlab
