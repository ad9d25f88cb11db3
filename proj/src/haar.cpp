#include "haarlab/haar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace haarlab {

namespace {
double child_mass(const MeasureTree& mu, const HaarFunction& h, int c) {
    return mu.level[h.gen + 1][(h.node << h.dim) + static_cast<std::uint64_t>(c)];
}
}  // namespace

double l1_norm(const HaarFunction& h, const MeasureTree& mu) {
    if (h.is_zero) return 0;
    double s = 0;
    for (int c = 0; c < (1 << h.dim); ++c) s += std::abs(h.child_values[c]) * child_mass(mu, h, c);
    return s;
}

double l2_norm(const HaarFunction& h, const MeasureTree& mu) {
    if (h.is_zero) return 0;
    double s = 0;
    for (int c = 0; c < (1 << h.dim); ++c)
        s += h.child_values[c] * h.child_values[c] * child_mass(mu, h, c);
    return std::sqrt(s);
}

double linf_norm(const HaarFunction& h, const MeasureTree& mu) {
    if (h.is_zero) return 0;
    double s = 0;
    for (int c = 0; c < (1 << h.dim); ++c)
        if (child_mass(mu, h, c) > 0) s = std::max(s, std::abs(h.child_values[c]));
    return s;
}

double lp_norm(const HaarFunction& h, double p, const MeasureTree& mu) {
    if (std::isinf(p)) return linf_norm(h, mu);
    if (h.is_zero) return 0;
    double s = 0;
    for (int c = 0; c < (1 << h.dim); ++c)
        s += std::pow(std::abs(h.child_values[c]), p) * child_mass(mu, h, c);
    return std::pow(s, 1.0 / p);
}

double integral(const HaarFunction& h, const MeasureTree& mu) {
    if (h.is_zero) return 0;
    double s = 0;
    for (int c = 0; c < (1 << h.dim); ++c) s += h.child_values[c] * child_mass(mu, h, c);
    return s;
}

double inner_product(const HaarFunction& a, const HaarFunction& b, const MeasureTree& mu) {
    if (a.is_zero || b.is_zero) return 0;
    if (a.gen == b.gen) {
        if (a.node != b.node) return 0;
        double s = 0;
        for (int c = 0; c < (1 << a.dim); ++c)
            s += a.child_values[c] * b.child_values[c] * child_mass(mu, a, c);
        return s;
    }
    const HaarFunction& top = (a.gen < b.gen) ? a : b;
    const HaarFunction& bot = (a.gen < b.gen) ? b : a;
    if ((bot.node >> (bot.dim * (bot.gen - top.gen))) != top.node) return 0;
    // top is constant on the support of bot
    const int c_top =
        static_cast<int>((bot.node >> (bot.dim * (bot.gen - top.gen - 1))) & ((1u << bot.dim) - 1));
    return top.child_values[c_top] * integral(bot, mu);
}

SimpleFunction to_simple(const HaarFunction& h, int resolution) {
    if (resolution < h.gen + 1) throw std::invalid_argument("resolution too coarse");
    SimpleFunction f = SimpleFunction::zero(h.dim, resolution);
    if (h.is_zero) return f;
    const int shift = h.dim * (resolution - h.gen - 1);
    for (int c = 0; c < (1 << h.dim); ++c) {
        const std::uint64_t base = (h.node << h.dim) + static_cast<std::uint64_t>(c);
        for (std::uint64_t n = base << shift; n < (base + 1) << shift; ++n)
            f.values[n] = h.child_values[c];
    }
    return f;
}

HaarSystem HaarSystem::empty(int dim, int depth, const std::string& builder, bool cancellative) {
    HaarSystem s;
    s.dim = dim;
    s.depth = depth;
    s.cancellative = cancellative;
    s.builder = builder;
    s.vals.resize(depth);
    s.zero.resize(depth);
    for (int k = 0; k < depth; ++k) {
        s.vals[k].assign(nodes_at_gen(dim, k) << dim, 0.0);
        s.zero[k].assign(nodes_at_gen(dim, k), 1);
    }
    return s;
}

HaarFunction HaarSystem::function_at(int gen, std::uint64_t node) const {
    HaarFunction h{dim, gen, node, std::vector<double>(std::size_t{1} << dim, 0.0),
                   zero[gen][node] != 0};
    if (!h.is_zero)
        for (int c = 0; c < (1 << dim); ++c) h.child_values[c] = child_value(gen, node, c);
    return h;
}

void HaarSystem::assign(int gen, std::uint64_t node, const HaarFunction& h) {
    zero[gen][node] = h.is_zero ? 1 : 0;
    for (int c = 0; c < (1 << dim); ++c)
        vals[gen][(node << dim) + static_cast<std::uint64_t>(c)] =
            h.is_zero ? 0.0 : h.child_values[c];
}

HaarFunction canonical_1d_function(const MeasureTree& mu, int gen, std::uint64_t node) {
    HaarFunction h{1, gen, node, {0.0, 0.0}, true};
    const double ml = mu.level[gen + 1][2 * node];
    const double mr = mu.level[gen + 1][2 * node + 1];
    const double mi = mu.level[gen][node];
    if (ml <= kMassFloor || mr <= kMassFloor || mi <= kMassFloor) return h;
    const double m = ml * mr / mi;
    h.is_zero = false;
    h.child_values[0] = std::sqrt(m) / ml;
    h.child_values[1] = -std::sqrt(m) / mr;
    return h;
}

HaarSystem canonical_1d(const MeasureTree& mu) {
    if (mu.dim != 1) throw std::invalid_argument("canonical_1d requires d=1");
    HaarSystem s = HaarSystem::empty(1, mu.depth, "canonical1d");
    for (int g = 0; g < mu.depth; ++g)
        for (std::uint64_t n = 0; n < nodes_at_gen(1, g); ++n)
            s.assign(g, n, canonical_1d_function(mu, g, n));
    return s;
}

namespace {
HaarFunction two_set_function(int dim, int gen, std::uint64_t node,
                              const std::vector<double>& cm, int lo, int mid, int hi) {
    // Haar function on the child-index block [lo,hi) split at mid.
    HaarFunction h{dim, gen, node, std::vector<double>(cm.size(), 0.0), true};
    double ml = 0, mr = 0;
    for (int c = lo; c < mid; ++c) ml += cm[c];
    for (int c = mid; c < hi; ++c) mr += cm[c];
    if (ml <= kMassFloor || mr <= kMassFloor) return h;
    const double m = ml * mr / (ml + mr);
    h.is_zero = false;
    for (int c = lo; c < mid; ++c) h.child_values[c] = std::sqrt(m) / ml;
    for (int c = mid; c < hi; ++c) h.child_values[c] = -std::sqrt(m) / mr;
    return h;
}

std::vector<double> child_masses(const MeasureTree& mu, int gen, std::uint64_t node) {
    std::vector<double> cm(std::size_t{1} << mu.dim);
    for (int c = 0; c < (1 << mu.dim); ++c)
        cm[c] = mu.level[gen + 1][(node << mu.dim) + static_cast<std::uint64_t>(c)];
    return cm;
}

void wilson_rec(int dim, int gen, std::uint64_t node, const std::vector<double>& cm, int lo,
                int hi, std::vector<HaarFunction>& out) {
    if (hi - lo < 2) return;
    const int mid = lo + (hi - lo) / 2;
    out.push_back(two_set_function(dim, gen, node, cm, lo, mid, hi));
    wilson_rec(dim, gen, node, cm, lo, mid, out);
    wilson_rec(dim, gen, node, cm, mid, hi, out);
}
}  // namespace

std::vector<HaarFunction> wilson_basis(const MeasureTree& mu, int gen, std::uint64_t node) {
    std::vector<HaarFunction> out;
    out.reserve((std::size_t{1} << mu.dim) - 1);
    wilson_rec(mu.dim, gen, node, child_masses(mu, gen, node), 0, 1 << mu.dim, out);
    return out;
}

std::vector<HaarFunction> mitrea_basis(const MeasureTree& mu, int gen, std::uint64_t node) {
    const auto cm = child_masses(mu, gen, node);
    const int fanout = 1 << mu.dim;
    std::vector<double> tail(fanout + 1, 0.0);  // tail[j] = sum of cm[j..)
    for (int j = fanout - 1; j >= 0; --j) tail[j] = tail[j + 1] + cm[j];
    std::vector<HaarFunction> out;
    for (int j = 0; j < fanout - 1; ++j) {
        HaarFunction h{mu.dim, gen, node, std::vector<double>(cm.size(), 0.0), true};
        if (cm[j] > kMassFloor && tail[j + 1] > kMassFloor) {
            const double m = cm[j] * tail[j + 1] / tail[j];
            h.is_zero = false;
            h.child_values[j] = std::sqrt(m) / cm[j];
            for (int c = j + 1; c < fanout; ++c) h.child_values[c] = -std::sqrt(m) / tail[j + 1];
        }
        out.push_back(std::move(h));
    }
    return out;
}

namespace {
HaarSystem from_basis(const MeasureTree& mu, int selector, const std::string& name,
                      std::vector<HaarFunction> (*basis)(const MeasureTree&, int,
                                                         std::uint64_t)) {
    if (selector < 0 || selector >= (1 << mu.dim) - 1)
        throw std::invalid_argument("selector out of range");
    HaarSystem s = HaarSystem::empty(mu.dim, mu.depth, name);
    for (int g = 0; g < mu.depth; ++g)
        for (std::uint64_t n = 0; n < nodes_at_gen(mu.dim, g); ++n)
            s.assign(g, n, basis(mu, g, n)[selector]);
    return s;
}
}  // namespace

HaarSystem wilson(const MeasureTree& mu, int selector) {
    return from_basis(mu, selector, "wilson", &wilson_basis);
}

HaarSystem mitrea(const MeasureTree& mu, int selector) {
    return from_basis(mu, selector, "mitrea", &mitrea_basis);
}

HaarFunction tensor_function(const std::vector<MeasureTree>& factors, int gen,
                             std::uint64_t node, const std::vector<int>& epsilon) {
    const int d = static_cast<int>(factors.size());
    HaarFunction h{d, gen, node, std::vector<double>(std::size_t{1} << d, 0.0), true};
    const CubeId q = cube_from_node(d, gen, node);
    // per-factor values on the two halves of its interval
    std::vector<double> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
        const auto& nu = factors[j];
        const std::uint64_t ij = q.coords[j];
        const double ml = nu.level[gen + 1][2 * ij];
        const double mr = nu.level[gen + 1][2 * ij + 1];
        const double mi = nu.level[gen][ij];
        if (epsilon[j]) {
            if (ml <= kMassFloor || mr <= kMassFloor || mi <= kMassFloor) return h;
            const double m = ml * mr / mi;
            lo[j] = std::sqrt(m) / ml;
            hi[j] = -std::sqrt(m) / mr;
        } else {
            if (mi <= kMassFloor) return h;
            lo[j] = hi[j] = 1.0 / std::sqrt(mi);
        }
    }
    h.is_zero = false;
    for (int c = 0; c < (1 << d); ++c) {
        double v = 1.0;
        for (int j = 0; j < d; ++j) v *= ((c >> (d - 1 - j)) & 1) ? hi[j] : lo[j];
        h.child_values[c] = v;
    }
    return h;
}

HaarSystem tensor(const std::vector<MeasureTree>& factors, const std::vector<int>& epsilon) {
    const int d = static_cast<int>(factors.size());
    if (static_cast<int>(epsilon.size()) != d) throw std::invalid_argument("epsilon size mismatch");
    bool any = false;
    for (int e : epsilon) any = any || (e != 0);
    if (!any) throw std::invalid_argument("epsilon must not be identically zero");
    const int depth = factors[0].depth;
    for (const auto& f : factors)
        if (f.dim != 1 || f.depth != depth)
            throw std::invalid_argument("tensor factors must be 1D with equal depth");
    HaarSystem s = HaarSystem::empty(d, depth, "tensor");
    for (int g = 0; g < depth; ++g)
        for (std::uint64_t n = 0; n < nodes_at_gen(d, g); ++n)
            s.assign(g, n, tensor_function(factors, g, n, epsilon));
    return s;
}

HaarSystem noncancellative_indicator(const MeasureTree& mu) {
    HaarSystem s = HaarSystem::empty(mu.dim, mu.depth, "indicator", /*cancellative=*/false);
    for (int g = 0; g < mu.depth; ++g)
        for (std::uint64_t n = 0; n < nodes_at_gen(mu.dim, g); ++n) {
            const double m = mu.level[g][n];
            if (m <= kMassFloor) continue;
            HaarFunction h{mu.dim, g, n, std::vector<double>(std::size_t{1} << mu.dim, 0.0),
                           false};
            for (int c = 0; c < (1 << mu.dim); ++c)
                if (mu.level[g + 1][(n << mu.dim) + static_cast<std::uint64_t>(c)] > kMassFloor)
                    h.child_values[c] = 1.0 / std::sqrt(m);
            s.assign(g, n, h);
        }
    return s;
}

HaarSystem custom_system(const MeasureTree& mu,
                         const std::vector<std::pair<CubeId, std::vector<double>>>& entries,
                         bool cancellative) {
    HaarSystem s = HaarSystem::empty(mu.dim, mu.depth, "custom", cancellative);
    for (const auto& [q, cv] : entries) {
        if (q.gen >= mu.depth) throw std::invalid_argument("custom entry below depth");
        if (cv.size() != (std::size_t{1} << mu.dim))
            throw std::invalid_argument("custom entry child-value count mismatch");
        HaarFunction h{mu.dim, q.gen, node_index(q), cv, false};
        bool allzero = true;
        for (double v : cv) allzero = allzero && v == 0.0;
        h.is_zero = allzero;
        s.assign(q.gen, h.node, h);
    }
    auto rep = validate(s, mu);
    if (!rep.ok)
        throw std::invalid_argument("custom system validation failed at cube " +
                                    to_address(rep.issues.front().cube) + ": " +
                                    rep.issues.front().what);
    return s;
}

ValidationReport validate(const HaarSystem& sys, const MeasureTree& mu) {
    ValidationReport rep;
    for (int g = 0; g < sys.depth; ++g) {
        for (std::uint64_t n = 0; n < sys.zero[g].size(); ++n) {
            if (sys.zero[g][n]) continue;
            const HaarFunction h = sys.function_at(g, n);
            const double sup = linf_norm(h, mu);
            for (int c = 0; c < (1 << sys.dim); ++c)
                if (child_mass(mu, h, c) <= kMassFloor && h.child_values[c] != 0.0) {
                    rep.ok = false;
                    rep.issues.push_back({h.cube(), "nonzero value on zero-mass child"});
                }
            const double l2 = l2_norm(h, mu);
            if (std::abs(l2 - 1.0) > 1e-10) {
                rep.ok = false;
                rep.issues.push_back({h.cube(), "L2 norm is " + std::to_string(l2)});
            }
            if (sys.cancellative) {
                const double mean = integral(h, mu);
                if (std::abs(mean) > 1e-12 * std::max(sup * mu.level[g][n], 1e-300)) {
                    rep.ok = false;
                    rep.issues.push_back({h.cube(), "nonzero mean"});
                }
            }
        }
    }
    return rep;
}

double standardness(const HaarSystem& sys, const MeasureTree& mu, int upto_gen) {
    double best = 0;
    const int top = std::min(upto_gen, sys.depth - 1);
    for (int g = 0; g <= top; ++g)
        for (std::uint64_t n = 0; n < sys.zero[g].size(); ++n)
            if (!sys.zero[g][n]) {
                const HaarFunction h = sys.function_at(g, n);
                best = std::max(best, l1_norm(h, mu) * linf_norm(h, mu));
            }
    return best;
}

double xi(const HaarSystem& phi, const HaarSystem& psi, const MeasureTree& mu, int r, int s,
          int upto_gen) {
    if (r < 0 || s < 0) throw std::invalid_argument("r,s must be nonnegative");
    const int d = mu.dim;
    double best = 0;
    const int top = std::min({upto_gen, phi.depth - 1 - r, psi.depth - 1 - s});
    for (int g = 0; g <= top; ++g) {
        for (std::uint64_t n = 0; n < nodes_at_gen(d, g); ++n) {
            double max_inf = 0, max_l1 = 0;
            for (std::uint64_t R = n << (d * r); R < (n + 1) << (d * r); ++R)
                if (phi.in_domain(g + r, R))
                    max_inf = std::max(max_inf, linf_norm(phi.function_at(g + r, R), mu));
            if (max_inf == 0) continue;
            for (std::uint64_t S = n << (d * s); S < (n + 1) << (d * s); ++S)
                if (psi.in_domain(g + s, S))
                    max_l1 = std::max(max_l1, l1_norm(psi.function_at(g + s, S), mu));
            best = std::max(best, max_inf * max_l1);
        }
    }
    return best;
}

}  // namespace haarlab
