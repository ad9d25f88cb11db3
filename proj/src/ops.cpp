#include "haarlab/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace haarlab {

namespace {

// Per-cube constant contributions, materialized by a downward prefix sweep.
struct Accumulator {
    int dim;
    std::vector<std::vector<double>> acc;  // acc[g][node]

    Accumulator(int dim_, int top_gen) : dim(dim_), acc(top_gen + 1) {
        for (int g = 0; g <= top_gen; ++g) acc[g].assign(nodes_at_gen(dim_, g), 0.0);
    }
    void add(int g, std::uint64_t node, double v) { acc[g][node] += v; }
    int top() const { return static_cast<int>(acc.size()) - 1; }

    SimpleFunction materialize(int resolution) {
        for (int g = 1; g <= top(); ++g)
            for (std::uint64_t n = 0; n < acc[g].size(); ++n) acc[g][n] += acc[g - 1][n >> dim];
        SimpleFunction out = SimpleFunction::zero(dim, resolution);
        if (resolution >= top()) {
            const int shift = dim * (resolution - top());
            for (std::uint64_t n = 0; n < out.values.size(); ++n)
                out.values[n] = acc[top()][n >> shift];
        } else {
            throw std::invalid_argument("materialize resolution too coarse");
        }
        return out;
    }
};

double avg_at(const IntegralTree& t, const MeasureTree& mu, int g, std::uint64_t n) {
    const double m = mu.level[g][n];
    return m > 0 ? t.at(g, n) / m : 0.0;
}

// <f, phi> using a precomputed integral tree of f (depth = f.resolution).
double pair_haar(const SimpleFunction& f, const IntegralTree& t, const HaarSystem& sys,
                 const MeasureTree& mu, int g, std::uint64_t n) {
    if (!sys.in_domain(g, n)) return 0.0;
    const int d = sys.dim;
    double s = 0;
    if (g + 1 <= f.resolution) {
        for (int c = 0; c < (1 << d); ++c) {
            const double v = sys.child_value(g, n, c);
            if (v != 0) s += v * t.at(g + 1, (n << d) + static_cast<std::uint64_t>(c));
        }
    } else {
        // f is constant on the cube
        const double fv = f.values[n >> (d * (g - f.resolution))];
        if (fv != 0)
            for (int c = 0; c < (1 << d); ++c)
                s += fv * sys.child_value(g, n, c) *
                     mu.level[g + 1][(n << d) + static_cast<std::uint64_t>(c)];
    }
    return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

SimpleFunction maximal(const SimpleFunction& f, const MeasureTree& mu) {
    const auto t = abs_integrals(f, mu);
    const int M = f.resolution;
    std::vector<std::vector<double>> best(M + 1);
    for (int g = 0; g <= M; ++g) {
        best[g].assign(nodes_at_gen(f.dim, g), 0.0);
        for (std::uint64_t n = 0; n < best[g].size(); ++n) {
            double a = avg_at(t, mu, g, n);
            if (g > 0) a = std::max(a, best[g - 1][n >> f.dim]);
            best[g][n] = a;
        }
    }
    SimpleFunction out{f.dim, M, std::move(best[M])};
    return out;
}

SimpleFunction expectation(const SimpleFunction& f, int k, const MeasureTree& mu) {
    if (k < 0) throw std::invalid_argument("k must be nonnegative");
    if (k >= f.resolution) return f;
    const auto t = integrals(f, mu);
    SimpleFunction out = SimpleFunction::zero(f.dim, k);
    for (std::uint64_t n = 0; n < out.values.size(); ++n) out.values[n] = avg_at(t, mu, k, n);
    return out;
}

SimpleFunction difference(const SimpleFunction& f, int k, const MeasureTree& mu) {
    if (k == 0) return expectation(f, 0, mu);
    return expectation(f, k, mu) - expectation(f, k - 1, mu);
}

SimpleFunction difference_at(const SimpleFunction& f, const CubeId& q, const MeasureTree& mu) {
    const int d = f.dim;
    const int res = std::max(q.gen + 1, 0);
    SimpleFunction out = SimpleFunction::zero(d, std::max(res, 0));
    const auto t = integrals(refine(f, std::max(f.resolution, q.gen + 1)), mu);
    const std::uint64_t n = node_index(q);
    const double aq = avg_at(t, mu, q.gen, n);
    for (int c = 0; c < (1 << d); ++c) {
        const std::uint64_t cn = (n << d) + static_cast<std::uint64_t>(c);
        out.values[cn] = avg_at(t, mu, q.gen + 1, cn) - aq;
    }
    return out;
}

SimpleFunction square_function(const SimpleFunction& f, const MeasureTree& mu) {
    const auto t = integrals(f, mu);
    const int M = f.resolution;
    std::vector<std::vector<double>> sq(M + 1);
    for (int g = 0; g <= M; ++g) {
        sq[g].assign(nodes_at_gen(f.dim, g), 0.0);
        for (std::uint64_t n = 0; n < sq[g].size(); ++n) {
            double s = (g > 0) ? sq[g - 1][n >> f.dim] : 0.0;
            if (g > 0) {
                const double diff = avg_at(t, mu, g, n) - avg_at(t, mu, g - 1, n >> f.dim);
                s += diff * diff;
            }
            sq[g][n] = s;
        }
    }
    SimpleFunction out{f.dim, M, std::move(sq[M])};
    for (auto& v : out.values) v = std::sqrt(v);
    return out;
}

double ShiftCoefficients::alpha(int genQ, std::uint64_t nodeQ, std::uint64_t nodeR,
                                std::uint64_t nodeS) const {
    switch (source) {
        case Source::constant:
            return constant_value;
        case Source::signs: {
            std::uint64_t h = seed;
            h = splitmix64(h ^ static_cast<std::uint64_t>(genQ));
            h = splitmix64(h ^ nodeQ);
            h = splitmix64(h ^ nodeR);
            h = splitmix64(h ^ nodeS);
            return (h & 1) ? 1.0 : -1.0;
        }
        case Source::explicit_map: {
            auto it = entries.find({genQ, nodeQ, nodeR, nodeS});
            return it == entries.end() ? 0.0 : it->second;
        }
        case Source::hilbert:
            if (nodeR != nodeQ) return 0.0;
            return (nodeS == 2 * nodeQ) ? 1.0 : ((nodeS == 2 * nodeQ + 1) ? -1.0 : 0.0);
        case Source::hilbert_adjoint:
            if (nodeS != nodeQ) return 0.0;
            return (nodeR == 2 * nodeQ) ? 1.0 : ((nodeR == 2 * nodeQ + 1) ? -1.0 : 0.0);
    }
    return 0.0;
}

ShiftCoefficients ShiftCoefficients::constant(int r, int s, double value) {
    ShiftCoefficients c;
    c.r = r;
    c.s = s;
    c.source = Source::constant;
    c.constant_value = value;
    c.bound = std::abs(value);
    c.lower_bound = std::abs(value);
    return c;
}

ShiftCoefficients ShiftCoefficients::signs(int r, int s, std::uint64_t seed) {
    ShiftCoefficients c;
    c.r = r;
    c.s = s;
    c.source = Source::signs;
    c.seed = seed;
    c.bound = 1.0;
    c.lower_bound = 1.0;
    return c;
}

ShiftCoefficients ShiftCoefficients::hilbert() {
    ShiftCoefficients c;
    c.r = 0;
    c.s = 1;
    c.source = Source::hilbert;
    c.bound = 1.0;
    c.lower_bound = 1.0;
    return c;
}

ShiftCoefficients ShiftCoefficients::hilbert_adjoint() {
    ShiftCoefficients c;
    c.r = 1;
    c.s = 0;
    c.source = Source::hilbert_adjoint;
    c.bound = 1.0;
    c.lower_bound = 1.0;
    return c;
}

namespace {
SimpleFunction shift_impl(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                          const HaarSystem& psi, const SimpleFunction& f, const MeasureTree& mu,
                          int gen0, std::uint64_t node0) {
    const int d = mu.dim;
    const int r = coeffs.r, s = coeffs.s;
    if (r < 0 || s < 0) throw std::invalid_argument("complexity must be nonnegative");
    const int topQ = std::min(phi.depth - 1 - r, psi.depth - 1 - s);
    if (topQ + s + 1 > mu.depth) throw std::out_of_range("depth overflow");
    const auto t = integrals(f, mu);
    const int out_res = std::max(f.resolution, topQ + s + 1);
    Accumulator acc(d, topQ + s + 1);
    for (int g = std::max(gen0, 0); g <= topQ; ++g) {
        const std::uint64_t lo = node0 << (d * (g - gen0));
        const std::uint64_t hi = (node0 + 1) << (d * (g - gen0));
        for (std::uint64_t q = lo; q < hi; ++q) {
            // pairings with phi over D_r(Q)
            for (std::uint64_t R = q << (d * r); R < (q + 1) << (d * r); ++R) {
                if (!phi.in_domain(g + r, R)) continue;
                const double fr = pair_haar(f, t, phi, mu, g + r, R);
                if (fr == 0) continue;
                for (std::uint64_t S = q << (d * s); S < (q + 1) << (d * s); ++S) {
                    if (!psi.in_domain(g + s, S)) continue;
                    const double a = coeffs.alpha(g, q, R, S);
                    if (a == 0) continue;
                    const double c = a * fr;
                    for (int ch = 0; ch < (1 << d); ++ch) {
                        const double v = psi.child_value(g + s, S, ch);
                        if (v != 0)
                            acc.add(g + s + 1, (S << d) + static_cast<std::uint64_t>(ch), c * v);
                    }
                }
            }
        }
    }
    return acc.materialize(out_res);
}
}  // namespace

SimpleFunction haar_shift(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                          const HaarSystem& psi, const SimpleFunction& f, const MeasureTree& mu) {
    return shift_impl(coeffs, phi, psi, f, mu, 0, 0);
}

SimpleFunction haar_shift_truncated(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                                    const HaarSystem& psi, const SimpleFunction& f,
                                    const MeasureTree& mu, const CubeId& q0) {
    return shift_impl(coeffs, phi, psi, f, mu, q0.gen, node_index(q0));
}

namespace {
// ||Sh^{q0} 1_{q0}||_2 computed on the subtree of q0 only.
double truncated_on_indicator_l2(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                                 const HaarSystem& psi, const MeasureTree& mu, int g0,
                                 std::uint64_t n0) {
    const int d = mu.dim;
    const int r = coeffs.r, s = coeffs.s;
    const int topQ = std::min(phi.depth - 1 - r, psi.depth - 1 - s);
    if (topQ < g0) return 0.0;
    const int local_top = topQ + s + 1 - g0;  // relative depth of output constants
    std::vector<std::vector<double>> acc(local_top + 1);
    for (int k = 0; k <= local_top; ++k) acc[k].assign(nodes_at_gen(d, k), 0.0);
    for (int g = g0; g <= topQ; ++g) {
        const std::uint64_t lo = n0 << (d * (g - g0));
        const std::uint64_t hi = (n0 + 1) << (d * (g - g0));
        for (std::uint64_t q = lo; q < hi; ++q) {
            for (std::uint64_t R = q << (d * r); R < (q + 1) << (d * r); ++R) {
                if (!phi.in_domain(g + r, R)) continue;
                const double fr = integral(phi.function_at(g + r, R), mu);
                if (fr == 0) continue;
                for (std::uint64_t S = q << (d * s); S < (q + 1) << (d * s); ++S) {
                    if (!psi.in_domain(g + s, S)) continue;
                    const double a = coeffs.alpha(g, q, R, S);
                    if (a == 0) continue;
                    const double c = a * fr;
                    const int rel = g + s + 1 - g0;
                    const std::uint64_t S_under_q0 = S - (n0 << (d * (g + s - g0)));
                    for (int ch = 0; ch < (1 << d); ++ch) {
                        const double v = psi.child_value(g + s, S, ch);
                        if (v != 0)
                            acc[rel][(S_under_q0 << d) + static_cast<std::uint64_t>(ch)] += c * v;
                    }
                }
            }
        }
    }
    for (int k = 1; k <= local_top; ++k)
        for (std::uint64_t n = 0; n < acc[k].size(); ++n) acc[k][n] += acc[k - 1][n >> d];
    const int abs_gen = g0 + local_top;
    double sum = 0;
    const std::uint64_t base = n0 << (d * local_top);
    for (std::uint64_t n = 0; n < acc[local_top].size(); ++n) {
        const double v = acc[local_top][n];
        if (v != 0) sum += v * v * mu.level[abs_gen][base + n];
    }
    return std::sqrt(sum);
}
}  // namespace

double local_l2_constant(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                         const HaarSystem& psi, const MeasureTree& mu, int upto_gen) {
    double best = 0;
    for (int g = 0; g <= upto_gen; ++g) {
        for (std::uint64_t n = 0; n < nodes_at_gen(mu.dim, g); ++n) {
            const double m = mu.level[g][n];
            if (m <= 0) continue;
            best = std::max(best,
                            truncated_on_indicator_l2(coeffs, phi, psi, mu, g, n) / std::sqrt(m));
        }
    }
    return best;
}

double paraproduct_local_l2_constant(const CoefficientSequence& gamma, const HaarSystem& psi,
                                     const MeasureTree& mu, int upto_gen) {
    const int d = mu.dim;
    const int topQ = std::min(psi.depth, gamma.depth) - 1;
    double best = 0;
    for (int g0 = 0; g0 <= upto_gen; ++g0) {
        for (std::uint64_t n0 = 0; n0 < nodes_at_gen(d, g0); ++n0) {
            const double m0 = mu.level[g0][n0];
            if (m0 <= 0) continue;
            const int local_top = topQ + 1 - g0;
            if (local_top < 1) continue;
            std::vector<std::vector<double>> acc(local_top + 1);
            for (int k = 0; k <= local_top; ++k) acc[k].assign(nodes_at_gen(d, k), 0.0);
            for (int g = g0; g <= topQ; ++g) {
                if (gamma.level[g].empty()) continue;
                const std::uint64_t lo = n0 << (d * (g - g0));
                const std::uint64_t hi = (n0 + 1) << (d * (g - g0));
                for (std::uint64_t q = lo; q < hi; ++q) {
                    const double gq = gamma.level[g][q];
                    if (gq == 0 || !psi.in_domain(g, q)) continue;
                    // <1_{q0}>_Q = 1 on positive-mass Q inside q0
                    for (int ch = 0; ch < (1 << d); ++ch) {
                        const double v = psi.child_value(g, q, ch);
                        if (v != 0)
                            acc[g + 1 - g0][((q - lo) << d) + static_cast<std::uint64_t>(ch)] +=
                                gq * v;
                    }
                }
            }
            for (int k = 1; k <= local_top; ++k)
                for (std::uint64_t n = 0; n < acc[k].size(); ++n) acc[k][n] += acc[k - 1][n >> d];
            const std::uint64_t base = n0 << (d * local_top);
            double sum = 0;
            for (std::uint64_t n = 0; n < acc[local_top].size(); ++n) {
                const double v = acc[local_top][n];
                if (v != 0) sum += v * v * mu.level[g0 + local_top][base + n];
            }
            best = std::max(best, std::sqrt(sum) / std::sqrt(m0));
        }
    }
    return best;
}

SimpleFunction martingale_transform(const MartingaleTransformSpec& spec, const SimpleFunction& f,
                                    const MeasureTree& mu) {
    const int d = mu.dim;
    const int top = std::min(f.resolution, mu.depth) - 1;
    const auto t = integrals(f, mu);
    Accumulator acc(d, top + 1);
    for (int g = 0; g <= top; ++g) {
        if (g < spec.alpha.depth && spec.alpha.level[g].empty()) continue;
        for (std::uint64_t n = 0; n < nodes_at_gen(d, g); ++n) {
            const double a = spec.alpha.get(g, n);
            if (a == 0) continue;
            for (const auto& h : wilson_basis(mu, g, n)) {
                if (h.is_zero) continue;
                double coef = 0;
                for (int c = 0; c < (1 << d); ++c)
                    if (h.child_values[c] != 0)
                        coef += h.child_values[c] * t.at(g + 1, (n << d) + c);
                if (coef == 0) continue;
                for (int c = 0; c < (1 << d); ++c)
                    if (h.child_values[c] != 0)
                        acc.add(g + 1, (n << d) + static_cast<std::uint64_t>(c),
                                a * coef * h.child_values[c]);
            }
        }
    }
    return acc.materialize(f.resolution);
}

SimpleFunction paraproduct(const CoefficientSequence& gamma, const HaarSystem& psi,
                           const SimpleFunction& f, const MeasureTree& mu) {
    const int d = mu.dim;
    const int top = std::min({f.resolution, psi.depth, gamma.depth}) - 1;
    const auto t = integrals(f, mu);
    Accumulator acc(d, top + 1);
    for (int g = 0; g <= top; ++g) {
        if (gamma.level[g].empty()) continue;
        for (std::uint64_t n = 0; n < nodes_at_gen(d, g); ++n) {
            const double gq = gamma.level[g][n];
            if (gq == 0 || !psi.in_domain(g, n)) continue;
            if (mu.level[g][n] <= 0)
                throw std::invalid_argument("nonzero coefficient on zero-mass cube");
            const double c = gq * avg_at(t, mu, g, n);
            if (c == 0) continue;
            for (int ch = 0; ch < (1 << d); ++ch) {
                const double v = psi.child_value(g, n, ch);
                if (v != 0) acc.add(g + 1, (n << d) + static_cast<std::uint64_t>(ch), c * v);
            }
        }
    }
    return acc.materialize(std::max(f.resolution, top + 1));
}

SimpleFunction paraproduct_adjoint(const CoefficientSequence& gamma, const HaarSystem& psi,
                                   const SimpleFunction& f, const MeasureTree& mu) {
    const int d = mu.dim;
    const int top = std::min({f.resolution, psi.depth, gamma.depth}) - 1;
    const auto t = integrals(f, mu);
    Accumulator acc(d, std::max(top + 1, f.resolution));
    for (int g = 0; g <= top; ++g) {
        if (gamma.level[g].empty()) continue;
        for (std::uint64_t n = 0; n < nodes_at_gen(d, g); ++n) {
            const double gq = gamma.level[g][n];
            if (gq == 0 || !psi.in_domain(g, n)) continue;
            const double m = mu.level[g][n];
            if (m <= 0) throw std::invalid_argument("nonzero coefficient on zero-mass cube");
            const double c = gq * pair_haar(f, t, psi, mu, g, n) / m;
            if (c != 0) acc.add(g, n, c);
        }
    }
    return acc.materialize(std::max(f.resolution, top + 1));
}

SimpleFunction adversarial_test_function(const HaarSystem& phi, const CubeId& q,
                                         const MeasureTree& mu) {
    const std::uint64_t n = node_index(q);
    if (!phi.in_domain(q.gen, n))
        throw std::invalid_argument("cube not in the system domain: " + to_address(q));
    const int d = phi.dim;
    int best_c = -1;
    double best_v = -1;
    for (int c = 0; c < (1 << d); ++c) {
        const double m = mu.level[q.gen + 1][(n << d) + static_cast<std::uint64_t>(c)];
        const double v = std::abs(phi.child_value(q.gen, n, c));
        if (m > 0 && v > best_v) {
            best_v = v;
            best_c = c;
        }
    }
    if (best_c < 0) throw std::invalid_argument("system function vanishes a.e. on the cube");
    const double sgn = phi.child_value(q.gen, n, best_c) >= 0 ? 1.0 : -1.0;
    const double m_inf = mu.level[q.gen + 1][(n << d) + static_cast<std::uint64_t>(best_c)];
    const double mq = mu.level[q.gen][n];
    SimpleFunction out = SimpleFunction::zero(d, q.gen + 1);
    for (int c = 0; c < (1 << d); ++c) {
        const std::uint64_t cn = (n << d) + static_cast<std::uint64_t>(c);
        out.values[cn] = (c == best_c) ? sgn * (1.0 / m_inf - 1.0 / mq) : -sgn / mq;
    }
    return out;
}

double weak11_ceiling(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                      const HaarSystem& psi, const MeasureTree& mu, int upto_gen) {
    const double C0 = 217.0;
    const int d = mu.dim;
    const double l2 = std::ldexp(1.0, (coeffs.r + coeffs.s) * d / 2) *
                      std::sqrt((((coeffs.r + coeffs.s) * d) % 2) ? 2.0 : 1.0) * coeffs.bound;
    const double xival = xi(phi, psi, mu, coeffs.r, coeffs.s, upto_gen);
    const double geom = std::ldexp(1.0, coeffs.s * d) *
                        (coeffs.r * std::ldexp(1.0, coeffs.r * d) + 1.0);
    return C0 * (l2 + geom * xival * coeffs.bound);
}

Weak11Report weak11_estimate(const OperatorHandle& op, const MeasureTree& mu,
                             const BatterySpec& battery, const HaarSystem* system) {
    using Kind = BatterySpec::Kind;
    const int d = mu.dim;
    const int top = (battery.upto_gen >= 0) ? battery.upto_gen : std::max(mu.depth - 2, 0);
    Weak11Report rep;
    rep.seed = battery.seed;
    rep.ratio_by_gen.assign(top + 2, 0.0);

    auto consider = [&](int gen_label, const std::string& desc, const SimpleFunction& f) {
        const double denom = lp_norm(f, 1.0, mu);
        if (denom <= 0) return;
        const double ratio = weak_l1_norm(op.apply(f), mu) / denom;
        if (gen_label <= top + 1 && ratio > rep.ratio_by_gen[gen_label])
            rep.ratio_by_gen[gen_label] = ratio;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.witness = desc;
        }
    };

    // deterministic cube selection: low-index nodes plus seeded samples
    auto cubes_at_gen = [&](int g) {
        std::vector<std::uint64_t> nodes;
        const std::uint64_t count = nodes_at_gen(d, g);
        for (std::uint64_t n = 0; n < std::min<std::uint64_t>(count, 4); ++n) nodes.push_back(n);
        std::mt19937_64 rng(splitmix64(battery.seed ^ (0x5151ULL + g)));
        for (int i = 0; i < battery.samples_per_gen && count > 4; ++i)
            nodes.push_back(4 + rng() % (count - 4));
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        return nodes;
    };

    const bool all = battery.kind == Kind::all;
    if ((all || battery.kind == Kind::haar_family) && system) {
        for (int g = 0; g <= std::min(top, system->depth - 1); ++g)
            for (auto n : cubes_at_gen(g))
                if (system->in_domain(g, n))
                    consider(g, "haar " + to_address(cube_from_node(d, g, n)),
                             to_simple(system->function_at(g, n), g + 1));
    }
    if ((all || battery.kind == Kind::adversarial_family) && system) {
        for (int g = 0; g <= std::min(top, system->depth - 1); ++g)
            for (auto n : cubes_at_gen(g))
                if (system->in_domain(g, n))
                    consider(g, "adversarial " + to_address(cube_from_node(d, g, n)),
                             adversarial_test_function(*system, cube_from_node(d, g, n), mu));
    }
    if (all || battery.kind == Kind::normalized_indicators) {
        for (int g = 0; g <= top; ++g)
            for (auto n : cubes_at_gen(g)) {
                const double m = mu.level[g][n];
                if (m > 0)
                    consider(g, "indicator " + to_address(cube_from_node(d, g, n)),
                             (1.0 / m) * SimpleFunction::indicator(cube_from_node(d, g, n),
                                                                   std::min(g + 1, mu.depth)));
            }
    }
    if (all || battery.kind == Kind::random_signs) {
        const int res = std::min(top + 1, mu.depth);
        std::mt19937_64 rng(splitmix64(battery.seed ^ 0xabcdULL));
        for (int i = 0; i < battery.random_count; ++i) {
            SimpleFunction f = SimpleFunction::zero(d, res);
            for (auto& v : f.values) v = (rng() & 1) ? 1.0 : -1.0;
            consider(res, "random_signs #" + std::to_string(i), f);
        }
    }
    return rep;
}

}  // namespace haarlab
