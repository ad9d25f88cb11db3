#include "haarlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace haarlab {

double MeasureTree::cube_volume(int gen) const {
    return root_volume * std::ldexp(1.0, -dim * gen);
}

bool check_additivity(const MeasureTree& mu, double rel_tol) {
    const int fanout = 1 << mu.dim;
    for (int k = 0; k < mu.depth; ++k) {
        for (std::uint64_t n = 0; n < mu.level[k].size(); ++n) {
            double sum = 0;
            for (int c = 0; c < fanout; ++c) sum += mu.level[k + 1][(n << mu.dim) + c];
            double ref = std::max(std::abs(mu.level[k][n]), std::abs(sum));
            if (std::abs(sum - mu.level[k][n]) > rel_tol * std::max(ref, 1e-300))
                if (ref > 0) return false;
        }
    }
    return true;
}

namespace {
std::vector<std::vector<double>> allocate_levels(int dim, int depth) {
    std::vector<std::vector<double>> lv(depth + 1);
    for (int k = 0; k <= depth; ++k) lv[k].assign(nodes_at_gen(dim, k), 0.0);
    return lv;
}
}  // namespace

MeasureTree build_lebesgue(int dim, int depth, double root_volume) {
    if (dim < 1 || depth < 0 || root_volume <= 0)
        throw std::invalid_argument("bad lebesgue parameters");
    if (dim * depth > 40) throw std::invalid_argument("depth too large for dense storage");
    MeasureTree mu{dim, depth, root_volume, allocate_levels(dim, depth)};
    for (int k = 0; k <= depth; ++k) {
        const double m = root_volume * std::ldexp(1.0, -dim * k);
        std::fill(mu.level[k].begin(), mu.level[k].end(), m);
    }
    return mu;
}

std::vector<double> split_fractions(const SplitSequenceSpec& spec) {
    if (spec.depth < 1) throw std::invalid_argument("split measure needs depth >= 1");
    std::vector<double> b(spec.depth + 1, 0.0);  // b[k], k = 1..depth
    using K = SplitSequenceSpec::Kind;
    switch (spec.kind) {
        case K::explicit_list:
            if (static_cast<int>(spec.b.size()) < spec.depth)
                throw std::invalid_argument("explicit split list shorter than depth");
            for (int k = 1; k <= spec.depth; ++k) b[k] = spec.b[k - 1];
            break;
        case K::formula_a:
            for (int k = 2; k <= spec.depth; ++k) b[k] = 1.0 / k;
            break;
        case K::formula_b:
            for (int k = 2; k <= spec.depth; ++k) b[k] = std::ldexp(1.0, -k * k);
            break;
        case K::formula_c:
            for (int k = 2; k <= spec.depth; ++k) {
                int n = 2;
                while (n * (n + 1) / 2 < k) ++n;  // smallest n with k <= f(n)
                int f_prev = (n - 1) * n / 2;
                b[k] = 0.5 / (k - f_prev);
            }
            break;
        case K::formula_d:
            for (int k = 2; k <= spec.depth; ++k) {
                if (k <= 3)
                    b[k] = 0.5;
                else if (k % 2 == 0)
                    b[k] = 1.0 / (k / 2);
                else
                    b[k] = 1.0 - 1.0 / ((k - 1) / 2);
            }
            break;
    }
    b[1] = (spec.kind == K::explicit_list) ? b[1] : 0.5;
    for (int k = 1; k <= spec.depth; ++k)
        if (!(b[k] > 0.0 && b[k] < 1.0))
            throw std::invalid_argument("split fraction b_k out of (0,1) at k=" + std::to_string(k));
    if (b[1] != 0.5) throw std::invalid_argument("a_1 must be 1/2");
    return b;
}

MeasureTree build_split_measure(const SplitSequenceSpec& spec) {
    auto b = split_fractions(spec);
    if (spec.depth > 40) throw std::invalid_argument("depth too large for dense storage");
    MeasureTree mu{1, spec.depth, 1.0, allocate_levels(1, spec.depth)};
    mu.level[0][0] = 1.0;
    for (int k = 1; k <= spec.depth; ++k) {
        mu.level[k][0] = (1.0 - b[k]) * mu.level[k - 1][0];
        mu.level[k][1] = b[k] * mu.level[k - 1][0];
        for (std::uint64_t n = 2; n < mu.level[k].size(); ++n)
            mu.level[k][n] = 0.5 * mu.level[k - 1][n >> 1];
    }
    return mu;
}

int r2_block_gen(int K) {
    int g = 0;
    while ((1 << g) < K + 1) ++g;
    return g;
}

CubeId r2_block(int K, int k) {
    int g = r2_block_gen(K);
    return CubeId{2, g, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(k)}};
}

MeasureTree build_r2_nonstandard(int K, int depth) {
    if (K < 2) throw std::invalid_argument("K must be at least 2");
    const int g = r2_block_gen(K);
    if (depth < g + 1) throw std::invalid_argument("depth must cover the block children");
    if (2 * depth > 40) throw std::invalid_argument("depth too large for dense storage");

    MeasureTree mu{2, depth, 1.0, allocate_levels(2, depth)};
    const double total = std::ldexp(1.0, 2 * g);  // one unit of mass per unit cell
    // Uniform down to the block generation.
    for (int k = 0; k <= g; ++k) {
        const double m = std::ldexp(1.0, 2 * (g - k)) / total;
        std::fill(mu.level[k].begin(), mu.level[k].end(), m);
    }
    for (int k = g + 1; k <= depth; ++k)
        for (std::uint64_t n = 0; n < mu.level[k].size(); ++n)
            mu.level[k][n] = 0.25 * mu.level[k - 1][n >> 2];
    // Redistribute the first split below each block Q_k = [k,k+1)^2.
    for (int k = 2; k <= K; ++k) {
        const std::uint64_t bn = node_index(r2_block(K, k));
        const double mQ = mu.level[g][bn];
        const double kk = static_cast<double>(k) * k;
        const double frac[4] = {1.0 / kk, 1.0 / kk, (kk - 2.0) / (2.0 * kk),
                                (kk - 2.0) / (2.0 * kk)};
        for (int c = 0; c < 4; ++c) {
            const std::uint64_t cn = (bn << 2) + static_cast<std::uint64_t>(c);
            mu.level[g + 1][cn] = frac[c] * mQ;
            // Uniform proportions below each block child.
            for (int j = g + 2; j <= depth; ++j) {
                const std::uint64_t lo = cn << (2 * (j - g - 1));
                const std::uint64_t hi = (cn + 1) << (2 * (j - g - 1));
                const double m = frac[c] * mQ / std::ldexp(1.0, 2 * (j - g - 1));
                for (std::uint64_t n = lo; n < hi; ++n) mu.level[j][n] = m;
            }
        }
    }
    return mu;
}

MeasureTree build_product(const std::vector<MeasureTree>& factors) {
    if (factors.empty()) throw std::invalid_argument("empty factor list");
    const int depth = factors[0].depth;
    const int d = static_cast<int>(factors.size());
    double vol = 1.0;
    for (const auto& f : factors) {
        if (f.dim != 1) throw std::invalid_argument("product factors must be 1D");
        if (f.depth != depth) throw std::invalid_argument("factor depth mismatch");
        vol *= f.root_volume;
    }
    if (d * depth > 40) throw std::invalid_argument("depth too large for dense storage");
    MeasureTree mu{d, depth, vol, allocate_levels(d, depth)};
    for (int k = 0; k <= depth; ++k) {
        for (std::uint64_t n = 0; n < mu.level[k].size(); ++n) {
            CubeId q = cube_from_node(d, k, n);
            double m = 1.0;
            for (int j = 0; j < d; ++j) m *= factors[j].level[k][q.coords[j]];
            mu.level[k][n] = m;
        }
    }
    return mu;
}

double m_value(const MeasureTree& mu, int gen, std::uint64_t node) {
    if (mu.dim != 1) throw std::invalid_argument("m_value requires d=1");
    if (gen < 0 || gen >= mu.depth) throw std::out_of_range("m_value needs gen < depth");
    const double mI = mu.level[gen][node];
    if (mI <= 0) return 0.0;
    return mu.level[gen + 1][2 * node] * mu.level[gen + 1][2 * node + 1] / mI;
}

double m_value(const MeasureTree& mu, const CubeId& q) {
    return m_value(mu, q.gen, node_index(q));
}

DiagnosticsReport diagnostics(const MeasureTree& mu, int upto_gen,
                              const std::vector<double>& growth_exponents) {
    if (upto_gen >= mu.depth) throw std::invalid_argument("upto_gen must be < depth");
    DiagnosticsReport rep;
    rep.upto_gen = upto_gen;
    rep.doub_by_gen.assign(upto_gen + 1, 0.0);
    const int fanout = 1 << mu.dim;
    for (int g = 1; g <= upto_gen; ++g) {
        double worst = 0;
        for (std::uint64_t p = 0; p < mu.level[g - 1].size(); ++p) {
            const double mp = mu.level[g - 1][p];
            if (mp <= 0) continue;
            for (int c = 0; c < fanout; ++c) {
                const double mc = mu.level[g][(p << mu.dim) + c];
                if (mc > 0)
                    worst = std::max(worst, mp / mc);
                else
                    rep.degenerate_child = true;
            }
        }
        rep.doub_by_gen[g] = worst;
        rep.C_doub = std::max(rep.C_doub, worst);
    }
    if (mu.dim == 1) {
        rep.inc_by_gen.assign(upto_gen + 1, 0.0);
        rep.dec_by_gen.assign(upto_gen + 1, 0.0);
        const int top = std::min(upto_gen, mu.depth - 1);
        for (int g = 1; g <= top; ++g) {
            double inc = 0, dec = 0;
            for (std::uint64_t n = 0; n < mu.level[g].size(); ++n) {
                const double mi = m_value(mu, g, n);
                const double mparent = m_value(mu, g - 1, n >> 1);
                if (mi > 0 && mparent > 0) {
                    inc = std::max(inc, mi / mparent);
                    dec = std::max(dec, mparent / mi);
                }
            }
            rep.inc_by_gen[g] = inc;
            rep.dec_by_gen[g] = dec;
            rep.C_inc = std::max(rep.C_inc, inc);
            rep.C_dec = std::max(rep.C_dec, dec);
        }
    }
    for (double t : growth_exponents) {
        auto& prof = rep.growth[t];
        prof.assign(upto_gen + 1, 0.0);
        for (int g = 0; g <= upto_gen; ++g) {
            const double vol = mu.cube_volume(g);
            double worst = 0;
            for (double m : mu.level[g]) worst = std::max(worst, m / std::pow(vol, t));
            prof[g] = worst;
        }
    }
    return rep;
}

}  // namespace haarlab
