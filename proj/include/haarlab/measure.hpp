#pragma once

#include <map>
#include <string>
#include <vector>

#include "haarlab/grid.hpp"

namespace haarlab {

// Finite-depth dyadic measure: a nonnegative mass for every cube of
// generation <= depth, additive across children. Storage is dense per
// generation, indexed by node_index (root-to-cube path bits).
struct MeasureTree {
    int dim = 1;
    int depth = 0;
    double root_volume = 1.0;
    std::vector<std::vector<double>> level;  // level[k] has 2^(k*dim) masses

    double mass(int gen, std::uint64_t node) const { return level[gen][node]; }
    double mass(const CubeId& q) const { return level[q.gen][node_index(q)]; }
    double total() const { return level[0][0]; }
    // Lebesgue volume of a generation-k cube.
    double cube_volume(int gen) const;
};

// Checks child-sum additivity at every internal node (relative tolerance).
bool check_additivity(const MeasureTree& mu, double rel_tol = 1e-12);

MeasureTree build_lebesgue(int dim, int depth, double root_volume = 1.0);

// Asymmetric split measures on [0,1): mass splits at the chain I_k = [0,2^-k)
// with fractions a_k = 1 - b_k going left, and uniformly below each right
// sibling I_k^b. a_1 = 1/2 always.
struct SplitSequenceSpec {
    enum class Kind { explicit_list, formula_a, formula_b, formula_c, formula_d };
    Kind kind = Kind::explicit_list;
    std::vector<double> b;  // b_1..b_N for explicit_list (b_1 must be 1/2)
    int depth = 0;
};

// The b_k values (k = 1..depth) this spec expands to.
std::vector<double> split_fractions(const SplitSequenceSpec& spec);
MeasureTree build_split_measure(const SplitSequenceSpec& spec);

// 2D measure on a dyadic root containing the unit blocks Q_k = [k,k+1)^2 for
// 2 <= k <= K, with prescribed quadrant masses inside each block and Lebesgue
// proportions elsewhere; total mass normalized to 1. The root is [0,2^g)^2
// with g = ceil(log2(K+1)), so each block is a generation-g cube.
MeasureTree build_r2_nonstandard(int K, int depth);

// Generation of the unit blocks inside build_r2_nonstandard's root.
int r2_block_gen(int K);
// Cube [k,k+1)^2 inside build_r2_nonstandard's root.
CubeId r2_block(int K, int k);

MeasureTree build_product(const std::vector<MeasureTree>& factors);

// m(I) = mu(I_-) mu(I_+) / mu(I); 0 when mu(I) = 0. d=1, gen < depth.
double m_value(const MeasureTree& mu, int gen, std::uint64_t node);
double m_value(const MeasureTree& mu, const CubeId& q);

struct DiagnosticsReport {
    int upto_gen = 0;
    // Per-generation maxima; index g describes pairs (I at gen g, parent).
    // m-ratios are d=1 only (empty otherwise) and skip pairs with zero m.
    std::vector<double> inc_by_gen;   // max m(I)/m(parent)
    std::vector<double> dec_by_gen;   // max m(parent)/m(I)
    std::vector<double> doub_by_gen;  // max mu(parent)/mu(child), mu(child)>0
    double C_inc = 0, C_dec = 0, C_doub = 0;  // overall maxima
    bool degenerate_child = false;  // zero-mass child inside positive parent
    // growth[t][g] = max over gen-g cubes of mu(Q)/|Q|^t.
    std::map<double, std::vector<double>> growth;
};

DiagnosticsReport diagnostics(const MeasureTree& mu, int upto_gen,
                              const std::vector<double>& growth_exponents = {});

}  // namespace haarlab
