#pragma once

#include <string>
#include <vector>

#include "haarlab/func.hpp"
#include "haarlab/grid.hpp"
#include "haarlab/measure.hpp"

namespace haarlab {

// Masses below this threshold are treated as zero when they appear in a
// denominator (mirrors the mu(Q) = 0 conventions without overflow).
inline constexpr double kMassFloor = 1e-300;

// A function supported on one cube and constant on its children, stored by
// its 2^d child values.
struct HaarFunction {
    int dim = 1;
    int gen = 0;
    std::uint64_t node = 0;
    std::vector<double> child_values;  // size 2^dim; zero on zero-mass children
    bool is_zero = true;

    CubeId cube() const { return cube_from_node(dim, gen, node); }
};

double l1_norm(const HaarFunction& h, const MeasureTree& mu);
double l2_norm(const HaarFunction& h, const MeasureTree& mu);
double linf_norm(const HaarFunction& h, const MeasureTree& mu);
double lp_norm(const HaarFunction& h, double p, const MeasureTree& mu);
double integral(const HaarFunction& h, const MeasureTree& mu);
double inner_product(const HaarFunction& a, const HaarFunction& b, const MeasureTree& mu);
SimpleFunction to_simple(const HaarFunction& h, int resolution);

// One function per cube of generation < depth. D_Phi = cubes whose function
// is not identically zero.
struct HaarSystem {
    int dim = 1;
    int depth = 0;  // functions exist for gen = 0..depth-1
    bool cancellative = true;
    std::string builder;
    std::vector<std::vector<double>> vals;    // [gen], 2^(gen*dim) * 2^dim child values
    std::vector<std::vector<unsigned char>> zero;  // [gen], per-node is_zero flag

    static HaarSystem empty(int dim, int depth, const std::string& builder,
                            bool cancellative = true);
    bool in_domain(int gen, std::uint64_t node) const {
        return gen >= 0 && gen < depth && !zero[gen][node];
    }
    double child_value(int gen, std::uint64_t node, int c) const {
        return vals[gen][(node << dim) + static_cast<std::uint64_t>(c)];
    }
    HaarFunction function_at(int gen, std::uint64_t node) const;
    HaarFunction function_at(const CubeId& q) const { return function_at(q.gen, node_index(q)); }
    void assign(int gen, std::uint64_t node, const HaarFunction& h);
};

// The standard Haar function h_I = sqrt(m(I)) (1_{I-}/mu(I-) - 1_{I+}/mu(I+)),
// zero when either child has zero mass. d=1.
HaarSystem canonical_1d(const MeasureTree& mu);
HaarFunction canonical_1d_function(const MeasureTree& mu, int gen, std::uint64_t node);

// Per-cube orthonormal bases of the mean-zero child-constant space
// (2^d - 1 functions, some possibly zero when masses vanish).
std::vector<HaarFunction> wilson_basis(const MeasureTree& mu, int gen, std::uint64_t node);
std::vector<HaarFunction> mitrea_basis(const MeasureTree& mu, int gen, std::uint64_t node);
// selector picks the same basis-function index at every cube.
HaarSystem wilson(const MeasureTree& mu, int selector = 0);
HaarSystem mitrea(const MeasureTree& mu, int selector = 0);

// Tensor-product system over a product measure: per cube and epsilon in
// {0,1}^d \ {0}, the product of 1D Haar (epsilon_j = 1) and normalized
// indicator (epsilon_j = 0) factors.
HaarFunction tensor_function(const std::vector<MeasureTree>& factors, int gen,
                             std::uint64_t node, const std::vector<int>& epsilon);
HaarSystem tensor(const std::vector<MeasureTree>& factors, const std::vector<int>& epsilon);

// Non-cancellative system 1_Q / sqrt(mu(Q)).
HaarSystem noncancellative_indicator(const MeasureTree& mu);

struct ValidationIssue {
    CubeId cube;
    std::string what;
};
struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;
};

// System from explicit per-cube child values; cubes not supplied get the zero
// function. validate() checks support/normalization/cancellation conventions.
HaarSystem custom_system(const MeasureTree& mu,
                         const std::vector<std::pair<CubeId, std::vector<double>>>& entries,
                         bool cancellative = true);
ValidationReport validate(const HaarSystem& sys, const MeasureTree& mu);

// sup over Q in D_Phi with gen <= upto_gen of ||phi_Q||_1 ||phi_Q||_inf.
double standardness(const HaarSystem& sys, const MeasureTree& mu, int upto_gen);

// Xi(Phi,Psi;r,s): sup over cubes Q (gen <= upto_gen) and R in D_r(Q) cap
// D_Phi, S in D_s(Q) cap D_Psi of ||phi_R||_inf ||psi_S||_1.
double xi(const HaarSystem& phi, const HaarSystem& psi, const MeasureTree& mu, int r, int s,
          int upto_gen);

}  // namespace haarlab
