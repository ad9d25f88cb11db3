#pragma once

#include <vector>

#include "haarlab/grid.hpp"
#include "haarlab/measure.hpp"

namespace haarlab {

struct HaarFunction;  // haar.hpp

// Function constant on the generation-M cubes; values stored in node_index
// order (serialization converts to row-major leaf order).
struct SimpleFunction {
    int dim = 1;
    int resolution = 0;
    std::vector<double> values;  // size 2^(dim*resolution)

    static SimpleFunction zero(int dim, int resolution);
    static SimpleFunction constant(int dim, int resolution, double c);
    // 1_Q at the given resolution (resolution >= q.gen).
    static SimpleFunction indicator(const CubeId& q, int resolution);

    double value_on_leaf(std::uint64_t node) const { return values[node]; }
};

// Copies values down to a deeper resolution (norms are unchanged).
SimpleFunction refine(const SimpleFunction& f, int new_resolution);

SimpleFunction operator+(const SimpleFunction& a, const SimpleFunction& b);
SimpleFunction operator-(const SimpleFunction& a, const SimpleFunction& b);
SimpleFunction operator*(double c, const SimpleFunction& f);

// Per-cube integrals of f against mu, for all generations 0..f.resolution.
struct IntegralTree {
    std::vector<std::vector<double>> integral;  // [gen][node]
    double at(int gen, std::uint64_t node) const { return integral[gen][node]; }
};
IntegralTree integrals(const SimpleFunction& f, const MeasureTree& mu);
IntegralTree abs_integrals(const SimpleFunction& f, const MeasureTree& mu);

// <f>_Q, with the convention <f>_Q = 0 when mu(Q) = 0.
double average(const SimpleFunction& f, const CubeId& q, const MeasureTree& mu);
double average(const SimpleFunction& f, int gen, std::uint64_t node, const MeasureTree& mu);

double integral(const SimpleFunction& f, const MeasureTree& mu);
double lp_norm(const SimpleFunction& f, double p, const MeasureTree& mu);
double linf_norm(const SimpleFunction& f, const MeasureTree& mu);  // mu-essential sup
// Exact sup_v v * mu{|f| >= v} over the distinct values of |f|.
double weak_l1_norm(const SimpleFunction& f, const MeasureTree& mu);
// Number of distinct nonzero values |f| takes on positive-mass leaves.
std::size_t distinct_value_count(const SimpleFunction& f, const MeasureTree& mu);

double inner_product(const SimpleFunction& f, const SimpleFunction& g, const MeasureTree& mu);
double inner_product(const SimpleFunction& f, const HaarFunction& phi, const MeasureTree& mu);

// Finitely supported coefficient sequence {gamma_Q}, gen < depth. Levels may
// be left empty (all zero).
struct CoefficientSequence {
    int dim = 1;
    int depth = 0;
    std::vector<std::vector<double>> level;  // level[k] empty or 2^(k*dim)

    static CoefficientSequence zero(int dim, int depth);
    double get(int gen, std::uint64_t node) const;
    void set(int gen, std::uint64_t node, double v);
    void set(const CubeId& q, double v) { set(q.gen, node_index(q), v); }
};

double bmo_norm(const SimpleFunction& rho, const MeasureTree& mu, int upto_gen);
// sup over positive-mass Q of (sum_{Q' in D(Q)} gamma^2 / mu(Q))^(1/2), the
// inner sum truncated at the tree depth. Throws if gamma is nonzero on a
// zero-mass cube.
double carleson_norm(const CoefficientSequence& gamma, const MeasureTree& mu, int upto_gen);

struct HaarSystem;  // haar.hpp
// Builds rho with bmo_norm(rho) <= carleson_norm(gamma) from a cancellative
// system theta, following the corner chain Q_k (child index 0 at each step).
SimpleFunction bmo_from_carleson(const CoefficientSequence& gamma, const HaarSystem& theta,
                                 const MeasureTree& mu);

}  // namespace haarlab
