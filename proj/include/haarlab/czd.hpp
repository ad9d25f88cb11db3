#pragma once

#include <string>
#include <vector>

#include "haarlab/func.hpp"
#include "haarlab/grid.hpp"
#include "haarlab/measure.hpp"

namespace haarlab {

// Three-part decomposition f = g + b + beta at level lambda. Each maximal
// cube Q_j carries b_j = (f - <f>_{Q_j}) 1_{Q_j} and
// beta_j = (<f>_{Q_j} - <f>_{parent}) (1_{Q_j} - (mu(Q_j)/mu(parent)) 1_{parent}).
struct CZDecomposition {
    double lambda = 0;
    std::vector<CubeId> maximal_cubes;
    std::vector<double> avg_on_cube;    // <f>_{Q_j}
    std::vector<double> avg_on_parent;  // <f>_{parent of Q_j}
    std::vector<double> mass_ratio;     // mu(Q_j)/mu(parent)
    SimpleFunction g;
    SimpleFunction g3;  // the parent-supported part of g (zero when no maximal cubes)

    SimpleFunction b_part(const SimpleFunction& f, const MeasureTree& mu, std::size_t j) const;
    SimpleFunction beta_part(std::size_t j, int resolution) const;
    SimpleFunction b_total(const SimpleFunction& f, const MeasureTree& mu) const;
    SimpleFunction beta_total(int resolution) const;
};

// Maximal dyadic cubes with <|f|>_Q > lambda (ancestors all <= lambda).
// Requires lambda > <|f|>_root; zero-mass cubes are never maximal.
std::vector<CubeId> maximal_cubes(const SimpleFunction& f, double lambda, const MeasureTree& mu);

CZDecomposition decompose(const SimpleFunction& f, double lambda, const MeasureTree& mu);

struct CheckResult {
    std::string name;
    double bound = 0;     // allowed value
    double measured = 0;  // attained value
    bool pass = false;
};
struct VerificationReport {
    bool ok = true;
    std::vector<CheckResult> checks;
};

// Checks reconstruction, supports, mean-zero blocks, the L1 block bounds
// (2 and 4 times ||f||_1), ||g||_inf and the moment bounds
// ||g3||_m^m <= 2^m m! lambda^(m-1) ||f||_1 for integer m in p_list.
VerificationReport verify(const CZDecomposition& dec, const SimpleFunction& f,
                          const MeasureTree& mu, const std::vector<int>& p_list = {1, 2, 3});

// Tf = sum_j (int_{Q_j} |f| dmu) 1_{parent(Q_j)} / mu(parent(Q_j)) over a
// pairwise disjoint family not containing the root.
SimpleFunction lemma_aux_operator(const std::vector<CubeId>& cubes, const SimpleFunction& f,
                                  const MeasureTree& mu);

}  // namespace haarlab
