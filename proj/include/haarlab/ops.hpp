#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "haarlab/func.hpp"
#include "haarlab/haar.hpp"
#include "haarlab/measure.hpp"

namespace haarlab {

SimpleFunction maximal(const SimpleFunction& f, const MeasureTree& mu);

// E_k f, D_k f = E_k f - E_{k-1} f (D_0 f = E_0 f), and D_Q f = (D_k f) 1_Q.
SimpleFunction expectation(const SimpleFunction& f, int k, const MeasureTree& mu);
SimpleFunction difference(const SimpleFunction& f, int k, const MeasureTree& mu);
SimpleFunction difference_at(const SimpleFunction& f, const CubeId& q, const MeasureTree& mu);

SimpleFunction square_function(const SimpleFunction& f, const MeasureTree& mu);

// Coefficients alpha^Q_{R,S} of a complexity-(r,s) shift. R and S are
// addressed by their node index at generation gen(Q)+r resp. gen(Q)+s.
struct ShiftCoefficients {
    enum class Source { constant, signs, explicit_map, hilbert, hilbert_adjoint };
    int r = 0, s = 0;
    Source source = Source::constant;
    double constant_value = 1.0;
    std::uint64_t seed = 0;  // signs source
    std::map<std::tuple<int, std::uint64_t, std::uint64_t, std::uint64_t>, double> entries;
    double bound = 1.0;       // sup |alpha|
    double lower_bound = 0.0; // inf |alpha| over stored entries (non-degeneracy)

    double alpha(int genQ, std::uint64_t nodeQ, std::uint64_t nodeR, std::uint64_t nodeS) const;

    static ShiftCoefficients constant(int r, int s, double value);
    static ShiftCoefficients signs(int r, int s, std::uint64_t seed);
    static ShiftCoefficients hilbert();          // (0,1): alpha^I_{I,I_-}=+1, alpha^I_{I,I_+}=-1
    static ShiftCoefficients hilbert_adjoint();  // (1,0): alpha^Q_{R,Q} = sigma(R)
};

// Sh_{r,s} f = sum_Q sum_{R,S} alpha^Q_{R,S} <f,phi_R> psi_S.
SimpleFunction haar_shift(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                          const HaarSystem& psi, const SimpleFunction& f, const MeasureTree& mu);

// Same sum restricted to Q contained in q0.
SimpleFunction haar_shift_truncated(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                                    const HaarSystem& psi, const SimpleFunction& f,
                                    const MeasureTree& mu, const CubeId& q0);

// max over positive-mass q0 (gen <= upto_gen) of ||Sh^{q0} 1_{q0}||_2 / mu(q0)^(1/2).
double local_l2_constant(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                         const HaarSystem& psi, const MeasureTree& mu, int upto_gen);

// Predictable multiplier sequence: one coefficient per cube Q, applied to the
// full martingale difference D_Q f.
struct MartingaleTransformSpec {
    CoefficientSequence alpha;
};
SimpleFunction martingale_transform(const MartingaleTransformSpec& spec, const SimpleFunction& f,
                                    const MeasureTree& mu);

// Pi_gamma f = sum_Q gamma_Q <f>_Q psi_Q ;  Pi*_gamma f = sum_Q gamma_Q <f,psi_Q> 1_Q / mu(Q).
SimpleFunction paraproduct(const CoefficientSequence& gamma, const HaarSystem& psi,
                           const SimpleFunction& f, const MeasureTree& mu);
SimpleFunction paraproduct_adjoint(const CoefficientSequence& gamma, const HaarSystem& psi,
                                   const SimpleFunction& f, const MeasureTree& mu);

// max over positive-mass q0 (gen <= upto_gen) of ||Pi_gamma^{q0} 1_{q0}||_2 / mu(q0)^(1/2),
// the paraproduct sum restricted to cubes inside q0.
double paraproduct_local_l2_constant(const CoefficientSequence& gamma, const HaarSystem& psi,
                                     const MeasureTree& mu, int upto_gen);

// The necessity-proof test function for phi_q: mean-zero, supported in q,
// ||.||_1 <= 2, pairing ||phi_q||_inf with phi_q and 0 with every other
// system function. Ties in the maximizing child go to the lowest index.
SimpleFunction adversarial_test_function(const HaarSystem& phi, const CubeId& q,
                                         const MeasureTree& mu);

struct OperatorHandle {
    std::string name;
    std::function<SimpleFunction(const SimpleFunction&)> apply;
    // Optional theoretical weak-(1,1) ceiling for the report (NaN if unknown).
    double weak_ceiling = std::numeric_limits<double>::quiet_NaN();
};

// C0 (||Sh||_{2->2} + 2^{sd} (r 2^{rd} + 1) Xi sup|alpha|) with C0 = 217 and
// the generic bound ||Sh||_{2->2} <= 2^{(r+s)d/2} sup|alpha|.
double weak11_ceiling(const ShiftCoefficients& coeffs, const HaarSystem& phi,
                      const HaarSystem& psi, const MeasureTree& mu, int upto_gen);

struct BatterySpec {
    enum class Kind { haar_family, adversarial_family, normalized_indicators, random_signs, all };
    Kind kind = Kind::all;
    std::uint64_t seed = 1;
    int upto_gen = -1;        // default: depth-2
    int samples_per_gen = 8;  // sampled cubes per generation beyond the fixed ones
    int random_count = 16;    // number of random-sign test functions
};

struct Weak11Report {
    double max_ratio = 0.0;
    std::vector<double> ratio_by_gen;  // max ratio among tests rooted at each generation
    std::string witness;               // description of the maximizing input
    std::uint64_t seed = 0;
};

// For each battery function f, measures ||Tf||_{1,inf} / ||f||_1. The system
// argument supplies the haar/adversarial families (may be null for
// indicator/random batteries only).
Weak11Report weak11_estimate(const OperatorHandle& op, const MeasureTree& mu,
                             const BatterySpec& battery, const HaarSystem* system = nullptr);

}  // namespace haarlab
