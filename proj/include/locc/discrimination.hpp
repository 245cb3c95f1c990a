#ifndef LOCC_DISCRIMINATION_HPP
#define LOCC_DISCRIMINATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "locc/core.hpp"
#include "locc/ensembles.hpp"

namespace locc {

// Bob's response to one Alice outcome: an orthonormal measurement basis on
// his side plus a guess per basis outcome (1-based state label, 0 = none;
// outcome pairs of negligible total weight may stay unassigned).
struct BobStrategy {
  std::vector<Ket> basis;
  std::vector<int> guesses;
};

// One round of classical communication: Alice measures, sends the outcome,
// Bob measures and announces the guess.
struct OneWayProtocol {
  KrausSet alice;
  std::vector<BobStrategy> outcomes;  // one strategy per Alice outcome
};

void validate_protocol(const OneWayProtocol& p, int dim_a, int dim_b);

// Weight parametrization of branch squares within one Alice outcome:
// gamma_weight * (1 +- epsilon) for the first pair and
// gamma_weight * (1 +- delta) for the second.
struct EstimationParametrization {
  double gamma_weight = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

void validate_parametrization(const EstimationParametrization& p);

struct EstimationResult {
  std::vector<double> per_state_success;
  double average_success = 0.0;
  // Per Alice outcome, for four-state-family projective protocols; empty
  // otherwise.
  std::vector<EstimationParametrization> outcome_parameters;
};

// Exact Born-rule evaluation of a protocol; no sampling anywhere.
EstimationResult simulate_one_way(const ProductEnsemble& e, const OneWayProtocol& p);

// The optimal two-outcome protocol for four_state(): Alice projects onto the
// rotated pair {sin(pi/8)|0> + cos(pi/8)|1>, cos(pi/8)|0> - sin(pi/8)|1>},
// Bob reads his computational basis and the guess map picks the unique state
// consistent with both outcomes.
OneWayProtocol chi_basis_protocol();

// Projective protocol at an Alice basis angle t: Alice measures
// {cos t|0> + sin t|1>, -sin t|0> + cos t|1>}, Bob measures his computational
// basis, and each occurring outcome pair guesses the compatible state of
// largest branch weight (ties to the lower label).  Requires dim_a = 2.
OneWayProtocol projective_protocol(const ProductEnsemble& e, double angle);

EstimationResult guess_probability_projective(const ProductEnsemble& e, double angle);

// Closed-form single-outcome success (2 + eps + sqrt(1-eps^2) * overlap) / 4
// for the four-state family; eps in [0, 1], overlap in [-1, 1].
double analytic_p(double epsilon, double overlap);

struct ProjectiveOptimum {
  double best_angle = 0.0;
  std::vector<double> co_optimal_angles;  // grid maxima within kConvergenceTol
  EstimationResult estimate;
};

// Coarse grid (step pi/720 over [0, pi)) plus golden-section refinement to
// kConvergenceTol in angle.  The best angle is reduced mod pi/2 (same
// unordered basis) and reflected into [0, pi/4] only when the reflection
// preserves the value.
ProjectiveOptimum optimize_projective(const ProductEnsemble& e);

struct PovmSearchResult {
  KrausSet alice;
  EstimationResult estimate;
  long long evaluations = 0;
};

// Gradient-free search over completeness-normalized Kraus sets with
// `outcomes` operators: random restarts, each refined by a deterministic
// downhill simplex with an axis-aligned initial simplex.  Bob's side is
// scored optimally (perfect between orthogonal groups, two-state minimum
// error inside a group).  Deterministic for a fixed seed.
PovmSearchResult optimize_povm(const ProductEnsemble& e, int outcomes, int restarts,
                               std::uint64_t seed);

// Minimum-error success probability for two pure states with priors q1, q2
// and overlap magnitude in [0, 1]: (1 + sqrt(1 - 4 q1 q2 ov^2)) / 2.
double helstrom_two_pure(double q1, double q2, double overlap_mod);

// Protocol file format (documented in README.md).
OneWayProtocol load_protocol(const std::string& path);
void save_protocol(const OneWayProtocol& p, const std::string& path);

}  // namespace locc

#endif
