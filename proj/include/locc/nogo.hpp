#ifndef LOCC_NOGO_HPP
#define LOCC_NOGO_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "locc/core.hpp"
#include "locc/ensembles.hpp"

namespace locc {

// A first-step measurement keeps the variable measurable exactly when every
// later pair of still-confusable states stays orthogonal.  For a pair (i, j)
// whose passive-side overlap is nonzero that forces
//   amplitude_i * amplitude_j * <branch_i|branch_j> = <phi_i|E|phi_j> = 0
// for every effect E of the acting party, a complex-linear constraint on E.

struct ConstraintPair {
  int i = 0;
  int j = 0;                 // i < j, 1-based labels
  Complex passive_overlap;   // why the pair is constrained
  LinearFunctional functional;
};

std::vector<ConstraintPair> constraint_pairs(const ProductEnsemble& e, Party acting);

enum class Verdict { NoProgress, ProgressPossible };

const char* verdict_name(Verdict v);

struct FeasibilityReport {
  Party party = Party::Alice;
  std::vector<ConstraintPair> pairs;
  int nullspace_dim = 0;
  std::vector<HermitianOp> nullspace_basis;
  Verdict verdict = Verdict::ProgressPossible;
  // Distance of the basis from span{identity} when the dimension is 1.
  double identity_residual = 0.0;
  // A trace-orthogonal-to-identity feasible effect direction when progress is
  // possible: it varies on the ensemble (diagonal expectation spread above
  // kOracleTol) or carries an off-diagonal element a scalar effect forbids.
  std::optional<HermitianOp> witness;
};

// Null space of the full zero-error constraint system on the acting party's
// effects.  Verdict NoProgress exactly when the null space is the span of the
// identity.
FeasibilityReport feasibility_analysis(const ProductEnsemble& e, Party acting);

// Same analysis restricted to an explicit list of (i, j) label pairs; used to
// study reduced subsystems whose null space is strictly larger than the full
// system's.
FeasibilityReport feasibility_analysis_pairs(const ProductEnsemble& e, Party acting,
                                             const std::vector<std::pair<int, int>>& pairs);

// The reduced four-pair subsystem studied for the nine-state families.
std::vector<std::pair<int, int>> nine_reduced_pairs();

// Consequences of a NoProgress verdict: every feasible effect is a multiple
// of the identity, so all branch weights agree (one equal-weight class) and
// every acting-side-orthogonal pair keeps orthogonal branches.
struct ForcedStructure {
  std::vector<std::vector<int>> equal_weight_classes;
  std::vector<std::pair<int, int>> forced_branch_orthogonalities;
};

ForcedStructure forced_structure(const ProductEnsemble& e, Party acting);

// Monte-Carlo cross-check of the constraint recasting: random measurements
// projected effect-wise onto the constraint null space must reproduce the
// forced structure.  Reports the worst weight spread within an outcome and
// the worst deviation of branch overlaps from the input overlaps.
struct OracleReport {
  int trials = 0;
  std::uint64_t seed = 0;
  double max_weight_spread = 0.0;
  double max_overlap_deviation = 0.0;
};

OracleReport kraus_oracle_check(const ProductEnsemble& e, Party acting, int trials,
                                std::uint64_t seed);

// Cross-ratio relations tying the branch weights of the generalized
// nine-state family's outer pairs to its inner basis states.  Samples random
// Hermitian effects satisfying only the two theta constraints and the two
// gamma constraints, checks all four relations, and checks that together the
// relations force equal weights on the three Alice basis states.
struct RelationReport {
  int samples = 0;
  double max_relation_residual = 0.0;
  double max_forced_equality_residual = 0.0;
};

RelationReport check_generalized_relations(double theta, double gamma, int samples,
                                           std::uint64_t seed);

// Randomized check of the branch recombination identities: for superposed
// states phi_{3,4} = (phi_1 +- phi_2)/sqrt2 the branch weights of the two
// pairs determine each other.  Degenerate branches (amplitude below
// kBranchCutoff) enter with a vanishing overlap term.
struct ParallelogramReport {
  int trials = 0;
  double max_residual = 0.0;
};

ParallelogramReport verify_parallelogram(int trials, std::uint64_t seed);

}  // namespace locc

#endif
