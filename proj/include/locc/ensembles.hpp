#ifndef LOCC_ENSEMBLES_HPP
#define LOCC_ENSEMBLES_HPP

#include <string>
#include <utility>
#include <vector>

#include "locc/core.hpp"

namespace locc {

struct BipartiteProductState {
  int label = 0;  // 1-based
  Ket alice;
  Ket bob;
};

// Uniform-prior ensemble of jointly orthonormal bipartite product states.
struct ProductEnsemble {
  int dim_a = 0;
  int dim_b = 0;
  std::vector<BipartiteProductState> states;

  int size() const { return static_cast<int>(states.size()); }
  double prior() const { return 1.0 / size(); }
  const BipartiteProductState& state(int label) const;  // 1-based lookup
};

enum class Party { Alice, Bob };

const char* party_name(Party p);

// Checked construction: assigns labels 1..n, normalizes the global phase of
// every local ket (first nonzero amplitude real positive) so file round-trips
// are canonical, and validates normalization plus joint orthogonality.
// Violations are reported with the offending state or pair and the residual.
ProductEnsemble make_product_ensemble(int dim_a, int dim_b,
                                      std::vector<std::pair<Ket, Ket>> parts);

void validate_ensemble(const ProductEnsemble& e);

//============================================================================
// Named families
//============================================================================

// Two orthogonal pairs on 2x2: {|0>,|1>} on Alice against a shared |0> on
// Bob, and the conjugate pair {(|0>+|1>)/sqrt2, (|0>-|1>)/sqrt2} against |1>.
ProductEnsemble four_state();

// One-angle deformation of four_state; theta strictly inside (0, pi/2),
// theta = pi/4 reproduces four_state exactly.
ProductEnsemble four_state_general(double theta);

// Nine domino states on 3x3.
ProductEnsemble nine_state();

// Four-angle deformation of nine_state; every angle strictly inside
// (0, pi/2), all angles pi/4 reproduces nine_state exactly.
ProductEnsemble nine_state_general(double eta, double xi, double theta, double gamma);

// Full computational product basis on dim_a x dim_b, labels in row-major
// order (Alice index major).
ProductEnsemble computational(int dim_a, int dim_b);

//============================================================================
// Overlap structure
//============================================================================

struct OverlapPair {
  int i = 0;
  int j = 0;          // i < j, 1-based labels
  Complex overlap;    // passive-side inner product <psi_i|psi_j>
};

// Pairs whose Bob-side overlap is nonzero above kBranchCutoff; these are the
// pairs Alice's measurement must keep distinguishable when she acts first.
std::vector<OverlapPair> bob_overlap_pairs(const ProductEnsemble& e);

// Role-swapped variant for Bob acting first.
std::vector<OverlapPair> alice_overlap_pairs(const ProductEnsemble& e);

// Overlap pairs on the passive side when `acting` measures first.
std::vector<OverlapPair> passive_overlap_pairs(const ProductEnsemble& e, Party acting);

//============================================================================
// File format (documented in README.md): UTF-8 JSON with fixed field order,
// amplitudes as (re, im) pairs of decimal floats.
//============================================================================

ProductEnsemble load_ensemble(const std::string& path);
void save_ensemble(const ProductEnsemble& e, const std::string& path);

}  // namespace locc

#endif
