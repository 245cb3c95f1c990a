#ifndef LOCC_CORE_HPP
#define LOCC_CORE_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace locc {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

//============================================================================
// Numeric contract shared by every module
//============================================================================

inline constexpr double kInvariantTol = 1e-12;    // construction-level checks
inline constexpr double kResidualTol = 1e-10;     // operator-equation residuals
inline constexpr double kConvergenceTol = 1e-9;   // optimizer termination
inline constexpr double kBranchCutoff = 1e-12;    // amplitudes below this are zero
inline constexpr double kOracleTol = 1e-8;        // randomized structure checks
inline constexpr double kNullspaceRelTol = 1e-10; // singular values below this
                                                  // fraction of the largest span
                                                  // the null space

//============================================================================
// Basic state and operator types
//============================================================================

// Finite-dimensional pure state. Contracts that require a normalized input
// check the norm at the boundary; branch vectors with amplitude zero carry a
// zero vector instead.
struct Ket {
  CVector amps;

  Ket() = default;
  explicit Ket(CVector a) : amps(std::move(a)) {}
  Ket(std::initializer_list<Complex> a);

  int dim() const { return static_cast<int>(amps.size()); }
  double norm() const { return amps.norm(); }

  static Ket basis(int dim, int index);
  static Ket zero(int dim);
};

// <a|b>, conjugate-linear in the first argument.
Complex inner(const Ket& a, const Ket& b);

void require_normalized(const Ket& k, const char* what);

// Hermitian operator; hermiticity enforced at construction within
// kInvariantTol (the stored matrix is symmetrized to kill rounding dust).
struct HermitianOp {
  CMatrix entries;

  int dim() const { return static_cast<int>(entries.rows()); }
  double trace_norm_sq() const;   // tr(H H), the Frobenius norm squared
  static HermitianOp checked(const CMatrix& m);
  static HermitianOp identity(int dim);
};

// tr(A B); real for Hermitian arguments.
double trace_inner(const HermitianOp& a, const HermitianOp& b);

// Deterministic overall sign: the first significant entry in scan order
// (diagonal, then row-major upper triangle, real part before imaginary) is
// made positive.  Keeps solver output byte-stable across runs.
void canonicalize_sign(HermitianOp& h);

// Measurement given as Kraus operators M_k on one local system.
// Completeness sum_k M_k^dag M_k = I within kInvariantTol.
struct KrausSet {
  int dim = 0;
  std::vector<CMatrix> ops;

  int outcomes() const { return static_cast<int>(ops.size()); }
  double completeness_residual() const;
};

void require_complete(const KrausSet& m, const char* what);

// One branch of a measured state: M_k|s> = amplitude * vector with the
// amplitude real nonnegative (phases folded into the vector).  state_label is
// 1-based when the branch belongs to an ensemble sweep, 0 otherwise.
struct Branch {
  int state_label = 0;
  int outcome = 0;
  double amplitude = 0.0;
  Ket vector;
};

struct Povm {
  int dim = 0;
  std::vector<HermitianOp> elements;

  int outcomes() const { return static_cast<int>(elements.size()); }
};

// Largest violation of the Povm contract: deviation of the element sum from
// the identity, negative eigenvalue magnitude, hermiticity defect.
double povm_residual(const Povm& p);

//============================================================================
// Operations
//============================================================================

// Branch decomposition of outcome k applied to a normalized input state.
// Amplitudes below kBranchCutoff are flushed to exactly zero with a zero
// branch vector.
Branch apply_kraus(const KrausSet& m, int outcome, const Ket& input);

// Effects E_k = M_k^dag M_k.
Povm povm_from_kraus(const KrausSet& m);

// Haar-flavored random measurement: complex Gaussian draws, right-normalized
// to completeness.  Deterministic for a fixed seed.  A draw whose Gram sum is
// singular below kBranchCutoff is regenerated with an incremented sub-seed;
// 100 failures in a row raise an error.
KrausSet random_kraus_set(std::uint64_t seed, int dim, int outcomes);

// Complex-linear functional on Hermitian operators: E -> <left|E|right>.
struct LinearFunctional {
  Ket left;
  Ket right;
};

// Orthonormal basis (trace inner product) of the real space of Hermitian
// operators annihilated by every functional; each complex constraint
// contributes its real and imaginary part.  Singular values below
// kNullspaceRelTol relative to the largest define the null space.  An empty
// constraint list returns the full basis of real dimension dim^2.
std::vector<HermitianOp> hermitian_nullspace(
    const std::vector<LinearFunctional>& constraints, int dim);

// Canonical trace-orthonormal Hermitian basis of dimension dim^2.
std::vector<HermitianOp> hermitian_basis(int dim);

}  // namespace locc

#endif
