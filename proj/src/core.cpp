#include "locc/core.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace locc {

namespace {

constexpr double kSqrtHalf = 0.7071067811865476;

// First parameter index scan order for sign canonicalization: diagonal, then
// row-major upper triangle (real part before imaginary part).
void canonicalize_matrix_sign(CMatrix& h) {
  const int d = static_cast<int>(h.rows());
  double maxabs = 0.0;
  for (int p = 0; p < d; ++p) maxabs = std::max(maxabs, std::abs(h(p, p).real()));
  for (int p = 0; p < d; ++p)
    for (int q = p + 1; q < d; ++q)
      maxabs = std::max({maxabs, std::abs(h(p, q).real()), std::abs(h(p, q).imag())});
  if (maxabs == 0.0) return;
  const double floor = 1e-9 * maxabs;
  for (int p = 0; p < d; ++p) {
    if (std::abs(h(p, p).real()) > floor) {
      if (h(p, p).real() < 0.0) h = -h;
      return;
    }
  }
  for (int p = 0; p < d; ++p) {
    for (int q = p + 1; q < d; ++q) {
      if (std::abs(h(p, q).real()) > floor) {
        if (h(p, q).real() < 0.0) h = -h;
        return;
      }
      if (std::abs(h(p, q).imag()) > floor) {
        if (h(p, q).imag() < 0.0) h = -h;
        return;
      }
    }
  }
}

// Real parametrization of Hermitian operators: d diagonal entries, then for
// each p<q the pair (u, v) with E_pq = (u + i v) / sqrt(2).  The sqrt(2)
// scaling makes the Euclidean norm of the parameter vector equal the
// Frobenius norm of the operator, so SVD-orthonormal null vectors map to
// trace-orthonormal operators.
CMatrix params_to_hermitian(const Eigen::VectorXd& x, int dim) {
  CMatrix h = CMatrix::Zero(dim, dim);
  int idx = 0;
  for (int p = 0; p < dim; ++p) h(p, p) = x[idx++];
  for (int p = 0; p < dim; ++p) {
    for (int q = p + 1; q < dim; ++q) {
      const double u = x[idx++];
      const double v = x[idx++];
      h(p, q) = Complex(u, v) * kSqrtHalf;
      h(q, p) = Complex(u, -v) * kSqrtHalf;
    }
  }
  return h;
}

}  // namespace

//============================================================================
// Ket
//============================================================================

Ket::Ket(std::initializer_list<Complex> a) {
  amps.resize(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (const Complex& c : a) amps[i++] = c;
}

Ket Ket::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw std::invalid_argument("basis index out of range");
  Ket k;
  k.amps = CVector::Zero(dim);
  k.amps[index] = 1.0;
  return k;
}

Ket Ket::zero(int dim) {
  Ket k;
  k.amps = CVector::Zero(dim);
  return k;
}

Complex inner(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
  return a.amps.dot(b.amps);  // Eigen's dot conjugates the first argument
}

void require_normalized(const Ket& k, const char* what) {
  if (std::abs(k.norm() - 1.0) > kInvariantTol)
    throw std::invalid_argument(std::string(what) + ": ket not normalized, norm = " +
                                std::to_string(k.norm()));
}

//============================================================================
// HermitianOp / Povm
//============================================================================

double HermitianOp::trace_norm_sq() const { return entries.squaredNorm(); }

HermitianOp HermitianOp::checked(const CMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian op must be square");
  const double defect = (m - m.adjoint()).norm();
  if (defect > kInvariantTol)
    throw std::invalid_argument("matrix not hermitian, defect = " + std::to_string(defect));
  HermitianOp h;
  h.entries = 0.5 * (m + m.adjoint());
  return h;
}

HermitianOp HermitianOp::identity(int dim) {
  HermitianOp h;
  h.entries = CMatrix::Identity(dim, dim);
  return h;
}

double trace_inner(const HermitianOp& a, const HermitianOp& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_inner: dimension mismatch");
  return (a.entries * b.entries).trace().real();
}

void canonicalize_sign(HermitianOp& h) { canonicalize_matrix_sign(h.entries); }

double povm_residual(const Povm& p) {
  CMatrix sum = CMatrix::Zero(p.dim, p.dim);
  double worst = 0.0;
  for (const HermitianOp& e : p.elements) {
    sum += e.entries;
    worst = std::max(worst, (e.entries - e.entries.adjoint()).norm());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(e.entries, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < 0.0) worst = std::max(worst, -lo);
  }
  worst = std::max(worst, (sum - CMatrix::Identity(p.dim, p.dim)).norm());
  return worst;
}

//============================================================================
// KrausSet
//============================================================================

double KrausSet::completeness_residual() const {
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (const CMatrix& m : ops) sum += m.adjoint() * m;
  return (sum - CMatrix::Identity(dim, dim)).norm();
}

void require_complete(const KrausSet& m, const char* what) {
  if (m.outcomes() == 0) throw std::invalid_argument(std::string(what) + ": empty kraus set");
  for (const CMatrix& op : m.ops)
    if (op.rows() != m.dim || op.cols() != m.dim)
      throw std::invalid_argument(std::string(what) + ": kraus operator shape mismatch");
  const double r = m.completeness_residual();
  if (r > kInvariantTol)
    throw std::invalid_argument(std::string(what) +
                                ": kraus completeness residual = " + std::to_string(r));
}

Branch apply_kraus(const KrausSet& m, int outcome, const Ket& input) {
  if (outcome < 0 || outcome >= m.outcomes())
    throw std::invalid_argument("apply_kraus: outcome index out of range");
  if (input.dim() != m.dim) throw std::invalid_argument("apply_kraus: dimension mismatch");
  require_normalized(input, "apply_kraus");
  Branch b;
  b.outcome = outcome;
  CVector image = m.ops[outcome] * input.amps;
  const double a = image.norm();
  if (a <= kBranchCutoff) {
    b.amplitude = 0.0;
    b.vector = Ket::zero(m.dim);
  } else {
    b.amplitude = a;
    b.vector = Ket(image / a);
  }
  return b;
}

Povm povm_from_kraus(const KrausSet& m) {
  Povm p;
  p.dim = m.dim;
  p.elements.reserve(m.ops.size());
  for (const CMatrix& op : m.ops) p.elements.push_back(HermitianOp::checked(op.adjoint() * op));
  return p;
}

KrausSet random_kraus_set(std::uint64_t seed, int dim, int outcomes) {
  if (dim < 1 || outcomes < 1)
    throw std::invalid_argument("random_kraus_set: dim and outcomes must be positive");
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::mt19937_64 rng(seed + 1000003ULL * static_cast<std::uint64_t>(attempt));
    std::normal_distribution<double> gauss(0.0, 1.0);
    KrausSet k;
    k.dim = dim;
    k.ops.reserve(outcomes);
    for (int i = 0; i < outcomes; ++i) {
      CMatrix m(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = Complex(gauss(rng), gauss(rng)) * kSqrtHalf;
      k.ops.push_back(std::move(m));
    }
    CMatrix gram = CMatrix::Zero(dim, dim);
    for (const CMatrix& m : k.ops) gram += m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
    if (es.eigenvalues().minCoeff() < kBranchCutoff) continue;  // degenerate draw
    CMatrix inv_sqrt = es.eigenvectors() *
                       es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().adjoint();
    for (CMatrix& m : k.ops) m = m * inv_sqrt;
    return k;
  }
  throw std::runtime_error("random_kraus_set: 100 degenerate draws in a row");
}

//============================================================================
// Hermitian null space
//============================================================================

std::vector<HermitianOp> hermitian_basis(int dim) {
  std::vector<HermitianOp> basis;
  basis.reserve(static_cast<std::size_t>(dim) * dim);
  const int n = dim * dim;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x[i] = 1.0;
    HermitianOp h;
    h.entries = params_to_hermitian(x, dim);
    basis.push_back(std::move(h));
  }
  return basis;
}

std::vector<HermitianOp> hermitian_nullspace(
    const std::vector<LinearFunctional>& constraints, int dim) {
  if (dim < 1) throw std::invalid_argument("hermitian_nullspace: dim must be positive");
  if (constraints.empty()) return hermitian_basis(dim);
  const int n = dim * dim;

  // Two real rows per complex constraint <x|E|y> = 0.
  RMatrix a(2 * static_cast<int>(constraints.size()), n);
  int row = 0;
  for (const LinearFunctional& f : constraints) {
    if (f.left.dim() != dim || f.right.dim() != dim)
      throw std::invalid_argument("hermitian_nullspace: functional dimension mismatch");
    Eigen::VectorXcd coef(n);
    int idx = 0;
    for (int p = 0; p < dim; ++p) coef[idx++] = std::conj(f.left.amps[p]) * f.right.amps[p];
    for (int p = 0; p < dim; ++p) {
      for (int q = p + 1; q < dim; ++q) {
        const Complex xp = std::conj(f.left.amps[p]);
        const Complex xq = std::conj(f.left.amps[q]);
        const Complex yp = f.right.amps[p];
        const Complex yq = f.right.amps[q];
        coef[idx++] = (xp * yq + xq * yp) * kSqrtHalf;
        coef[idx++] = Complex(0.0, 1.0) * (xp * yq - xq * yp) * kSqrtHalf;
      }
    }
    a.row(row++) = coef.real();
    a.row(row++) = coef.imag();
  }

  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  if (top > 0.0) {
    const double cutoff = kNullspaceRelTol * top;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] >= cutoff) ++rank;
  }

  std::vector<HermitianOp> basis;
  basis.reserve(static_cast<std::size_t>(n - rank));
  const RMatrix& v = svd.matrixV();
  for (int c = rank; c < n; ++c) {
    HermitianOp h;
    h.entries = params_to_hermitian(v.col(c), dim);
    canonicalize_matrix_sign(h.entries);
    basis.push_back(std::move(h));
  }
  return basis;
}

}  // namespace locc
