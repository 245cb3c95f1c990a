#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "locc/core.hpp"

using namespace locc;

namespace {

std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

Ket random_ket(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Ket k = Ket::zero(dim);
  for (int i = 0; i < dim; ++i) k.amps[i] = Complex(g(rng), g(rng));
  k.amps /= k.amps.norm();
  return k;
}

CMatrix random_unitary(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(m);
  CMatrix q = qr.householderQ();
  return q;
}

double constraint_residual(const LinearFunctional& f, const HermitianOp& b) {
  return std::abs((f.left.amps.adjoint() * b.entries * f.right.amps)(0, 0));
}

}  // namespace

TEST_CASE("inner product is conjugate-linear in the first argument") {
  Ket a = Ket::zero(2);
  a.amps << Complex(1, 0), Complex(0, 1);
  a.amps /= a.amps.norm();
  Ket b = Ket::zero(2);
  b.amps << Complex(1, 0), Complex(1, 0);
  b.amps /= b.amps.norm();
  const Complex v = inner(a, b);
  CHECK(std::abs(v - Complex(0.5, -0.5)) < 1e-15);
  CHECK(std::abs(inner(b, a) - std::conj(v)) < 1e-15);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(inner(Ket::basis(3, i), Ket::basis(3, j)) -
                     (i == j ? 1.0 : 0.0)) == 0.0);
}

TEST_CASE("normalization gate names the offending norm") {
  Ket k = Ket::basis(2, 0);
  k.amps *= 2.0;
  CHECK_THROWS_WITH_AS(require_normalized(k, "probe"),
                       doctest::Contains("probe"), std::invalid_argument);
}

TEST_CASE("hermitian construction symmetrizes and rejects") {
  CMatrix m(2, 2);
  m << Complex(1, 0), Complex(0.25, 0.5), Complex(0.25, -0.5), Complex(-2, 0);
  const HermitianOp h = HermitianOp::checked(m);
  CHECK((h.entries - h.entries.adjoint()).norm() == 0.0);

  CMatrix bad = m;
  bad(0, 1) = Complex(0.5, 0.5);
  CHECK_THROWS_AS(HermitianOp::checked(bad), std::invalid_argument);

  CHECK(HermitianOp::identity(3).entries.trace().real() == 3.0);
}

TEST_CASE("kraus branches of computational projectors are exact") {
  KrausSet proj;
  proj.dim = 2;
  proj.ops = {CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)};
  proj.ops[0](0, 0) = 1.0;
  proj.ops[1](1, 1) = 1.0;
  require_complete(proj, "projectors");

  Ket in = Ket::zero(2);
  in.amps << 0.6, 0.8;
  const Branch b0 = apply_kraus(proj, 0, in);
  const Branch b1 = apply_kraus(proj, 1, in);
  CHECK(b0.amplitude == 0.6);
  CHECK(b1.amplitude == 0.8);
  CHECK(std::abs(inner(b0.vector, Ket::basis(2, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(inner(b1.vector, Ket::basis(2, 1)) - 1.0) < 1e-15);

  // vanishing branch flushes to an exact zero
  const Branch dead = apply_kraus(proj, 0, Ket::basis(2, 1));
  CHECK(dead.amplitude == 0.0);
  CHECK(dead.vector.amps.norm() == 0.0);
}

TEST_CASE("branch weights sum to one for random measurements") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const int dim = 2 + static_cast<int>(seed % 3);
    const int outcomes = 2 + static_cast<int>(seed % 4);
    const KrausSet m = random_kraus_set(seed, dim, outcomes);
    CHECK(m.completeness_residual() < 1e-12);

    auto rng = rng_for(seed * 77 + 5);
    for (int trial = 0; trial < 4; ++trial) {
      const Ket in = random_ket(rng, dim);
      double total = 0.0;
      for (int k = 0; k < outcomes; ++k) {
        const Branch b = apply_kraus(m, k, in);
        total += b.amplitude * b.amplitude;
        if (b.amplitude > 0.0) CHECK(std::abs(b.vector.norm() - 1.0) < 1e-12);
      }
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("effects of a complete measurement form a valid povm") {
  for (std::uint64_t seed = 3; seed <= 12; ++seed) {
    const KrausSet m = random_kraus_set(seed, 3, 4);
    const Povm p = povm_from_kraus(m);
    CHECK(p.outcomes() == 4);
    CHECK(povm_residual(p) < 1e-12);
  }

  Povm broken;
  broken.dim = 2;
  broken.elements = {HermitianOp::identity(2), HermitianOp::identity(2)};
  CHECK(povm_residual(broken) > 0.5);
}

TEST_CASE("random measurements are deterministic per seed") {
  const KrausSet a = random_kraus_set(42, 2, 3);
  const KrausSet b = random_kraus_set(42, 2, 3);
  REQUIRE(a.outcomes() == b.outcomes());
  for (int k = 0; k < a.outcomes(); ++k) CHECK(a.ops[k] == b.ops[k]);

  const KrausSet c = random_kraus_set(43, 2, 3);
  double diff = 0.0;
  for (int k = 0; k < a.outcomes(); ++k) diff += (a.ops[k] - c.ops[k]).norm();
  CHECK(diff > 1e-3);
}

TEST_CASE("branch structure is covariant under local unitaries") {
  auto rng = rng_for(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const int dim = 2 + trial % 2;
    const KrausSet m = random_kraus_set(100 + trial, dim, 3);
    const CMatrix u = random_unitary(rng, dim);
    KrausSet conj = m;
    for (CMatrix& op : conj.ops) op = u * op * u.adjoint();

    std::vector<Ket> inputs;
    for (int i = 0; i < 3; ++i) inputs.push_back(random_ket(rng, dim));
    for (int k = 0; k < m.outcomes(); ++k) {
      std::vector<Branch> base, moved;
      for (const Ket& in : inputs) {
        Ket rotated = in;
        rotated.amps = u * in.amps;
        base.push_back(apply_kraus(m, k, in));
        moved.push_back(apply_kraus(conj, k, rotated));
      }
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        CHECK(std::abs(base[i].amplitude - moved[i].amplitude) < 1e-10);
        for (std::size_t j = i + 1; j < inputs.size(); ++j) {
          if (base[i].amplitude == 0.0 || base[j].amplitude == 0.0) continue;
          CHECK(std::abs(inner(base[i].vector, base[j].vector) -
                         inner(moved[i].vector, moved[j].vector)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("hermitian basis is trace-orthonormal") {
  for (int dim : {2, 3}) {
    const std::vector<HermitianOp> basis = hermitian_basis(dim);
    REQUIRE(static_cast<int>(basis.size()) == dim * dim);
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j)
        CHECK(std::abs(trace_inner(basis[i], basis[j]) - (i == j ? 1.0 : 0.0)) <
              1e-12);
  }
}

TEST_CASE("nullspace of hand-eliminated constraint systems") {
  // <0|E|1> = 0 on dimension 2 leaves exactly the diagonal operators
  LinearFunctional offdiag{Ket::basis(2, 0), Ket::basis(2, 1)};
  const auto diag_space = hermitian_nullspace({offdiag}, 2);
  REQUIRE(diag_space.size() == 2);
  for (const HermitianOp& b : diag_space) {
    CHECK(std::abs(b.entries(0, 1)) < 1e-12);
    CHECK(constraint_residual(offdiag, b) < 1e-10);
  }

  // adding <+|E|-> = 0 forces equal diagonal: the span of the identity
  Ket plus = Ket::zero(2), minus = Ket::zero(2);
  plus.amps << 1.0, 1.0;
  plus.amps /= plus.amps.norm();
  minus.amps << 1.0, -1.0;
  minus.amps /= minus.amps.norm();
  LinearFunctional balance{plus, minus};
  const auto scalar_space = hermitian_nullspace({offdiag, balance}, 2);
  REQUIRE(scalar_space.size() == 1);
  const HermitianOp& b = scalar_space[0];
  const Complex mean = b.entries.trace() / 2.0;
  CHECK((b.entries - mean * CMatrix::Identity(2, 2)).norm() < 1e-10);
  CHECK(b.entries(0, 0).real() > 0.0);  // canonical sign

  // no constraints: the whole operator space
  CHECK(hermitian_nullspace({}, 3).size() == 9);
}

TEST_CASE("nullspace dimension matches an independent rank computation") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto rng = rng_for(seed * 1337);
    const int dim = 2 + static_cast<int>(seed % 2);
    const int n_constraints = 1 + static_cast<int>(seed % 5);
    std::vector<LinearFunctional> constraints;
    for (int i = 0; i < n_constraints; ++i)
      constraints.push_back({random_ket(rng, dim), random_ket(rng, dim)});

    const auto space = hermitian_nullspace(constraints, dim);

    // assemble the system against the trace-orthonormal operator basis and
    // rank it with a different factorization than the solver uses
    const std::vector<HermitianOp> basis = hermitian_basis(dim);
    RMatrix a(2 * n_constraints, static_cast<int>(basis.size()));
    for (int f = 0; f < n_constraints; ++f)
      for (std::size_t c = 0; c < basis.size(); ++c) {
        const Complex v = (constraints[static_cast<std::size_t>(f)].left.amps.adjoint() *
                           basis[c].entries *
                           constraints[static_cast<std::size_t>(f)].right.amps)(0, 0);
        a(2 * f, static_cast<int>(c)) = v.real();
        a(2 * f + 1, static_cast<int>(c)) = v.imag();
      }
    Eigen::ColPivHouseholderQR<RMatrix> qr(a);
    qr.setThreshold(1e-10);
    const int expected_dim = dim * dim - static_cast<int>(qr.rank());
    CHECK(static_cast<int>(space.size()) == expected_dim);

    for (const HermitianOp& b : space) {
      for (const LinearFunctional& f : constraints)
        CHECK(constraint_residual(f, b) < 1e-10);
    }
    for (std::size_t i = 0; i < space.size(); ++i)
      for (std::size_t j = 0; j < space.size(); ++j)
        CHECK(std::abs(trace_inner(space[i], space[j]) - (i == j ? 1.0 : 0.0)) <
              1e-10);
  }
}

TEST_CASE("nullspace dimension is invariant under unitary constraint rotation") {
  auto rng = rng_for(99);
  for (int trial = 0; trial < 8; ++trial) {
    const int dim = 2 + trial % 2;
    std::vector<LinearFunctional> constraints;
    for (int i = 0; i <= trial % 3; ++i)
      constraints.push_back({random_ket(rng, dim), random_ket(rng, dim)});
    const CMatrix u = random_unitary(rng, dim);
    std::vector<LinearFunctional> rotated;
    for (const LinearFunctional& f : constraints) {
      Ket l = f.left, r = f.right;
      l.amps = u * l.amps;
      r.amps = u * r.amps;
      rotated.push_back({l, r});
    }
    const auto base = hermitian_nullspace(constraints, dim);
    const auto moved = hermitian_nullspace(rotated, dim);
    CHECK(base.size() == moved.size());
    // conjugated original basis elements satisfy the rotated system
    for (const HermitianOp& b : base) {
      const HermitianOp conj = HermitianOp::checked(u * b.entries * u.adjoint());
      for (const LinearFunctional& f : rotated)
        CHECK(constraint_residual(f, conj) < 1e-10);
    }
  }
}

TEST_CASE("sign canonicalization is deterministic and idempotent") {
  CMatrix m(2, 2);
  m << Complex(-0.5, 0), Complex(0.1, 0.2), Complex(0.1, -0.2), Complex(0.5, 0);
  HermitianOp h = HermitianOp::checked(m);
  canonicalize_sign(h);
  CHECK(h.entries(0, 0).real() == 0.5);
  HermitianOp again = h;
  canonicalize_sign(again);
  CHECK(again.entries == h.entries);

  // leading zero diagonal: the first off-diagonal decides
  CMatrix od = CMatrix::Zero(2, 2);
  od(0, 1) = Complex(-0.3, 0.0);
  od(1, 0) = Complex(-0.3, 0.0);
  HermitianOp g = HermitianOp::checked(od);
  canonicalize_sign(g);
  CHECK(g.entries(0, 1).real() == 0.3);
}
