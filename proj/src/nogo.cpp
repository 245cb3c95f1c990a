#include "locc/nogo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace locc {

namespace {

double identity_span_residual(const std::vector<HermitianOp>& basis, int dim) {
  // distance of the normalized identity from the span of the basis
  const double inv = 1.0 / std::sqrt(static_cast<double>(dim));
  CMatrix target = CMatrix::Identity(dim, dim) * inv;
  CMatrix proj = CMatrix::Zero(dim, dim);
  for (const HermitianOp& b : basis) {
    const double c = (b.entries * target).trace().real();
    proj += c * b.entries;
  }
  return (proj - target).norm();
}

double diagonal_spread(const HermitianOp& w, const ProductEnsemble& e, Party acting) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const BipartiteProductState& s : e.states) {
    const Ket& phi = acting == Party::Alice ? s.alice : s.bob;
    const double v = (phi.amps.adjoint() * w.entries * phi.amps)(0).real();
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return hi - lo;
}

std::vector<std::pair<int, int>> acting_orthogonal_pairs(const ProductEnsemble& e,
                                                         Party acting) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < e.size(); ++i) {
    for (int j = i + 1; j < e.size(); ++j) {
      const Ket& pi = acting == Party::Alice ? e.states[static_cast<std::size_t>(i)].alice
                                             : e.states[static_cast<std::size_t>(i)].bob;
      const Ket& pj = acting == Party::Alice ? e.states[static_cast<std::size_t>(j)].alice
                                             : e.states[static_cast<std::size_t>(j)].bob;
      if (std::abs(inner(pi, pj)) <= kBranchCutoff)
        pairs.emplace_back(e.states[static_cast<std::size_t>(i)].label,
                           e.states[static_cast<std::size_t>(j)].label);
    }
  }
  return pairs;
}

double max_forbidden_offdiagonal(const HermitianOp& w, const ProductEnsemble& e,
                                 Party acting) {
  double worst = 0.0;
  for (const auto& [i, j] : acting_orthogonal_pairs(e, acting)) {
    const Ket& pi = acting == Party::Alice ? e.state(i).alice : e.state(i).bob;
    const Ket& pj = acting == Party::Alice ? e.state(j).alice : e.state(j).bob;
    worst = std::max(worst, std::abs((pi.amps.adjoint() * w.entries * pj.amps)(0)));
  }
  return worst;
}

}  // namespace

const char* verdict_name(Verdict v) {
  return v == Verdict::NoProgress ? "no-progress" : "progress-possible";
}

std::vector<ConstraintPair> constraint_pairs(const ProductEnsemble& e, Party acting) {
  std::vector<ConstraintPair> out;
  for (const OverlapPair& p : passive_overlap_pairs(e, acting)) {
    ConstraintPair c;
    c.i = p.i;
    c.j = p.j;
    c.passive_overlap = p.overlap;
    c.functional.left = acting == Party::Alice ? e.state(p.i).alice : e.state(p.i).bob;
    c.functional.right = acting == Party::Alice ? e.state(p.j).alice : e.state(p.j).bob;
    out.push_back(std::move(c));
  }
  return out;
}

FeasibilityReport feasibility_analysis_pairs(
    const ProductEnsemble& e, Party acting,
    const std::vector<std::pair<int, int>>& pairs) {
  FeasibilityReport r;
  r.party = acting;
  for (const auto& [i, j] : pairs) {
    ConstraintPair c;
    c.i = i;
    c.j = j;
    const Ket& passive_i = acting == Party::Alice ? e.state(i).bob : e.state(i).alice;
    const Ket& passive_j = acting == Party::Alice ? e.state(j).bob : e.state(j).alice;
    c.passive_overlap = inner(passive_i, passive_j);
    c.functional.left = acting == Party::Alice ? e.state(i).alice : e.state(i).bob;
    c.functional.right = acting == Party::Alice ? e.state(j).alice : e.state(j).bob;
    r.pairs.push_back(std::move(c));
  }

  const int dim = acting == Party::Alice ? e.dim_a : e.dim_b;
  std::vector<LinearFunctional> funcs;
  funcs.reserve(r.pairs.size());
  for (const ConstraintPair& c : r.pairs) funcs.push_back(c.functional);
  r.nullspace_basis = hermitian_nullspace(funcs, dim);
  r.nullspace_dim = static_cast<int>(r.nullspace_basis.size());
  r.identity_residual = identity_span_residual(r.nullspace_basis, dim);
  r.verdict = (r.nullspace_dim == 1 && r.identity_residual < kResidualTol)
                  ? Verdict::NoProgress
                  : Verdict::ProgressPossible;

  if (r.verdict == Verdict::ProgressPossible) {
    // peel the identity off the basis, keep the direction that shows the
    // most structure on this ensemble
    const CMatrix id = CMatrix::Identity(dim, dim);
    std::vector<HermitianOp> candidates;
    for (const HermitianOp& b : r.nullspace_basis) {
      CMatrix w = b.entries - (b.entries.trace() / static_cast<double>(dim)) * id;
      const double nrm = w.norm();
      if (nrm < kBranchCutoff) continue;
      HermitianOp h;
      h.entries = w / nrm;
      candidates.push_back(std::move(h));
    }
    const HermitianOp* best = nullptr;
    double best_spread = -1.0;
    for (const HermitianOp& c : candidates) {
      const double s = diagonal_spread(c, e, acting);
      if (s > best_spread) {
        best_spread = s;
        best = &c;
      }
    }
    if (best && best_spread <= kOracleTol) {
      // no weight variation available; fall back to a forbidden off-diagonal
      double best_off = -1.0;
      for (const HermitianOp& c : candidates) {
        const double o = max_forbidden_offdiagonal(c, e, acting);
        if (o > best_off) {
          best_off = o;
          best = &c;
        }
      }
    }
    if (best) {
      HermitianOp w = *best;
      canonicalize_sign(w);
      r.witness = std::move(w);
    }
  }
  return r;
}

FeasibilityReport feasibility_analysis(const ProductEnsemble& e, Party acting) {
  std::vector<std::pair<int, int>> pairs;
  for (const OverlapPair& p : passive_overlap_pairs(e, acting)) pairs.emplace_back(p.i, p.j);
  return feasibility_analysis_pairs(e, acting, pairs);
}

std::vector<std::pair<int, int>> nine_reduced_pairs() {
  return {{5, 6}, {7, 8}, {1, 9}, {3, 9}};
}

ForcedStructure forced_structure(const ProductEnsemble& e, Party acting) {
  const FeasibilityReport r = feasibility_analysis(e, acting);
  if (r.verdict != Verdict::NoProgress)
    throw std::logic_error("forced_structure requires a NoProgress verdict");
  ForcedStructure f;
  std::vector<int> all;
  for (const BipartiteProductState& s : e.states) all.push_back(s.label);
  f.equal_weight_classes.push_back(std::move(all));
  f.forced_branch_orthogonalities = acting_orthogonal_pairs(e, acting);
  return f;
}

OracleReport kraus_oracle_check(const ProductEnsemble& e, Party acting, int trials,
                                std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("kraus_oracle_check: trials must be positive");
  const FeasibilityReport fr = feasibility_analysis(e, acting);
  const int dim = acting == Party::Alice ? e.dim_a : e.dim_b;
  const int n = e.size();

  OracleReport report;
  report.trials = trials;
  report.seed = seed;

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(t) + 1));
    const int outcomes = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(dim * dim - 1));
    const KrausSet raw = random_kraus_set(rng(), dim, outcomes);

    // project every effect onto the feasible span, restore positivity and
    // completeness, and rebuild operators keeping each draw's polar unitary
    std::vector<CMatrix> effects;
    effects.reserve(raw.ops.size());
    for (const CMatrix& m : raw.ops) {
      const CMatrix eff = m.adjoint() * m;
      CMatrix proj = CMatrix::Zero(dim, dim);
      for (const HermitianOp& b : fr.nullspace_basis)
        proj += (b.entries * eff).trace().real() * b.entries;
      Eigen::SelfAdjointEigenSolver<CMatrix> es(proj);
      const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      effects.push_back(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
    }
    CMatrix sum = CMatrix::Zero(dim, dim);
    for (const CMatrix& eff : effects) sum += eff;
    Eigen::SelfAdjointEigenSolver<CMatrix> sums(sum);
    if (sums.eigenvalues().minCoeff() < kBranchCutoff) continue;  // nothing feasible left
    const CMatrix fix = sums.eigenvectors() *
                        sums.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        sums.eigenvectors().adjoint();
    for (CMatrix& eff : effects) eff = fix * eff * fix;

    for (std::size_t k = 0; k < effects.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(effects[k]);
      const CMatrix root = es.eigenvectors() *
                           es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                           es.eigenvectors().adjoint();
      Eigen::JacobiSVD<CMatrix> polar(raw.ops[k], Eigen::ComputeFullU | Eigen::ComputeFullV);
      const CMatrix op = polar.matrixU() * polar.matrixV().adjoint() * root;

      std::vector<double> amp(static_cast<std::size_t>(n));
      std::vector<CVector> branch(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const Ket& phi = acting == Party::Alice ? e.states[static_cast<std::size_t>(i)].alice
                                                : e.states[static_cast<std::size_t>(i)].bob;
        CVector img = op * phi.amps;
        amp[static_cast<std::size_t>(i)] = img.norm();
        branch[static_cast<std::size_t>(i)] = img;
      }
      const auto [lo, hi] = std::minmax_element(amp.begin(), amp.end());
      report.max_weight_spread = std::max(report.max_weight_spread, *hi - *lo);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          if (amp[static_cast<std::size_t>(i)] <= kBranchCutoff ||
              amp[static_cast<std::size_t>(j)] <= kBranchCutoff)
            continue;
          const Ket& pi = acting == Party::Alice ? e.states[static_cast<std::size_t>(i)].alice
                                                 : e.states[static_cast<std::size_t>(i)].bob;
          const Ket& pj = acting == Party::Alice ? e.states[static_cast<std::size_t>(j)].alice
                                                 : e.states[static_cast<std::size_t>(j)].bob;
          const Complex wv = branch[static_cast<std::size_t>(i)].dot(
                                 branch[static_cast<std::size_t>(j)]) /
                             (amp[static_cast<std::size_t>(i)] * amp[static_cast<std::size_t>(j)]);
          const Complex expect = inner(pi, pj);
          report.max_overlap_deviation =
              std::max(report.max_overlap_deviation, std::abs(wv - expect));
        }
      }
    }
  }
  return report;
}

RelationReport check_generalized_relations(double theta, double gamma, int samples,
                                           std::uint64_t seed) {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2.0) ||
      !(gamma > 0.0 && gamma < std::numbers::pi / 2.0))
    throw std::invalid_argument(
        "check_generalized_relations: angles must lie strictly inside (0, pi/2)");
  if (samples < 1)
    throw std::invalid_argument("check_generalized_relations: samples must be positive");

  const double ct = std::cos(theta), st = std::sin(theta);
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  const Ket p1{1.0, 0.0, 0.0};
  const Ket p9{0.0, 1.0, 0.0};
  const Ket p3{0.0, 0.0, 1.0};
  const Ket p5{ct, st, 0.0};
  const Ket p6{st, -ct, 0.0};
  const Ket p7{0.0, cg, sg};
  const Ket p8{0.0, sg, -cg};

  const std::vector<LinearFunctional> constraints = {
      {p1, p9}, {p5, p6}, {p3, p9}, {p7, p8}};
  const std::vector<HermitianOp> basis = hermitian_nullspace(constraints, 3);

  const double c2t = std::cos(2.0 * theta);
  const double c2g = std::cos(2.0 * gamma);
  const auto expect = [](const Ket& k, const CMatrix& m) {
    return (k.amps.adjoint() * m * k.amps)(0).real();
  };

  RelationReport report;
  report.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    CMatrix eff = CMatrix::Zero(3, 3);
    for (const HermitianOp& b : basis) eff += coef(rng) * b.entries;
    // shift to a positive effect; all checked quantities are differences of
    // expectations, so the shift drops out
    Eigen::SelfAdjointEigenSolver<CMatrix> es(eff, Eigen::EigenvaluesOnly);
    const double lift = 0.1 - std::min(0.0, es.eigenvalues().minCoeff());
    eff += lift * CMatrix::Identity(3, 3);

    const double w1 = expect(p1, eff), w3 = expect(p3, eff), w9 = expect(p9, eff);
    const double w5 = expect(p5, eff), w6 = expect(p6, eff);
    const double w7 = expect(p7, eff), w8 = expect(p8, eff);
    const double r1 = std::abs((w1 - w9) - c2t * (w5 - w6));
    const double r2 = std::abs((w5 - w6) - c2t * (w1 - w9));
    const double r3 = std::abs((w9 - w3) - c2g * (w7 - w8));
    const double r4 = std::abs((w7 - w8) - c2g * (w9 - w3));
    report.max_relation_residual =
        std::max({report.max_relation_residual, r1, r2, r3, r4});
    report.max_forced_equality_residual = std::max(
        {report.max_forced_equality_residual, std::abs(w1 - w9), std::abs(w9 - w3)});
  }
  return report;
}

ParallelogramReport verify_parallelogram(int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("verify_parallelogram: trials must be positive");
  ParallelogramReport report;
  report.trials = trials;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr double kSqrtHalf = 0.7071067811865476;

  for (int t = 0; t < trials; ++t) {
    const int dim = 2 + static_cast<int>(rng() % 3);
    const auto random_ket = [&] {
      CVector v(dim);
      for (int i = 0; i < dim; ++i) v[i] = Complex(gauss(rng), gauss(rng));
      return Ket(v / v.norm());
    };
    Ket w1 = random_ket();
    Ket w2 = random_ket();
    double a1 = unif(rng);
    double a2 = unif(rng);
    if (t % 13 == 5) a2 = 0.0;                       // vanishing second branch
    if (t % 17 == 3) { w2 = w1; a2 = a1; }           // colinear equal branches

    const CVector v3 = (a1 * w1.amps + a2 * w2.amps) * kSqrtHalf;
    const CVector v4 = (a1 * w1.amps - a2 * w2.amps) * kSqrtHalf;
    const double a3 = v3.norm(), a4 = v4.norm();
    const Ket w3 = a3 > kBranchCutoff ? Ket(v3 / a3) : Ket::zero(dim);
    const Ket w4 = a4 > kBranchCutoff ? Ket(v4 / a4) : Ket::zero(dim);

    const double cross12 =
        (a1 > kBranchCutoff && a2 > kBranchCutoff) ? inner(w1, w2).real() : 0.0;
    const double cross34 =
        (a3 > kBranchCutoff && a4 > kBranchCutoff) ? inner(w3, w4).real() : 0.0;
    const double s12 = a1 * a1 + a2 * a2;
    const double s34 = a3 * a3 + a4 * a4;
    const double i1 = std::abs(a1 * a1 - 0.5 * (s34 + 2.0 * a3 * a4 * cross34));
    const double i2 = std::abs(a2 * a2 - 0.5 * (s34 - 2.0 * a3 * a4 * cross34));
    const double i3 = std::abs(a3 * a3 - 0.5 * (s12 + 2.0 * a1 * a2 * cross12));
    const double i4 = std::abs(a4 * a4 - 0.5 * (s12 - 2.0 * a1 * a2 * cross12));
    report.max_residual = std::max({report.max_residual, i1, i2, i3, i4});
  }
  return report;
}

}  // namespace locc
