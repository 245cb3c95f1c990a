#include "locc/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace locc {

namespace {

constexpr double kPi = std::numbers::pi;

//============================================================================
// Bob-side class structure: connected components of the passive-overlap
// graph.  Components are at most pairs for every supported ensemble; Bob can
// resolve components perfectly (their spans are mutually orthogonal) and
// needs a two-state minimum-error measurement inside a pair.
//============================================================================

struct BobClasses {
  std::vector<std::vector<int>> members;        // 1-based labels, ascending
  std::vector<double> pair_overlap;             // |<psi_i|psi_j>| for pairs, 0 else
};

BobClasses bob_classes(const ProductEnsemble& e) {
  const int n = e.size();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  const auto pairs = bob_overlap_pairs(e);
  // union-find, tiny n
  std::vector<int> parent(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (const OverlapPair& p : pairs)
    parent[static_cast<std::size_t>(find(p.i - 1))] = find(p.j - 1);
  BobClasses c;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (comp[static_cast<std::size_t>(root)] < 0) {
      comp[static_cast<std::size_t>(root)] = static_cast<int>(c.members.size());
      c.members.emplace_back();
    }
    c.members[static_cast<std::size_t>(comp[static_cast<std::size_t>(root)])].push_back(i + 1);
  }
  for (const std::vector<int>& m : c.members)
    if (m.size() > 2)
      throw std::invalid_argument(
          "unsupported ensemble: a group of >2 states is mutually nonorthogonal on "
          "the passive side");
  c.pair_overlap.assign(c.members.size(), 0.0);
  for (std::size_t k = 0; k < c.members.size(); ++k)
    if (c.members[k].size() == 2)
      c.pair_overlap[k] = std::abs(
          inner(e.state(c.members[k][0]).bob, e.state(c.members[k][1]).bob));
  return c;
}

// Minimum-error two-state measurement between normalized kets with priors
// (qa, qb); returns per-state success probabilities.  The first argument is
// the tie winner (lower label).
std::pair<double, double> helstrom_pair_success(double qa, double qb, const Ket& sa,
                                                const Ket& sb) {
  const Complex c = inner(sa, sb);
  const double s2 = std::max(0.0, 1.0 - std::norm(c));
  if (s2 < 1e-28) {
    // states coincide: winner takes all, ties to the first
    return qa >= qb ? std::make_pair(1.0, 0.0) : std::make_pair(0.0, 1.0);
  }
  const double s = std::sqrt(s2);
  // orthonormal frame {sa, (sb - c*sa)/s}; sb = (c, s)
  Eigen::Matrix2cd d;
  d(0, 0) = qa - qb * std::norm(c);
  d(0, 1) = -qb * c * s;
  d(1, 0) = -qb * std::conj(c) * s;
  d(1, 1) = -qb * s2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(d);
  Eigen::Matrix2cd proj = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 2; ++i)
    if (es.eigenvalues()[i] >= 0.0)  // zero modes guess toward the first state
      proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  Eigen::Vector2cd va(1.0, 0.0), vb(c, s);
  const double pa = (va.adjoint() * proj * va)(0).real();
  const double pb = (vb.adjoint() * (Eigen::Matrix2cd::Identity() - proj) * vb)(0).real();
  return {pa, pb};
}

// Average success of the best Bob response to a fixed Alice measurement.
// Fills per-state successes.
double class_objective(const ProductEnsemble& e, const BobClasses& classes,
                       const KrausSet& alice, std::vector<double>* per_state) {
  const int n = e.size();
  std::vector<double> succ(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < alice.outcomes(); ++k) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      w[static_cast<std::size_t>(i)] = (alice.ops[static_cast<std::size_t>(k)] *
                                        e.states[static_cast<std::size_t>(i)].alice.amps)
                                           .squaredNorm();
    for (std::size_t g = 0; g < classes.members.size(); ++g) {
      const std::vector<int>& m = classes.members[g];
      if (m.size() == 1) {
        succ[static_cast<std::size_t>(m[0] - 1)] += w[static_cast<std::size_t>(m[0] - 1)];
        continue;
      }
      const double wi = w[static_cast<std::size_t>(m[0] - 1)];
      const double wj = w[static_cast<std::size_t>(m[1] - 1)];
      const double tot = wi + wj;
      if (tot <= kBranchCutoff) continue;
      const auto [pi, pj] = helstrom_pair_success(wi / tot, wj / tot, e.state(m[0]).bob,
                                                  e.state(m[1]).bob);
      succ[static_cast<std::size_t>(m[0] - 1)] += wi * pi;
      succ[static_cast<std::size_t>(m[1] - 1)] += wj * pj;
    }
  }
  double avg = 0.0;
  for (double v : succ) avg += v;
  avg /= n;
  if (per_state) *per_state = std::move(succ);
  return avg;
}

//============================================================================
// Four-state family detection and weight parametrization
//============================================================================

bool is_four_family(const ProductEnsemble& e) {
  if (e.size() != 4 || e.dim_a != 2 || e.dim_b != 2) return false;
  const double shared12 = std::abs(inner(e.state(1).bob, e.state(2).bob));
  const double shared34 = std::abs(inner(e.state(3).bob, e.state(4).bob));
  const double cross = std::abs(inner(e.state(1).bob, e.state(3).bob));
  return shared12 > 1.0 - 1e-9 && shared34 > 1.0 - 1e-9 && cross < kBranchCutoff;
}

std::vector<EstimationParametrization> four_family_parameters(const ProductEnsemble& e,
                                                              const KrausSet& alice) {
  std::vector<EstimationParametrization> out;
  out.reserve(static_cast<std::size_t>(alice.outcomes()));
  for (int k = 0; k < alice.outcomes(); ++k) {
    double w[4];
    for (int i = 0; i < 4; ++i)
      w[i] = (alice.ops[static_cast<std::size_t>(k)] * e.state(i + 1).alice.amps).squaredNorm();
    EstimationParametrization p;
    p.gamma_weight = (w[0] + w[1] + w[2] + w[3]) / 4.0;
    p.epsilon = (w[0] + w[1]) > kBranchCutoff ? (w[0] - w[1]) / (w[0] + w[1]) : 0.0;
    p.delta = (w[2] + w[3]) > kBranchCutoff ? (w[2] - w[3]) / (w[2] + w[3]) : 0.0;
    out.push_back(p);
  }
  return out;
}

//============================================================================
// Deterministic downhill simplex (maximization)
//============================================================================

struct SimplexResult {
  Eigen::VectorXd best;
  double value = 0.0;
  long long evaluations = 0;
};

SimplexResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& f,
                              const Eigen::VectorXd& start, double step,
                              long long max_evals) {
  const int n = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(n + 1), start);
  std::vector<double> v(static_cast<std::size_t>(n + 1));
  long long evals = 0;
  for (int i = 1; i <= n; ++i) x[static_cast<std::size_t>(i)][i - 1] += step;
  for (int i = 0; i <= n; ++i) {
    v[static_cast<std::size_t>(i)] = f(x[static_cast<std::size_t>(i)]);
    ++evals;
  }
  std::vector<int> order(static_cast<std::size_t>(n + 1));
  while (evals < max_evals) {
    for (int i = 0; i <= n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return v[static_cast<std::size_t>(a)] > v[static_cast<std::size_t>(b)];
    });
    const int best = order[0], worst = order[static_cast<std::size_t>(n)];
    const int second_worst = order[static_cast<std::size_t>(n - 1)];
    double diam = 0.0;
    for (int i = 1; i <= n; ++i)
      diam = std::max(diam, (x[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] -
                             x[static_cast<std::size_t>(best)])
                                .norm());
    if (v[static_cast<std::size_t>(best)] - v[static_cast<std::size_t>(worst)] < 1e-13 &&
        diam < kConvergenceTol)
      break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += x[static_cast<std::size_t>(i)];
    centroid /= n;
    const Eigen::VectorXd refl = centroid + (centroid - x[static_cast<std::size_t>(worst)]);
    const double vr = f(refl);
    ++evals;
    if (vr > v[static_cast<std::size_t>(best)]) {
      const Eigen::VectorXd expd = centroid + 2.0 * (centroid - x[static_cast<std::size_t>(worst)]);
      const double ve = f(expd);
      ++evals;
      if (ve > vr) {
        x[static_cast<std::size_t>(worst)] = expd;
        v[static_cast<std::size_t>(worst)] = ve;
      } else {
        x[static_cast<std::size_t>(worst)] = refl;
        v[static_cast<std::size_t>(worst)] = vr;
      }
    } else if (vr > v[static_cast<std::size_t>(second_worst)]) {
      x[static_cast<std::size_t>(worst)] = refl;
      v[static_cast<std::size_t>(worst)] = vr;
    } else {
      const Eigen::VectorXd contr =
          centroid + 0.5 * (x[static_cast<std::size_t>(worst)] - centroid);
      const double vc = f(contr);
      ++evals;
      if (vc > v[static_cast<std::size_t>(worst)]) {
        x[static_cast<std::size_t>(worst)] = contr;
        v[static_cast<std::size_t>(worst)] = vc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          x[static_cast<std::size_t>(i)] =
              x[static_cast<std::size_t>(best)] +
              0.5 * (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(best)]);
          v[static_cast<std::size_t>(i)] = f(x[static_cast<std::size_t>(i)]);
          ++evals;
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  return {x[static_cast<std::size_t>(best)], v[static_cast<std::size_t>(best)], evals};
}

double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - (b - a) * inv_phi;
  double d = a + (b - a) * inv_phi;
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * inv_phi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * inv_phi;
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

}  // namespace

//============================================================================
// Protocol validation and exact simulation
//============================================================================

void validate_protocol(const OneWayProtocol& p, int dim_a, int dim_b) {
  if (p.alice.dim != dim_a)
    throw std::invalid_argument("protocol: Alice dimension mismatch (" +
                                std::to_string(p.alice.dim) + " vs " + std::to_string(dim_a) +
                                ")");
  require_complete(p.alice, "protocol");
  if (static_cast<int>(p.outcomes.size()) != p.alice.outcomes())
    throw std::invalid_argument("protocol: one Bob strategy per Alice outcome required");
  for (const BobStrategy& s : p.outcomes) {
    if (static_cast<int>(s.basis.size()) != dim_b)
      throw std::invalid_argument("protocol: Bob basis must have " + std::to_string(dim_b) +
                                  " vectors");
    for (const Ket& k : s.basis) {
      if (k.dim() != dim_b) throw std::invalid_argument("protocol: Bob dimension mismatch");
      require_normalized(k, "protocol Bob basis");
    }
    for (std::size_t i = 0; i < s.basis.size(); ++i)
      for (std::size_t j = i + 1; j < s.basis.size(); ++j)
        if (std::abs(inner(s.basis[i], s.basis[j])) > kInvariantTol)
          throw std::invalid_argument("protocol: Bob basis not orthogonal");
    if (s.guesses.size() != s.basis.size())
      throw std::invalid_argument("protocol: one guess slot per Bob outcome required");
  }
}

EstimationResult simulate_one_way(const ProductEnsemble& e, const OneWayProtocol& p) {
  validate_protocol(p, e.dim_a, e.dim_b);
  const int n = e.size();
  for (const BobStrategy& s : p.outcomes)
    for (int g : s.guesses)
      if (g < 0 || g > n)
        throw std::invalid_argument("protocol: guess label out of range: " + std::to_string(g));

  EstimationResult r;
  r.per_state_success.assign(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < p.alice.outcomes(); ++k) {
    const BobStrategy& strat = p.outcomes[static_cast<std::size_t>(k)];
    for (std::size_t b = 0; b < strat.basis.size(); ++b) {
      double joint_weight = 0.0;
      for (int i = 0; i < n; ++i) {
        const Branch br = apply_kraus(p.alice, k, e.states[static_cast<std::size_t>(i)].alice);
        const double wa = br.amplitude * br.amplitude;
        const double wb =
            std::norm(inner(strat.basis[b], e.states[static_cast<std::size_t>(i)].bob));
        joint_weight += e.prior() * wa * wb;
        if (strat.guesses[b] == i + 1) r.per_state_success[static_cast<std::size_t>(i)] += wa * wb;
      }
      if (joint_weight > kBranchCutoff && strat.guesses[b] == 0)
        throw std::invalid_argument("protocol: no guess assigned to occurring outcome pair (" +
                                    std::to_string(k) + ", " + std::to_string(b) + ")");
    }
  }
  double avg = 0.0;
  for (double v : r.per_state_success) avg += v;
  r.average_success = avg / n;
  return r;
}

//============================================================================
// Named protocols
//============================================================================

OneWayProtocol chi_basis_protocol() {
  const double s8 = std::sin(kPi / 8.0), c8 = std::cos(kPi / 8.0);
  const Ket chi1{s8, c8};
  const Ket chi2{c8, -s8};
  OneWayProtocol p;
  p.alice.dim = 2;
  p.alice.ops.push_back(chi1.amps * chi1.amps.adjoint());
  p.alice.ops.push_back(chi2.amps * chi2.amps.adjoint());
  const std::vector<Ket> comp = {Ket{1.0, 0.0}, Ket{0.0, 1.0}};
  p.outcomes.push_back({comp, {2, 3}});
  p.outcomes.push_back({comp, {1, 4}});
  return p;
}

OneWayProtocol projective_protocol(const ProductEnsemble& e, double angle) {
  if (e.dim_a != 2)
    throw std::invalid_argument("projective_protocol: Alice dimension must be 2");
  const double c = std::cos(angle), s = std::sin(angle);
  const Ket u1{c, s}, u2{-s, c};
  OneWayProtocol p;
  p.alice.dim = 2;
  p.alice.ops.push_back(u1.amps * u1.amps.adjoint());
  p.alice.ops.push_back(u2.amps * u2.amps.adjoint());
  std::vector<Ket> comp;
  for (int b = 0; b < e.dim_b; ++b) comp.push_back(Ket::basis(e.dim_b, b));
  for (int k = 0; k < 2; ++k) {
    BobStrategy strat;
    strat.basis = comp;
    strat.guesses.assign(static_cast<std::size_t>(e.dim_b), 0);
    for (int b = 0; b < e.dim_b; ++b) {
      double total = 0.0, best_w = -1.0;
      int best = 0;
      for (int i = 0; i < e.size(); ++i) {
        const BipartiteProductState& st = e.states[static_cast<std::size_t>(i)];
        const double wb = std::norm(inner(comp[static_cast<std::size_t>(b)], st.bob));
        if (wb <= kBranchCutoff) continue;
        const double wa = (p.alice.ops[static_cast<std::size_t>(k)] * st.alice.amps).squaredNorm();
        total += wa * wb;
        if (wa > best_w) {  // ties stay with the lower label
          best_w = wa;
          best = i + 1;
        }
      }
      if (total > kBranchCutoff) strat.guesses[static_cast<std::size_t>(b)] = best;
    }
    p.outcomes.push_back(std::move(strat));
  }
  return p;
}

EstimationResult guess_probability_projective(const ProductEnsemble& e, double angle) {
  OneWayProtocol p = projective_protocol(e, angle);
  EstimationResult r = simulate_one_way(e, p);
  if (is_four_family(e)) r.outcome_parameters = four_family_parameters(e, p.alice);
  return r;
}

double analytic_p(double epsilon, double overlap) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("analytic_p: epsilon must lie in [0, 1]");
  if (overlap < -1.0 || overlap > 1.0)
    throw std::invalid_argument("analytic_p: overlap must lie in [-1, 1]");
  return (2.0 + epsilon + std::sqrt(1.0 - epsilon * epsilon) * overlap) / 4.0;
}

void validate_parametrization(const EstimationParametrization& p) {
  if (p.gamma_weight < -kInvariantTol)
    throw std::invalid_argument("parametrization: negative outcome weight");
  if (std::abs(p.epsilon) > 1.0 + kInvariantTol || std::abs(p.delta) > 1.0 + kInvariantTol)
    throw std::invalid_argument("parametrization: weight reconstruction would go negative");
}

//============================================================================
// Optimizers
//============================================================================

ProjectiveOptimum optimize_projective(const ProductEnsemble& e) {
  const auto value = [&](double t) { return simulate_one_way(e, projective_protocol(e, t)).average_success; };
  const int grid_n = 720;
  const double step = kPi / grid_n;
  std::vector<double> grid_vals(grid_n);
  double best_grid = -1.0;
  for (int i = 0; i < grid_n; ++i) {
    grid_vals[static_cast<std::size_t>(i)] = value(i * step);
    best_grid = std::max(best_grid, grid_vals[static_cast<std::size_t>(i)]);
  }

  // refine every grid maximum within tolerance of the best, then keep the
  // co-optimal set
  struct Candidate {
    double angle;
    double val;
  };
  std::vector<Candidate> refined;
  for (int i = 0; i < grid_n; ++i) {
    if (grid_vals[static_cast<std::size_t>(i)] < best_grid - kConvergenceTol) continue;
    const double t = golden_max(value, i * step - step, i * step + step, kConvergenceTol);
    refined.push_back({t, value(t)});
  }
  double best_val = -1.0;
  for (const Candidate& c : refined) best_val = std::max(best_val, c.val);

  // reduce mod pi/2 (identical unordered basis); reflect into [0, pi/4] only
  // when the reflected angle attains the same value
  const auto canonical = [&](double t) {
    double r = std::fmod(t, kPi / 2.0);
    if (r < 0.0) r += kPi / 2.0;
    if (r > kPi / 4.0) {
      const double mirrored = kPi / 2.0 - r;
      if (std::abs(value(mirrored) - value(r)) <= 10.0 * kInvariantTol) r = mirrored;
    }
    return r;
  };

  ProjectiveOptimum opt;
  std::vector<double> canon;
  for (const Candidate& c : refined) {
    if (c.val < best_val - kConvergenceTol) continue;
    canon.push_back(canonical(c.angle));
  }
  std::sort(canon.begin(), canon.end());
  for (double t : canon) {
    if (!opt.co_optimal_angles.empty() && t - opt.co_optimal_angles.back() < 1e-6) continue;
    opt.co_optimal_angles.push_back(t);
  }
  opt.best_angle = opt.co_optimal_angles.front();
  // among co-optimal canonical angles prefer the one of maximal value (they
  // agree within tolerance; re-evaluate for the exact report)
  for (double t : opt.co_optimal_angles)
    if (value(t) > value(opt.best_angle) + 1e-15) opt.best_angle = t;
  opt.estimate = guess_probability_projective(e, opt.best_angle);
  return opt;
}

PovmSearchResult optimize_povm(const ProductEnsemble& e, int outcomes, int restarts,
                               std::uint64_t seed) {
  if (outcomes < 2) throw std::invalid_argument("optimize_povm: need at least 2 outcomes");
  if (restarts < 1) throw std::invalid_argument("optimize_povm: need at least 1 restart");
  const BobClasses classes = bob_classes(e);
  const int d = e.dim_a;
  const int n_params = 2 * outcomes * d * d;

  const auto build = [&](const Eigen::VectorXd& x) {
    KrausSet k;
    k.dim = d;
    k.ops.reserve(static_cast<std::size_t>(outcomes));
    int idx = 0;
    for (int m = 0; m < outcomes; ++m) {
      CMatrix op(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          op(r, c) = Complex(x[idx], x[idx + 1]);
          idx += 2;
        }
      k.ops.push_back(std::move(op));
    }
    CMatrix gram = CMatrix::Zero(d, d);
    for (const CMatrix& op : k.ops) gram += op.adjoint() * op;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-14);
    CMatrix inv_sqrt = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().adjoint();
    for (CMatrix& op : k.ops) op = op * inv_sqrt;
    return k;
  };

  long long evals = 0;
  const auto objective = [&](const Eigen::VectorXd& x) {
    ++evals;
    return class_objective(e, classes, build(x), nullptr);
  };

  Eigen::VectorXd global_best;
  double global_val = -1.0;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(r) + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd start(n_params);
    double start_val = -1.0;
    for (int draw = 0; draw < 24; ++draw) {
      Eigen::VectorXd x(n_params);
      for (int i = 0; i < n_params; ++i) x[i] = gauss(rng);
      const double v = objective(x);
      if (v > start_val) {
        start_val = v;
        start = x;
      }
    }
    SimplexResult coarse = nelder_mead_max(objective, start, 0.35, 2500);
    SimplexResult fine = nelder_mead_max(objective, coarse.best, 5e-4, 1200);
    if (fine.value > global_val) {
      global_val = fine.value;
      global_best = fine.best;
    }
  }

  PovmSearchResult out;
  out.alice = build(global_best);
  require_complete(out.alice, "optimize_povm");
  out.estimate.average_success = class_objective(e, classes, out.alice,
                                                 &out.estimate.per_state_success);
  if (is_four_family(e)) out.estimate.outcome_parameters = four_family_parameters(e, out.alice);
  out.evaluations = evals;
  return out;
}

double helstrom_two_pure(double q1, double q2, double overlap_mod) {
  if (q1 < 0.0 || q2 < 0.0 || std::abs(q1 + q2 - 1.0) > kInvariantTol)
    throw std::invalid_argument("helstrom_two_pure: priors must be nonnegative and sum to 1");
  if (overlap_mod < 0.0 || overlap_mod > 1.0)
    throw std::invalid_argument("helstrom_two_pure: overlap magnitude must lie in [0, 1]");
  return 0.5 * (1.0 + std::sqrt(1.0 - 4.0 * q1 * q2 * overlap_mod * overlap_mod));
}

//============================================================================
// Protocol file IO
//============================================================================

namespace {

using json = nlohmann::ordered_json;

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& rows, int dim, const std::string& where) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
    throw std::runtime_error(where + ": expected " + std::to_string(dim) + " rows");
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw std::runtime_error(where + ": row " + std::to_string(r) + " malformed");
    for (int c = 0; c < dim; ++c) {
      const json& pair = row[static_cast<std::size_t>(c)];
      if (!pair.is_array() || pair.size() != 2)
        throw std::runtime_error(where + ": entry is not a (re, im) pair");
      m(r, c) = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
  }
  return m;
}

json ket_to_json(const Ket& k) {
  json arr = json::array();
  for (int i = 0; i < k.dim(); ++i)
    arr.push_back(json::array({k.amps[i].real(), k.amps[i].imag()}));
  return arr;
}

Ket ket_from_json(const json& arr, int dim, const std::string& where) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
    throw std::runtime_error(where + ": expected " + std::to_string(dim) + " amplitudes");
  Ket k = Ket::zero(dim);
  for (int i = 0; i < dim; ++i) {
    const json& pair = arr[static_cast<std::size_t>(i)];
    if (!pair.is_array() || pair.size() != 2)
      throw std::runtime_error(where + ": amplitude is not a (re, im) pair");
    k.amps[i] = Complex(pair[0].get<double>(), pair[1].get<double>());
  }
  return k;
}

}  // namespace

OneWayProtocol load_protocol(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open protocol file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw std::runtime_error("malformed protocol file " + path + ": " + err.what());
  }
  if (!doc.is_object() || doc.value("format", "") != "loccsim-protocol")
    throw std::runtime_error(path + ": missing format tag \"loccsim-protocol\"");
  const int da = doc.at("d_a").get<int>();
  const int db = doc.at("d_b").get<int>();
  if (da < 1 || db < 1) throw std::runtime_error(path + ": dimensions must be positive");
  OneWayProtocol p;
  p.alice.dim = da;
  for (const json& m : doc.at("alice_kraus"))
    p.alice.ops.push_back(matrix_from_json(m, da, path + " (alice_kraus)"));
  for (const json& o : doc.at("outcomes")) {
    BobStrategy s;
    for (const json& b : o.at("bob_basis"))
      s.basis.push_back(ket_from_json(b, db, path + " (bob_basis)"));
    for (const json& g : o.at("guesses")) s.guesses.push_back(g.get<int>());
    p.outcomes.push_back(std::move(s));
  }
  validate_protocol(p, da, db);
  return p;
}

void save_protocol(const OneWayProtocol& p, const std::string& path) {
  const int db = p.outcomes.empty() ? 0 : static_cast<int>(p.outcomes.front().basis.size());
  json doc;
  doc["format"] = "loccsim-protocol";
  doc["d_a"] = p.alice.dim;
  doc["d_b"] = db;
  doc["alice_kraus"] = json::array();
  for (const CMatrix& m : p.alice.ops) doc["alice_kraus"].push_back(matrix_to_json(m));
  doc["outcomes"] = json::array();
  for (const BobStrategy& s : p.outcomes) {
    json o;
    o["bob_basis"] = json::array();
    for (const Ket& k : s.basis) o["bob_basis"].push_back(ket_to_json(k));
    o["guesses"] = s.guesses;
    doc["outcomes"].push_back(std::move(o));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write protocol file: " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace locc
