#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "locc/discrimination.hpp"

using namespace locc;

namespace {

constexpr double kPi = std::numbers::pi;
const double kBound = 0.5 + 0.5 / std::sqrt(2.0);  // 0.85355339059327...

// independently derived value of the projective family on the one-angle
// ensembles: average success at Alice angle t equals
//   1/2 + (|cos 2t| + |cos 2(t - theta)|) / 4
double closed_form(double theta, double t) {
  return 0.5 + (std::abs(std::cos(2.0 * t)) + std::abs(std::cos(2.0 * (t - theta)))) / 4.0;
}

double grid_max(const ProductEnsemble& e, int steps) {
  double best = 0.0;
  for (int i = 0; i < steps; ++i)
    best = std::max(best,
                    guess_probability_projective(e, kPi * i / steps).average_success);
  return best;
}

}  // namespace

TEST_CASE("the rotated-pair protocol attains the bound on every state") {
  const EstimationResult r = simulate_one_way(four_state(), chi_basis_protocol());
  REQUIRE(r.per_state_success.size() == 4);
  for (double v : r.per_state_success) CHECK(std::abs(v - kBound) < 1e-12);
  CHECK(std::abs(r.average_success - kBound) < 1e-12);
}

TEST_CASE("computational-basis measurement resolves one pair and guesses the other") {
  const EstimationResult r = guess_probability_projective(four_state(), 0.0);
  REQUIRE(r.per_state_success.size() == 4);
  CHECK(r.per_state_success[0] == 1.0);
  CHECK(r.per_state_success[1] == 1.0);
  // the superposed pair is at chance: its two members split the two cells
  CHECK(std::abs(r.per_state_success[2] - 0.5) < 1e-12);
  CHECK(std::abs(r.per_state_success[3] - 0.5) < 1e-12);
  CHECK(std::abs(r.average_success - 0.75) < 1e-15);
}

TEST_CASE("simulated projective family matches the closed form everywhere") {
  for (double theta : {kPi / 4.0, kPi / 3.0, 0.5, 1.0, 1.3}) {
    const ProductEnsemble e = four_state_general(theta);
    for (int i = 0; i < 40; ++i) {
      const double t = kPi * i / 40.0;
      const EstimationResult r = guess_probability_projective(e, t);
      CHECK(std::abs(r.average_success - closed_form(theta, t)) < 1e-10);
      for (double v : r.per_state_success) {
        CHECK(v >= -1e-15);
        CHECK(v <= 1.0 + 1e-15);
      }
    }
  }
}

TEST_CASE("projective value is invariant under angle and outcome relabeling") {
  const ProductEnsemble e = four_state();
  for (int i = 1; i <= 9; ++i) {
    const double t = 0.31 * i;
    const double a = guess_probability_projective(e, t).average_success;
    const double b = guess_probability_projective(e, t + kPi / 2.0).average_success;
    CHECK(std::abs(a - b) < 1e-12);

    OneWayProtocol p = projective_protocol(e, t);
    std::swap(p.alice.ops[0], p.alice.ops[1]);
    std::swap(p.outcomes[0], p.outcomes[1]);
    const EstimationResult swapped = simulate_one_way(e, p);
    CHECK(std::abs(swapped.average_success - a) < 1e-12);
  }
}

TEST_CASE("optimizer recovers the symmetric optimum") {
  const ProjectiveOptimum opt = optimize_projective(four_state());
  CHECK(std::abs(opt.estimate.average_success - kBound) < 1e-9);
  CHECK(std::abs(opt.best_angle - kPi / 8.0) < 1e-6);
  REQUIRE(!opt.co_optimal_angles.empty());
  REQUIRE(opt.estimate.outcome_parameters.size() == 2);
  for (const EstimationParametrization& p : opt.estimate.outcome_parameters) {
    CHECK(std::abs(p.gamma_weight - 0.5) < 1e-9);
    CHECK(std::abs(std::abs(p.epsilon) - 1.0 / std::sqrt(2.0)) < 1e-6);
    CHECK(std::abs(std::abs(p.delta) - 1.0 / std::sqrt(2.0)) < 1e-6);
    validate_parametrization(p);
  }
}

TEST_CASE("optimizer beats an exhaustive grid on a skewed family") {
  const double theta = kPi / 3.0;
  const ProductEnsemble e = four_state_general(theta);
  const double brute = grid_max(e, 100000);
  const ProjectiveOptimum opt = optimize_projective(e);
  CHECK(opt.estimate.average_success >= brute - 1e-12);
  CHECK(opt.estimate.average_success - brute < 1e-8);
  // skewed optimum: value 1/2 + sqrt(3)/4 at angle 5 pi / 12
  CHECK(std::abs(opt.estimate.average_success - (0.5 + std::sqrt(3.0) / 4.0)) < 1e-9);
  CHECK(std::abs(opt.best_angle - 5.0 * kPi / 12.0) < 1e-6);
}

TEST_CASE("optimizer reports a locally distinguishable ensemble as perfect") {
  const ProjectiveOptimum opt = optimize_projective(computational(2, 2));
  CHECK(std::abs(opt.estimate.average_success - 1.0) < 1e-12);
  CHECK(opt.estimate.outcome_parameters.empty());
}

TEST_CASE("closed-form single-outcome success evaluates and gates its domain") {
  CHECK(std::abs(analytic_p(1.0 / std::sqrt(2.0), 1.0) - kBound) < 1e-12);
  CHECK(analytic_p(1.0, 0.31) == 0.75);
  CHECK(analytic_p(0.0, 0.0) == 0.5);
  CHECK_THROWS_AS(analytic_p(1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(analytic_p(0.5, -1.01), std::invalid_argument);
}

TEST_CASE("per-outcome parameters reconstruct the simulated average") {
  const ProductEnsemble e = four_state();
  for (int i = 0; i < 25; ++i) {
    const double t = kPi * (i + 0.31) / 25.0;
    const OneWayProtocol p = projective_protocol(e, t);
    const EstimationResult sim = simulate_one_way(e, p);

    double rebuilt = 0.0;
    for (int k = 0; k < p.alice.outcomes(); ++k) {
      const Branch b1 = apply_kraus(p.alice, k, e.state(1).alice);
      const Branch b2 = apply_kraus(p.alice, k, e.state(2).alice);
      const double w1 = b1.amplitude * b1.amplitude;
      const double w2 = b2.amplitude * b2.amplitude;
      if (w1 + w2 < 1e-15) continue;
      const double gamma = (w1 + w2) / 2.0;
      const double eps = std::min(1.0, std::abs((w1 - w2) / (w1 + w2)));
      const double ov = std::min(1.0, std::abs(inner(b1.vector, b2.vector).real()));
      rebuilt += gamma * analytic_p(eps, ov);
    }
    CHECK(std::abs(rebuilt - sim.average_success) < 1e-10);
  }
}

TEST_CASE("superposed-pair split follows the rotation relation") {
  // branches of the rotated pair are fixed by those of the basis pair:
  //   delta = cos(2 theta) eps + sin(2 theta) sqrt(1 - eps^2) Re<w1|w2>
  for (double theta : {kPi / 4.0, kPi / 3.0, 0.8, 1.2}) {
    const ProductEnsemble e = four_state_general(theta);
    for (int i = 0; i < 20; ++i) {
      const double t = kPi * (i + 0.17) / 20.0;
      const OneWayProtocol p = projective_protocol(e, t);
      for (int k = 0; k < p.alice.outcomes(); ++k) {
        const Branch b1 = apply_kraus(p.alice, k, e.state(1).alice);
        const Branch b2 = apply_kraus(p.alice, k, e.state(2).alice);
        const Branch b3 = apply_kraus(p.alice, k, e.state(3).alice);
        const Branch b4 = apply_kraus(p.alice, k, e.state(4).alice);
        const double w1 = b1.amplitude * b1.amplitude;
        const double w2 = b2.amplitude * b2.amplitude;
        const double w3 = b3.amplitude * b3.amplitude;
        const double w4 = b4.amplitude * b4.amplitude;
        if (w1 + w2 < 1e-15) continue;
        const double eps = (w1 - w2) / (w1 + w2);
        const double delta = (w3 - w4) / (w3 + w4);
        const double ov = inner(b1.vector, b2.vector).real();
        const double predicted =
            std::cos(2.0 * theta) * eps +
            std::sin(2.0 * theta) * std::sqrt(std::max(0.0, 1.0 - eps * eps)) * ov;
        CHECK(std::abs(delta - predicted) < 1e-10);
      }
    }
  }
}

TEST_CASE("reported outcome parameters match their defining weights") {
  const ProductEnsemble e = four_state_general(1.1);
  const EstimationResult r = guess_probability_projective(e, 0.4);
  REQUIRE(r.outcome_parameters.size() == 2);
  double gamma_total = 0.0;
  const OneWayProtocol p = projective_protocol(e, 0.4);
  for (int k = 0; k < 2; ++k) {
    const EstimationParametrization& q = r.outcome_parameters[static_cast<std::size_t>(k)];
    validate_parametrization(q);
    gamma_total += q.gamma_weight;
    const Branch b1 = apply_kraus(p.alice, k, e.state(1).alice);
    const Branch b2 = apply_kraus(p.alice, k, e.state(2).alice);
    const Branch b3 = apply_kraus(p.alice, k, e.state(3).alice);
    const Branch b4 = apply_kraus(p.alice, k, e.state(4).alice);
    const double w1 = b1.amplitude * b1.amplitude, w2 = b2.amplitude * b2.amplitude;
    const double w3 = b3.amplitude * b3.amplitude, w4 = b4.amplitude * b4.amplitude;
    CHECK(std::abs(q.gamma_weight * (1.0 + q.epsilon) - w1) < 1e-12);
    CHECK(std::abs(q.gamma_weight * (1.0 - q.epsilon) - w2) < 1e-12);
    CHECK(std::abs(q.gamma_weight * (1.0 + q.delta) - w3) < 1e-12);
    CHECK(std::abs(q.gamma_weight * (1.0 - q.delta) - w4) < 1e-12);
    // the two pairs carry the same total weight within an outcome
    CHECK(std::abs((w1 + w2) - (w3 + w4)) < 1e-12);
  }
  CHECK(std::abs(gamma_total - 1.0) < 1e-12);
}

TEST_CASE("parametrization gates reject out-of-range weights") {
  CHECK_THROWS_AS(validate_parametrization({-0.1, 0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_parametrization({0.5, 1.2, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_parametrization({0.5, 0.0, -1.2}), std::invalid_argument);
}

TEST_CASE("measurement search stays under the projective ceiling") {
  const ProductEnsemble e = four_state();
  const double ceiling = optimize_projective(e).estimate.average_success;

  const PovmSearchResult two = optimize_povm(e, 2, 4, 11);
  CHECK(std::abs(two.estimate.average_success - kBound) < 1e-6);
  CHECK(two.estimate.average_success <= ceiling + 1e-6);
  REQUIRE(two.estimate.outcome_parameters.size() == 2);

  const PovmSearchResult eight = optimize_povm(e, 8, 3, 5);
  CHECK(eight.estimate.average_success <= kBound + 1e-6);
  CHECK(eight.alice.completeness_residual() < 1e-10);

  const PovmSearchResult control = optimize_povm(computational(2, 2), 2, 4, 3);
  CHECK(std::abs(control.estimate.average_success - 1.0) < 1e-6);

  CHECK_THROWS_AS(optimize_povm(e, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(optimize_povm(e, 2, 0, 0), std::invalid_argument);
}

TEST_CASE("measurement search is deterministic per seed") {
  const ProductEnsemble e = four_state();
  const PovmSearchResult a = optimize_povm(e, 3, 2, 77);
  const PovmSearchResult b = optimize_povm(e, 3, 2, 77);
  CHECK(a.estimate.average_success == b.estimate.average_success);
  CHECK(a.evaluations == b.evaluations);
  REQUIRE(a.alice.outcomes() == b.alice.outcomes());
  for (int k = 0; k < a.alice.outcomes(); ++k) CHECK(a.alice.ops[k] == b.alice.ops[k]);
}

TEST_CASE("two-state minimum-error success against a brute-force grid") {
  CHECK(helstrom_two_pure(0.5, 0.5, 0.0) == 1.0);
  CHECK(helstrom_two_pure(0.5, 0.5, 1.0) == 0.5);
  CHECK(std::abs(helstrom_two_pure(0.5, 0.5, 1.0 / std::sqrt(2.0)) - kBound) < 1e-12);
  CHECK_THROWS_AS(helstrom_two_pure(0.6, 0.6, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(helstrom_two_pure(0.5, 0.5, 1.5), std::invalid_argument);

  // grid oracle: real states at angles 0 and acos(overlap), projective basis
  // at angle t guesses the first state on its first outcome
  for (auto [q1, ov] : std::vector<std::pair<double, double>>{
           {0.5, 1.0 / std::sqrt(2.0)}, {0.3, 0.5}, {0.7, 0.9}, {0.5, 0.2}}) {
    const double q2 = 1.0 - q1;
    const double sep = std::acos(ov);
    double brute = 0.0;
    const int steps = 100000;
    for (int i = 0; i < steps; ++i) {
      const double t = kPi * i / steps;
      const double c1 = std::cos(t), s1 = std::sin(t);
      const double c2 = std::cos(t - sep), s2 = std::sin(t - sep);
      const double hit = q1 * c1 * c1 + q2 * s2 * s2;
      brute = std::max(brute, std::max(hit, q1 * s1 * s1 + q2 * c2 * c2));
    }
    CHECK(std::abs(helstrom_two_pure(q1, q2, ov) - brute) < 1e-8);
  }
}

TEST_CASE("protocol validation rejects malformed protocols") {
  const ProductEnsemble e = four_state();
  OneWayProtocol p = chi_basis_protocol();
  validate_protocol(p, 2, 2);
  CHECK_THROWS_AS(validate_protocol(p, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(validate_protocol(p, 2, 3), std::invalid_argument);

  OneWayProtocol incomplete = p;
  incomplete.alice.ops[0] *= 0.5;
  CHECK_THROWS_AS(validate_protocol(incomplete, 2, 2), std::invalid_argument);

  OneWayProtocol skewed = p;
  skewed.outcomes[0].basis[1] = skewed.outcomes[0].basis[0];
  CHECK_THROWS_AS(validate_protocol(skewed, 2, 2), std::invalid_argument);

  OneWayProtocol wild = p;
  wild.outcomes[1].guesses[0] = 7;
  CHECK_THROWS_AS(simulate_one_way(e, wild), std::invalid_argument);

  // an occurring outcome pair with no guess assigned is an error
  OneWayProtocol silent;
  silent.alice.dim = 2;
  silent.alice.ops = {CMatrix::Identity(2, 2)};
  BobStrategy s;
  s.basis = {Ket::basis(2, 0), Ket::basis(2, 1)};
  s.guesses = {0, 0};
  silent.outcomes = {s};
  CHECK_THROWS_AS(simulate_one_way(e, silent), std::invalid_argument);
}

TEST_CASE("three mutually confusable passive states are rejected") {
  Ket a0 = Ket::basis(3, 0), a1 = Ket::basis(3, 1), a2 = Ket::basis(3, 2);
  Ket b0 = Ket::basis(2, 0), b1 = Ket::basis(2, 1);
  Ket mix = Ket::zero(2);
  mix.amps << 1.0, 1.0;
  mix.amps /= mix.amps.norm();
  const ProductEnsemble e =
      make_product_ensemble(3, 2, {{a0, b0}, {a1, b1}, {a2, mix}});
  CHECK_THROWS_WITH_AS(optimize_povm(e, 2, 1, 1), doctest::Contains("nonorthogonal"),
                       std::invalid_argument);
}

TEST_CASE("protocol files round-trip and fail loudly") {
  const std::string path = "/tmp/loccsim_protocol_roundtrip.json";
  const OneWayProtocol p = chi_basis_protocol();
  save_protocol(p, path);
  const OneWayProtocol back = load_protocol(path);
  REQUIRE(back.alice.outcomes() == p.alice.outcomes());
  for (int k = 0; k < p.alice.outcomes(); ++k) {
    CHECK(back.alice.ops[k] == p.alice.ops[k]);
    CHECK(back.outcomes[static_cast<std::size_t>(k)].guesses ==
          p.outcomes[static_cast<std::size_t>(k)].guesses);
  }
  const EstimationResult a = simulate_one_way(four_state(), p);
  const EstimationResult b = simulate_one_way(four_state(), back);
  CHECK(a.per_state_success == b.per_state_success);
  std::remove(path.c_str());

  CHECK_THROWS_WITH_AS(load_protocol("/tmp/loccsim_missing_protocol.json"),
                       doctest::Contains("loccsim_missing_protocol"),
                       std::runtime_error);
}
