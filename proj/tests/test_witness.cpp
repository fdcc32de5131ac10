#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nsit/errors.hpp"
#include "nsit/witness.hpp"
#include "random_states.hpp"

using namespace nsit;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-9;

ProtocolConfig config(double omega, double gamma0, double tau, double eps, double nbar = 0.0) {
  return ProtocolConfig(SystemParams(omega, gamma0, nbar), tau, MeasurementStrength(eps));
}

// Direct transcription of the witness formula, kept separate from the library.
double witness_formula(double omega, double gamma, double tau, double eps) {
  const double s = std::sin(omega * tau / 2.0);
  return std::exp(-gamma * tau / 2.0) / 2.0 * (1.0 - std::sqrt(1.0 - eps * eps)) * s * s;
}

}  // namespace

TEST_CASE("ProtocolConfig") {
  CHECK_THROWS_AS(config(1.0, 0.1, -0.1, 0.5), DomainError);
  const ProtocolConfig c = config(1.0, 0.1, 4.0, 0.5);
  CHECK(c.measurement_time() == 2.0);
  CHECK(c.with_measurement_time(1.0).measurement_time() == 1.0);
  CHECK_THROWS_AS(c.with_measurement_time(5.0), DomainError);
}

TEST_CASE("probability without the intermediate measurement") {
  CHECK(prob_unmeasured(config(1.0, 0.1, 0.0, 0.5)) == 1.0);
  CHECK(prob_unmeasured(config(1.0, 0.0, kPi, 0.5)) == doctest::Approx(0.0));

  const ProtocolConfig c = config(1.0, 0.1, kPi, 0.5);
  const double expected = 0.5 * (1.0 - std::exp(-0.05 * kPi));
  CHECK(std::abs(prob_unmeasured(c) - expected) <= 1e-15);
  CHECK(std::abs(run_witness_pipeline(c, kTol).p_unmeasured - expected) <= 10 * kTol);
  CHECK(std::abs(prob_unmeasured_composed(c) - expected) <= 1e-12);
}

TEST_CASE("probability with the intermediate measurement") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unit;
  for (int i = 0; i < 50; ++i) {
    const ProtocolConfig c = config(1.0, 0.1, 20.0 * unit(rng), 0.0);
    CHECK(std::abs(prob_measured(c) - prob_unmeasured(c)) <= 1e-12);
  }
  CHECK(prob_measured(config(1.0, 0.0, kPi, 1.0)) == doctest::Approx(0.5).epsilon(1e-15));

  const ProtocolConfig c = config(1.0, 0.1, kPi / 2.0, 0.6);
  const double damp = std::exp(-0.1 * kPi / 4.0);
  const double expected = 0.5 * (1.0 + damp * (0.5 - 0.8 * 0.5));
  CHECK(std::abs(prob_measured(c) - expected) <= 1e-15);
  CHECK(std::abs(prob_measured_composed(c) - expected) <= 1e-12);
  CHECK(std::abs(run_witness_pipeline(c, kTol).p_measured - expected) <= 10 * kTol);
}

TEST_CASE("closed-form witness") {
  CHECK(std::abs(witness_closed_form(config(1.0, 0.0, kPi, 1.0)) - 0.5) <= 1e-12);
  for (double tau : {0.0, 1.0, 3.3, 17.0}) {
    CHECK(witness_closed_form(config(1.0, 0.1, tau, 0.0)) == 0.0);
  }
  const ProtocolConfig peak = config(1.0, 0.1, kPi, 1.0);
  CHECK(std::abs(witness_closed_form(peak) - 0.5 * std::exp(-0.05 * kPi)) <= 1e-15);
  CHECK(witness_closed_form(peak) == doctest::Approx(0.4273).epsilon(1e-4));
  CHECK(std::abs(witness_pipeline(peak, kTol) - witness_closed_form(peak)) <= 1e-10);
}

TEST_CASE("witness forms agree on random configurations") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> unit;
  for (int i = 0; i < 1000; ++i) {
    const double omega = 0.2 + 3.0 * unit(rng);
    const double gamma0 = 0.5 * unit(rng);
    const double nbar = 2.0 * unit(rng);
    const double tau = 30.0 * unit(rng);
    const double eps = unit(rng);
    const ProtocolConfig c = config(omega, gamma0, tau, eps, nbar);
    const double w = witness_closed_form(c);
    CHECK(std::abs(w - std::abs(prob_unmeasured(c) - prob_measured(c))) <= 1e-12);
    CHECK(std::abs(w - witness_formula(omega, c.params().gamma(), tau, eps)) <= 1e-12);
    CHECK(std::abs(prob_measured(c) - prob_measured_composed(c)) <= 1e-12);
    CHECK(w >= 0.0);
    CHECK(prob_measured(c) >= prob_unmeasured(c) - 1e-15);
    CHECK(w <= std::exp(-0.5 * c.params().gamma() * tau) / 2.0 + 1e-16);
  }
}

TEST_CASE("pipeline reproduces the closed form on the figure grid") {
  for (double eps : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (int k = 1; k <= 40; ++k) {
      const ProtocolConfig c = config(1.0, 0.1, 0.5 * k, eps);
      CHECK(std::abs(witness_pipeline(c, kTol) - witness_closed_form(c)) <= 10 * kTol);
    }
  }
}

TEST_CASE("pipeline with thermal occupation depends on gamma only") {
  for (double nbar : {0.5, 2.0}) {
    for (double eps : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      for (int k = 1; k <= 10; ++k) {
        const ProtocolConfig c = config(1.0, 0.1, 2.0 * k, eps, nbar);
        CHECK(std::abs(witness_pipeline(c, kTol) - witness_closed_form(c)) <= 10 * kTol);
      }
    }
  }
}

TEST_CASE("mid-protocol state matches the closed-form matrix") {
  const SystemParams p(1.0, 0.1, 0.0);
  for (double eps : {0.0, 0.3, 0.8, 1.0}) {
    for (double tau : {1.0, 5.0, 12.0}) {
      const ProtocolConfig c(p, tau, MeasurementStrength(eps));
      const DensityMatrix mid = run_witness_pipeline(c, kTol).mid_state;
      const double root = std::sqrt(1.0 - eps * eps);
      const double g = p.gamma();
      const double diag = 1.0 - p.gamma0() * root * (1.0 - std::exp(-g * tau / 2.0)) / g;
      const Complex off = std::exp(-g * tau / 4.0) *
                          Complex(std::cos(tau / 2.0), -std::sin(tau / 2.0) * root);
      CHECK(std::abs(mid(0, 0).real() - 0.5 * diag) <= 10 * kTol);
      CHECK(std::abs(mid(1, 1).real() - 0.5 * (2.0 - diag)) <= 10 * kTol);
      CHECK(std::abs(mid(0, 1) - 0.5 * off) <= 10 * kTol);
    }
  }
}

TEST_CASE("pipeline with no measurement gives zero witness") {
  for (double tau : {0.7, 3.0, 11.0}) {
    CHECK(witness_pipeline(config(1.0, 0.1, tau, 0.0), kTol) <= 10 * kTol);
  }
}

TEST_CASE("off-centre measurement time") {
  const ProtocolConfig c = config(1.0, 0.1, 6.0, 0.7).with_measurement_time(1.5);
  CHECK(std::abs(witness_pipeline(c, kTol) -
                 std::abs(prob_unmeasured_composed(c) - prob_measured_composed(c))) <= 10 * kTol);
}

TEST_CASE("amplitude factor") {
  CHECK(amplitude_factor(MeasurementStrength(0.0)) == 0.0);
  CHECK(amplitude_factor(MeasurementStrength(1.0)) == 1.0);
  CHECK(amplitude_factor(MeasurementStrength(0.6)) == doctest::Approx(0.2).epsilon(1e-15));

  for (double e : {1e-3, 1e-4, 1e-6}) {
    const double ratio = amplitude_factor(MeasurementStrength(e)) / (e * e);
    CHECK(ratio >= 0.4999);
    CHECK(ratio <= 0.5001);
  }

  const double e = 1.0 - 1e-6;
  const double h = 1e-8;
  const double slope = (amplitude_factor(MeasurementStrength(e + h)) -
                        amplitude_factor(MeasurementStrength(e - h))) /
                       (2.0 * h);
  CHECK(slope > 500.0);
  CHECK(slope == doctest::Approx(amplitude_factor_derivative(MeasurementStrength(e))).epsilon(1e-4));
  CHECK(amplitude_factor_derivative(MeasurementStrength(0.0)) == 0.0);
  CHECK(std::isinf(amplitude_factor_derivative(MeasurementStrength(1.0))));

  double prev = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double f = amplitude_factor(MeasurementStrength(i / 1000.0));
    CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("effective strength") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> unit;
  for (int i = 0; i < 50; ++i) {
    const double eps = unit(rng);
    CHECK(effective_strength(config(1.0, unit(rng), 0.0, eps)) == eps);
    CHECK(effective_strength(config(1.0, 0.0, 40.0 * unit(rng), eps)) == eps);
  }
  for (int i = 0; i < 1000; ++i) {
    const double eps = unit(rng);
    const double tau = 50.0 * unit(rng);
    const ProtocolConfig c = config(1.0, unit(rng), tau, eps, unit(rng));
    const double eff = effective_strength(c);
    CHECK(eff >= 0.0);
    CHECK(eff <= eps + 1e-15);
    const double lhs = amplitude_factor(MeasurementStrength(std::min(eff, 1.0)));
    CHECK(std::abs(lhs - std::exp(-0.5 * c.params().gamma() * tau) *
                             amplitude_factor(MeasurementStrength(eps))) <= 1e-12);
  }
  double prev = 2.0;
  for (int k = 0; k <= 400; ++k) {
    const double eff = effective_strength(config(1.0, 0.1, 0.1 * k, 1.0));
    CHECK(eff < prev);
    prev = eff;
  }
  CHECK(prev == doctest::Approx(std::sqrt(std::exp(-2.0) * (2.0 - std::exp(-2.0)))));
}

TEST_CASE("witness is increasing in strength") {
  for (double tau : {1.0, 2.5, kPi, 9.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double w = witness_closed_form(config(1.0, 0.1, tau, i / 200.0));
      CHECK(w > prev);
      prev = w;
    }
  }
}

TEST_CASE("witness zeros") {
  for (int k = 0; k <= 6; ++k) {
    for (double eps : {0.1, 0.5, 1.0}) {
      CHECK(witness_closed_form(config(1.0, 0.1, 2.0 * kPi * k, eps)) <= 1e-30);
    }
  }
}

TEST_CASE("weak-measurement scaling") {
  for (double tau : {1.0, kPi, 7.5}) {
    const double limit = std::exp(-0.05 * tau) * std::pow(std::sin(tau / 2.0), 2) / 4.0;
    const double g3 = witness_closed_form(config(1.0, 0.1, tau, 1e-3)) / 1e-6;
    const double g4 = witness_closed_form(config(1.0, 0.1, tau, 1e-4)) / 1e-8;
    // g(eps) = limit (1 + eps^2 / 4 + ...): error shrinks 100x per decade
    CHECK(std::abs(g4 - limit) < std::abs(g3 - limit));
    const double extrapolated = (100.0 * g4 - g3) / 99.0;
    CHECK(std::abs(extrapolated - limit) <= 1e-10 * limit);
    CHECK(std::abs(g3 - limit) / limit == doctest::Approx(0.25e-6).epsilon(1e-3));
  }
}

TEST_CASE("Monte Carlo estimator") {
  const ProtocolConfig peak = config(1.0, 0.1, kPi, 1.0);
  const MonteCarloEstimate mc = witness_monte_carlo(peak, 1'000'000, 2019);
  CHECK(mc.standard_error > 0.0);
  CHECK(std::abs(mc.estimate - witness_closed_form(peak)) <= 5.0 * mc.standard_error);

  const ProtocolConfig none = config(1.0, 0.1, 2.0, 0.0);
  const MonteCarloEstimate zero = witness_monte_carlo(none, 1'000'000, 7);
  CHECK(zero.estimate <= 5.0 * zero.standard_error);

  const MonteCarloEstimate again = witness_monte_carlo(peak, 1'000'000, 2019);
  CHECK(again.estimate == mc.estimate);
  CHECK(again.standard_error == mc.standard_error);
  CHECK(witness_monte_carlo(peak, 1'000'000, 2020).estimate != mc.estimate);

  CHECK_THROWS_AS(witness_monte_carlo(peak, 99, 1), DomainError);
  CHECK_NOTHROW(witness_monte_carlo(peak, 100, 1));
}

TEST_CASE("Monte Carlo across strengths") {
  for (double eps : {0.25, 0.5, 0.75}) {
    const ProtocolConfig c = config(1.0, 0.1, 2.5, eps);
    const MonteCarloEstimate mc = witness_monte_carlo(c, 400'000, 11);
    CHECK(std::abs(mc.estimate - witness_closed_form(c)) <= 5.0 * mc.standard_error);
  }
}

TEST_CASE("sweep") {
  const SystemParams p(1.0, 0.1, 0.0);
  SUBCASE("ordering and row consistency") {
    const std::vector<double> taus{0.0, 1.0, 2.0};
    const std::vector<double> eps{0.0, 0.5, 1.0};
    const auto rows = sweep(p, taus, eps, 4);
    REQUIRE(rows.size() == 9);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].epsilon == eps[i / 3]);
      CHECK(rows[i].tau == taus[i % 3]);
      CHECK(std::abs(rows[i].witness - std::abs(rows[i].p_unmeasured - rows[i].p_measured)) <=
            1e-12);
      if (rows[i].epsilon == 0.0) CHECK(rows[i].witness == 0.0);
    }
    const auto serial = sweep(p, taus, eps, 1);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(serial[i].witness == rows[i].witness);
  }
  SUBCASE("single point reduces to the scalar operations") {
    const std::vector<double> tau{2.7};
    const std::vector<double> eps{0.6};
    const auto rows = sweep(p, tau, eps);
    REQUIRE(rows.size() == 1);
    const ProtocolConfig c(p, 2.7, MeasurementStrength(0.6));
    CHECK(rows[0].p_unmeasured == prob_unmeasured(c));
    CHECK(std::abs(rows[0].p_measured - prob_measured(c)) <= 1e-15);
    CHECK(rows[0].witness == witness_closed_form(c));
    CHECK(rows[0].epsilon_eff == effective_strength(c));
  }
  SUBCASE("empty grids are rejected") {
    const std::vector<double> none;
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(sweep(p, none, one), DomainError);
    CHECK_THROWS_AS(sweep(p, one, none), DomainError);
  }
}

TEST_CASE("damped projective witness peaks") {
  // On a fine grid over [0, 40] locate each local maximum, refine it by
  // bisection on the sign of dW/dtau, and compare with the undamped peak
  // positions (2k+1) pi.
  const double gamma = 0.1;
  std::vector<double> taus;
  for (int i = 0; i <= 4000; ++i) taus.push_back(0.01 * i);
  const std::vector<double> eps{1.0};
  const auto rows = sweep(SystemParams(1.0, gamma), taus, eps, 0);

  auto slope = [&](double tau) {
    return std::exp(-gamma * tau / 2.0) *
           (0.5 * std::sin(tau) - 0.5 * gamma * std::pow(std::sin(tau / 2.0), 2));
  };

  std::vector<double> peaks;
  std::vector<double> heights;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (rows[i].witness > rows[i - 1].witness && rows[i].witness >= rows[i + 1].witness) {
      double lo = rows[i - 1].tau, hi = rows[i + 1].tau;
      REQUIRE(slope(lo) > 0.0);
      REQUIRE(slope(hi) < 0.0);
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? lo : hi) = mid;
      }
      const double tau = 0.5 * (lo + hi);
      peaks.push_back(tau);
      heights.push_back(witness_closed_form(config(1.0, gamma, tau, 1.0)));
    }
  }
  REQUIRE(peaks.size() == 6);
  for (std::size_t k = 0; k < peaks.size(); ++k) {
    const double undamped = (2.0 * k + 1.0) * kPi;
    CHECK(peaks[k] < undamped);
    CHECK(peaks[k] > undamped - 0.1);
    // stationarity: w sin(w tau) = gamma sin^2(w tau / 2)
    CHECK(std::abs(std::sin(peaks[k]) - gamma * std::pow(std::sin(peaks[k] / 2.0), 2)) <= 1e-12);
    if (k > 0) {
      CHECK(peaks[k] - peaks[k - 1] == doctest::Approx(2.0 * kPi).epsilon(1e-12));
      CHECK(heights[k] / heights[k - 1] == doctest::Approx(std::exp(-gamma * kPi)).epsilon(1e-10));
    }
  }
}
