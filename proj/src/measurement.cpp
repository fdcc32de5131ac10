#include "nsit/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsit/errors.hpp"

namespace nsit {

namespace {

constexpr double kMinOutcomeProbability = 1e-14;

QubitOperator x_diagonal(double on_plus, double on_minus) {
  return on_plus * projector_plus() + on_minus * projector_minus();
}

Matrix2c hermitize(const Matrix2c& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

MeasurementStrength::MeasurementStrength(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw DomainError("measurement strength " + std::to_string(epsilon) +
                      " outside [0, 1]");
  }
}

double MeasurementStrength::coherence_factor() const {
  return std::sqrt((1.0 - epsilon_) * (1.0 + epsilon_));
}

EffectPair effects(MeasurementStrength eps) {
  const double e = eps.value();
  return {x_diagonal(0.5 * (1.0 + e), 0.5 * (1.0 - e)),
          x_diagonal(0.5 * (1.0 - e), 0.5 * (1.0 + e))};
}

KrausPair kraus_operators(MeasurementStrength eps) {
  const double e = eps.value();
  const double strong = std::sqrt(0.5 * (1.0 + e));
  const double weak = std::sqrt(0.5 * (1.0 - e));
  return {x_diagonal(strong, weak), x_diagonal(weak, strong)};
}

DensityMatrix nonselective_update(const DensityMatrix& rho, MeasurementStrength eps) {
  const auto [a_plus, a_minus] = kraus_operators(eps);
  const Matrix2c& r = rho.matrix();
  const Matrix2c out =
      a_plus.matrix() * r * a_plus.matrix() + a_minus.matrix() * r * a_minus.matrix();
  return DensityMatrix(hermitize(out));
}

SelectiveResult selective_update(const DensityMatrix& rho, MeasurementStrength eps,
                                 MeasurementOutcome outcome) {
  const auto e = effects(eps);
  const auto k = kraus_operators(eps);
  const bool plus = outcome == MeasurementOutcome::Plus;
  const QubitOperator& effect = plus ? e.plus : e.minus;
  const QubitOperator& kraus = plus ? k.plus : k.minus;

  const double p = expectation(effect, rho);
  if (p < kMinOutcomeProbability) {
    throw ZeroProbabilityOutcome(std::string("selective_update: outcome ") +
                                 (plus ? "+" : "-") + " has probability " +
                                 std::to_string(p));
  }
  const Matrix2c post = kraus.matrix() * rho.matrix() * kraus.matrix() / p;
  return {DensityMatrix(hermitize(post)), std::min(p, 1.0)};
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const double overlap = (rho.matrix() * sigma.matrix()).trace().real();
  const double f = overlap + 2.0 * std::sqrt(rho.determinant() * sigma.determinant());
  return std::clamp(f, 0.0, 1.0);
}

double root_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return std::sqrt(fidelity(rho, sigma));
}

DensityMatrix max_disturbable_state() { return bloch_to_density({0.0, 1.0, 0.0}); }

double disturbance_of(const DensityMatrix& rho, MeasurementStrength eps) {
  return 1.0 - fidelity(rho, nonselective_update(rho, eps));
}

double disturbance(MeasurementStrength eps) {
  return disturbance_of(max_disturbable_state(), eps);
}

}  // namespace nsit
