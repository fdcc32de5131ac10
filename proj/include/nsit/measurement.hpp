#pragma once

#include <utility>

#include "nsit/qubit.hpp"

namespace nsit {

/// Strength epsilon in [0, 1] of the two-outcome sigma_x measurement.
/// 0 learns nothing, 1 is the projective measurement of sigma_x.
///
/// A finite-temperature Stern-Gerlach device maps onto the same family via
/// epsilon = 2 kappa - 1; that parameterization has no separate code path.
class MeasurementStrength {
 public:
  /// Throws DomainError unless 0 <= epsilon <= 1 (no tolerance).
  explicit MeasurementStrength(double epsilon);

  double value() const { return epsilon_; }
  /// sqrt(1 - epsilon^2): the factor by which the channel shrinks ry and rz.
  double coherence_factor() const;

 private:
  double epsilon_;
};

enum class MeasurementOutcome { Plus, Minus };

inline constexpr MeasurementOutcome kOutcomes[] = {MeasurementOutcome::Plus,
                                                   MeasurementOutcome::Minus};

struct EffectPair {
  QubitOperator plus;
  QubitOperator minus;
};

struct KrausPair {
  QubitOperator plus;
  QubitOperator minus;
};

/// E_+/- = ((1 +/- eps)/2) |+><+| + ((1 -/+ eps)/2) |-><-|.
EffectPair effects(MeasurementStrength eps);

/// Positive square roots A_+/- of the effects.
KrausPair kraus_operators(MeasurementStrength eps);

/// A_+ rho A_+ + A_- rho A_-.
DensityMatrix nonselective_update(const DensityMatrix& rho, MeasurementStrength eps);

struct SelectiveResult {
  DensityMatrix state;
  double probability;
};

/// Outcome probability tr(E_o rho) and post-state A_o rho A_o / p. Throws
/// ZeroProbabilityOutcome when p < 1e-14.
SelectiveResult selective_update(const DensityMatrix& rho, MeasurementStrength eps,
                                 MeasurementOutcome outcome);

/// Squared (Jozsa) fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, evaluated
/// through the qubit identity tr(rho sigma) + 2 sqrt(det rho det sigma).
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Square root of fidelity(), i.e. tr sqrt(sqrt(rho) sigma sqrt(rho)).
double root_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// +1 eigenstate of sigma_y.
DensityMatrix max_disturbable_state();

/// 1 - F(rho, rho') for rho = max_disturbable_state() and rho' its
/// nonselective update.
double disturbance(MeasurementStrength eps);

/// 1 - F between an arbitrary state and its nonselective update.
double disturbance_of(const DensityMatrix& rho, MeasurementStrength eps);

}  // namespace nsit
