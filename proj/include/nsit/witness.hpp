#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsit/dynamics.hpp"
#include "nsit/measurement.hpp"

namespace nsit {

/// Two-time protocol: prepare |+>, optionally measure sigma_x with strength
/// epsilon at the intermediate time, then project on |+> at tau.
class ProtocolConfig {
 public:
  /// Throws DomainError when tau < 0.
  ProtocolConfig(SystemParams params, double tau, MeasurementStrength epsilon);

  const SystemParams& params() const { return params_; }
  double tau() const { return tau_; }
  MeasurementStrength epsilon() const { return epsilon_; }

  /// Measurement time; tau / 2 unless overridden.
  double measurement_time() const { return t_measure_; }
  /// Moves the intermediate measurement to t1 in [0, tau]. The closed forms
  /// assume tau / 2; only the numerical paths honour other values.
  ProtocolConfig with_measurement_time(double t1) const;

 private:
  SystemParams params_;
  double tau_;
  MeasurementStrength epsilon_;
  double t_measure_;
};

struct WitnessPoint {
  double tau = 0.0;
  double epsilon = 0.0;
  double p_unmeasured = 0.0;
  double p_measured = 0.0;
  double witness = 0.0;
  double epsilon_eff = 0.0;
};

/// P(+) without the intermediate measurement: (1 + e^{-gamma tau/2} cos w tau) / 2.
double prob_unmeasured(const ProtocolConfig& c);

/// P'(+) with the nonselective measurement at tau / 2.
double prob_measured(const ProtocolConfig& c);

/// Same two probabilities obtained by composing evolve_state and
/// nonselective_update, honouring measurement_time().
double prob_unmeasured_composed(const ProtocolConfig& c);
double prob_measured_composed(const ProtocolConfig& c);

/// W_q = e^{-gamma tau/2} f(eps) sin^2(w tau / 2) / 2.
double witness_closed_form(const ProtocolConfig& c);

struct PipelineResult {
  double p_unmeasured = 0.0;
  double p_measured = 0.0;
  double witness = 0.0;
  /// State right after the intermediate measurement.
  DensityMatrix mid_state = DensityMatrix::maximally_mixed();
};

/// Full numerical re-derivation with the RK4 integrator and the Kraus
/// channel, no closed forms.
PipelineResult run_witness_pipeline(const ProtocolConfig& c, double tol);

inline double witness_pipeline(const ProtocolConfig& c, double tol) {
  return run_witness_pipeline(c, tol).witness;
}

/// f(eps) = 1 - sqrt(1 - eps^2), evaluated as eps^2 / (1 + sqrt(1 - eps^2)).
double amplitude_factor(MeasurementStrength eps);

/// f'(eps) = eps / sqrt(1 - eps^2); +inf at eps = 1.
double amplitude_factor_derivative(MeasurementStrength eps);

/// Strength whose undamped amplitude matches the damped one:
/// f(eps_eff) = e^{-gamma tau/2} f(eps).
double effective_strength(const ProtocolConfig& c);

WitnessPoint evaluate_point(const ProtocolConfig& c);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  double p_unmeasured = 0.0;
  double p_measured = 0.0;
};

inline constexpr std::int64_t kMinShots = 100;
inline constexpr std::int64_t kShotsPerBatch = 1 << 16;

/// Samples `shots` runs of each protocol arm. Each arm and batch draws from
/// its own mt19937_64 stream whose seed is derived from (seed, arm, batch),
/// so results do not depend on how batches are scheduled. Throws
/// DomainError when shots < 100.
MonteCarloEstimate witness_monte_carlo(const ProtocolConfig& c, std::int64_t shots,
                                       std::uint64_t seed);

/// One WitnessPoint per (epsilon, tau), epsilon-major, tau in the order
/// given (callers pass ascending grids). Points are evaluated on up to
/// `threads` workers; 0 picks the hardware concurrency.
std::vector<WitnessPoint> sweep(const SystemParams& params, std::span<const double> tau_grid,
                                std::span<const double> epsilon_list, unsigned threads = 1);

}  // namespace nsit
