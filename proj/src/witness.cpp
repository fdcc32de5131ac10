#include "nsit/witness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "nsit/errors.hpp"

namespace nsit {

namespace {

double prob_plus(const DensityMatrix& rho) { return expectation(projector_plus(), rho); }

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t batch_seed(std::uint64_t seed, std::uint64_t arm, std::uint64_t batch) {
  return splitmix64(splitmix64(splitmix64(seed) ^ arm) ^ batch);
}

// Uniform double in [0, 1) built from the top 53 bits, identical on every
// standard library.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct MeasuredBranches {
  double p_plus_outcome = 0.0;
  double p_final_after_plus = 0.0;
  double p_final_after_minus = 0.0;
};

MeasuredBranches measured_branches(const ProtocolConfig& c) {
  const SystemParams& p = c.params();
  const double t1 = c.measurement_time();
  const double t2 = c.tau() - t1;
  const DensityMatrix mid = evolve_state(p, DensityMatrix::plus(), t1);

  MeasuredBranches b;
  for (MeasurementOutcome o : kOutcomes) {
    double p_outcome = 0.0;
    double p_final = 0.0;
    try {
      const auto [post, prob] = selective_update(mid, c.epsilon(), o);
      p_outcome = prob;
      p_final = prob_plus(evolve_state(p, post, t2));
    } catch (const ZeroProbabilityOutcome&) {
      // never sampled
    }
    if (o == MeasurementOutcome::Plus) {
      b.p_plus_outcome = p_outcome;
      b.p_final_after_plus = p_final;
    } else {
      b.p_final_after_minus = p_final;
    }
  }
  return b;
}

}  // namespace

ProtocolConfig::ProtocolConfig(SystemParams params, double tau, MeasurementStrength epsilon)
    : params_(params), tau_(tau), epsilon_(epsilon), t_measure_(0.5 * tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw DomainError("ProtocolConfig: tau must be finite and >= 0");
  }
}

ProtocolConfig ProtocolConfig::with_measurement_time(double t1) const {
  if (!(t1 >= 0.0 && t1 <= tau_)) {
    throw DomainError("ProtocolConfig: measurement time must lie in [0, tau]");
  }
  ProtocolConfig out = *this;
  out.t_measure_ = t1;
  return out;
}

double prob_unmeasured(const ProtocolConfig& c) {
  const double wt = c.params().omega() * c.tau();
  return 0.5 * (1.0 + std::exp(-0.5 * c.params().gamma() * c.tau()) * std::cos(wt));
}

double prob_measured(const ProtocolConfig& c) {
  const double half = 0.5 * c.params().omega() * c.tau();
  const double cos2 = std::cos(half) * std::cos(half);
  const double sin2 = std::sin(half) * std::sin(half);
  const double damp = std::exp(-0.5 * c.params().gamma() * c.tau());
  return 0.5 * (1.0 + damp * (cos2 - c.epsilon().coherence_factor() * sin2));
}

double prob_unmeasured_composed(const ProtocolConfig& c) {
  return prob_plus(evolve_state(c.params(), DensityMatrix::plus(), c.tau()));
}

double prob_measured_composed(const ProtocolConfig& c) {
  const SystemParams& p = c.params();
  const double t1 = c.measurement_time();
  const DensityMatrix before = evolve_state(p, DensityMatrix::plus(), t1);
  const DensityMatrix after = nonselective_update(before, c.epsilon());
  return prob_plus(evolve_state(p, after, c.tau() - t1));
}

double witness_closed_form(const ProtocolConfig& c) {
  const double s = std::sin(0.5 * c.params().omega() * c.tau());
  return 0.5 * std::exp(-0.5 * c.params().gamma() * c.tau()) * amplitude_factor(c.epsilon()) *
         s * s;
}

PipelineResult run_witness_pipeline(const ProtocolConfig& c, double tol) {
  const SystemParams& p = c.params();
  const double t1 = c.measurement_time();
  const DensityMatrix start = DensityMatrix::plus();

  const DensityMatrix unmeasured = evolve_state_numerical(p, start, c.tau(), tol);
  const DensityMatrix before = evolve_state_numerical(p, start, t1, tol);
  const DensityMatrix mid = nonselective_update(before, c.epsilon());
  const DensityMatrix measured = evolve_state_numerical(p, mid, c.tau() - t1, tol);

  const double pu = prob_plus(unmeasured);
  const double pm = prob_plus(measured);
  return {pu, pm, std::abs(pu - pm), mid};
}

double amplitude_factor(MeasurementStrength eps) {
  const double e = eps.value();
  return e * e / (1.0 + eps.coherence_factor());
}

double amplitude_factor_derivative(MeasurementStrength eps) {
  const double root = eps.coherence_factor();
  if (root == 0.0) return HUGE_VAL;
  return eps.value() / root;
}

double effective_strength(const ProtocolConfig& c) {
  const double damp = std::exp(-0.5 * c.params().gamma() * c.tau());
  // Undamped (tau = 0 or gamma = 0): the strength is unchanged, exactly.
  if (damp == 1.0) return c.epsilon().value();
  const double x = damp * amplitude_factor(c.epsilon());
  // 1 - (1 - x)^2 = x (2 - x), without the cancellation near x = 0.
  return std::sqrt(std::max(0.0, x * (2.0 - x)));
}

WitnessPoint evaluate_point(const ProtocolConfig& c) {
  WitnessPoint w;
  w.tau = c.tau();
  w.epsilon = c.epsilon().value();
  // The measurement can only raise P(+), so P' = P + W; building the row
  // this way keeps W exactly zero at eps = 0 instead of a roundoff residue.
  w.p_unmeasured = clamp_probability(prob_unmeasured(c));
  w.witness = witness_closed_form(c);
  w.p_measured = clamp_probability(w.p_unmeasured + w.witness);
  w.epsilon_eff = effective_strength(c);
  return w;
}

MonteCarloEstimate witness_monte_carlo(const ProtocolConfig& c, std::int64_t shots,
                                       std::uint64_t seed) {
  if (shots < kMinShots) {
    throw DomainError("witness_monte_carlo: at least 100 shots required");
  }
  const double p_plain = clamp_probability(prob_unmeasured_composed(c));
  const MeasuredBranches br = measured_branches(c);

  const auto batches = static_cast<std::uint64_t>((shots + kShotsPerBatch - 1) / kShotsPerBatch);
  std::int64_t hits_plain = 0;
  std::int64_t hits_measured = 0;
  for (std::uint64_t b = 0; b < batches; ++b) {
    const std::int64_t first = static_cast<std::int64_t>(b) * kShotsPerBatch;
    const std::int64_t n = std::min(kShotsPerBatch, shots - first);

    std::mt19937_64 plain_rng(batch_seed(seed, 0, b));
    for (std::int64_t i = 0; i < n; ++i) {
      if (uniform01(plain_rng) < p_plain) ++hits_plain;
    }

    std::mt19937_64 measured_rng(batch_seed(seed, 1, b));
    for (std::int64_t i = 0; i < n; ++i) {
      const bool plus_outcome = uniform01(measured_rng) < br.p_plus_outcome;
      const double p_final = plus_outcome ? br.p_final_after_plus : br.p_final_after_minus;
      if (uniform01(measured_rng) < p_final) ++hits_measured;
    }
  }

  const double n = static_cast<double>(shots);
  MonteCarloEstimate out;
  out.p_unmeasured = static_cast<double>(hits_plain) / n;
  out.p_measured = static_cast<double>(hits_measured) / n;
  out.estimate = std::abs(out.p_unmeasured - out.p_measured);
  out.standard_error = std::sqrt(out.p_unmeasured * (1.0 - out.p_unmeasured) / n +
                                 out.p_measured * (1.0 - out.p_measured) / n);
  return out;
}

std::vector<WitnessPoint> sweep(const SystemParams& params, std::span<const double> tau_grid,
                                std::span<const double> epsilon_list, unsigned threads) {
  if (tau_grid.empty() || epsilon_list.empty()) {
    throw DomainError("sweep: grids must be nonempty");
  }
  std::vector<ProtocolConfig> configs;
  configs.reserve(tau_grid.size() * epsilon_list.size());
  for (double eps : epsilon_list) {
    const MeasurementStrength strength(eps);
    for (double tau : tau_grid) configs.emplace_back(params, tau, strength);
  }

  std::vector<WitnessPoint> rows(configs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, rows.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = evaluate_point(configs[i]);
    return rows;
  }
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < rows.size(); i += threads) rows[i] = evaluate_point(configs[i]);
      });
    }
  }
  return rows;
}

}  // namespace nsit
