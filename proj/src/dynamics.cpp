#include "nsit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsit/errors.hpp"

namespace nsit {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr std::size_t kDefaultSteps = std::size_t{1} << 14;
constexpr std::size_t kMaxSteps = std::size_t{1} << 24;

#ifdef NSIT_FAULT_FLIP_ROTATION
constexpr double kRotationSense = -1.0;
#else
constexpr double kRotationSense = 1.0;
#endif

void require_time(double t, const char* where) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw DomainError(std::string(where) + ": time must be finite and >= 0");
  }
}

Matrix2c dissipator(const Matrix2c& l, const Matrix2c& rho) {
  const Matrix2c ldl = l.adjoint() * l;
  return l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
}

Matrix2c rk4_step(const SystemParams& p, const Matrix2c& y, double h) {
  const Matrix2c k1 = master_equation_rhs(p, y);
  const Matrix2c k2 = master_equation_rhs(p, y + 0.5 * h * k1);
  const Matrix2c k3 = master_equation_rhs(p, y + 0.5 * h * k2);
  const Matrix2c k4 = master_equation_rhs(p, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Symmetrize and renormalize away roundoff so the result passes the
// DensityMatrix invariants.
Matrix2c clean_state(const Matrix2c& m) {
  Matrix2c h = 0.5 * (m + m.adjoint());
  return h / h.trace().real();
}

}  // namespace

SystemParams::SystemParams(double omega, double gamma0, double nbar)
    : omega_(omega), gamma0_(gamma0), nbar_(nbar) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw DomainError("SystemParams: omega must be > 0");
  }
  if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) {
    throw DomainError("SystemParams: gamma0 must be >= 0");
  }
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw DomainError("SystemParams: nbar must be >= 0");
  }
}

SystemParams SystemParams::from_temperature(double omega, double gamma0, double temperature) {
  return SystemParams(omega, gamma0, thermal_occupation(omega, temperature));
}

double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) throw DomainError("thermal_occupation: omega must be > 0");
  if (!(temperature >= 0.0)) throw DomainError("thermal_occupation: temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(omega / temperature);
}

PauliCoefficients Superoperator::apply_to_observable(const PauliCoefficients& c) const {
  return PauliCoefficients::from_vector(m_.transpose() * c.as_vector());
}

Superoperator liouvillian_matrix(const SystemParams& p) {
  const double w = p.omega();
  const double g = p.gamma();
  Eigen::Matrix4d l;
  // clang-format off
  l << -g / 2, -w,     0.0, 0.0,
        w,     -g / 2, 0.0, 0.0,
        0.0,    0.0,   -g,  -p.gamma0(),
        0.0,    0.0,   0.0, 0.0;
  // clang-format on
  return Superoperator(l);
}

namespace detail {
double relaxation_offset(double gamma0, double gamma, double t) {
  if (gamma == 0.0) return -gamma0 * t;
  return gamma0 * std::expm1(-gamma * t) / gamma;
}
}  // namespace detail

Superoperator heisenberg_propagator(const SystemParams& p, double t) {
  require_time(t, "heisenberg_propagator");
  const double g = p.gamma();
  const double damp = std::exp(-0.5 * g * t);
  const double c = damp * std::cos(p.omega() * t);
  const double s = damp * std::sin(p.omega() * t);
  Eigen::Matrix4d u;
  // clang-format off
  u << c,   -s,   0.0,                0.0,
       s,    c,   0.0,                0.0,
       0.0,  0.0, std::exp(-g * t),   detail::relaxation_offset(p.gamma0(), g, t),
       0.0,  0.0, 0.0,                1.0;
  // clang-format on
  return Superoperator(u);
}

QubitOperator evolve_observable(const SystemParams& p, const QubitOperator& x, double t) {
  return from_pauli(heisenberg_propagator(p, t).apply_to_observable(to_pauli(x)));
}

DensityMatrix evolve_state(const SystemParams& p, const DensityMatrix& rho, double t) {
  require_time(t, "evolve_state");
  const BlochVector r = density_to_bloch(rho);
  const double g = p.gamma();
  const double damp = std::exp(-0.5 * g * t);
  const double phase = kRotationSense * p.omega() * t;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  BlochVector out{
      damp * (c * r.rx - s * r.ry),
      damp * (s * r.rx + c * r.ry),
      std::exp(-g * t) * r.rz + detail::relaxation_offset(p.gamma0(), g, t),
  };
  // Contraction keeps |r| <= 1 analytically; clip roundoff past the boundary.
  const double n = out.norm();
  if (n > 1.0) {
    out = {out.rx / n, out.ry / n, out.rz / n};
  }
  return bloch_to_density(out);
}

Matrix2c master_equation_rhs(const SystemParams& p, const Matrix2c& rho) {
  const Matrix2c h = 0.5 * p.omega() * pauli_basis().z.matrix();
  const Matrix2c lower = sigma_minus().matrix();
  const Matrix2c raise = sigma_plus().matrix();
  Matrix2c out = -kI * (h * rho - rho * h);
  out += p.gamma0() * (p.nbar() + 1.0) * dissipator(lower, rho);
  out += p.gamma0() * p.nbar() * dissipator(raise, rho);
  return out;
}

Matrix2c integrate_rk4(const SystemParams& p, const Matrix2c& rho0, double t, std::size_t steps) {
  require_time(t, "integrate_rk4");
  if (t == 0.0 || steps == 0) return rho0;
  const double h = t / static_cast<double>(steps);
  Matrix2c y = rho0;
  for (std::size_t i = 0; i < steps; ++i) y = rk4_step(p, y, h);
  return y;
}

Rk4Report integrate_rk4_to_tolerance(const SystemParams& p, const Matrix2c& rho0, double t,
                                     double tol) {
  require_time(t, "integrate_rk4_to_tolerance");
  if (!(tol > 0.0)) throw DomainError("integrate_rk4_to_tolerance: tol must be > 0");
  if (t == 0.0) return {rho0, 0, 0.0};

  std::size_t steps = kDefaultSteps;
  double err = 0.0;
  for (;;) {
    const double h = t / static_cast<double>(steps);
    const Matrix2c full = rk4_step(p, rho0, h);
    const Matrix2c halves = rk4_step(p, rk4_step(p, rho0, 0.5 * h), 0.5 * h);
    err = (full - halves).cwiseAbs().maxCoeff();
    if (err < tol || steps >= kMaxSteps) break;
    steps *= 2;
  }
  return {integrate_rk4(p, rho0, t, steps), steps, err};
}

DensityMatrix evolve_state_numerical(const SystemParams& p, const DensityMatrix& rho, double t,
                                     double tol) {
  require_time(t, "evolve_state_numerical");
  if (!(tol > 0.0)) throw DomainError("evolve_state_numerical: tol must be > 0");
  return DensityMatrix(clean_state(integrate_rk4_to_tolerance(p, rho.matrix(), t, tol).state));
}

DensityMatrix steady_state(const SystemParams& p) {
  if (p.gamma0() == 0.0) {
    throw NoUniqueSteadyState("steady_state: gamma0 = 0 has no unique fixed point");
  }
  return bloch_to_density({0.0, 0.0, -1.0 / (2.0 * p.nbar() + 1.0)});
}

}  // namespace nsit
