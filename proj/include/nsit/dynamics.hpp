#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "nsit/qubit.hpp"

namespace nsit {

/// Damped qubit H = omega sigma_z / 2 coupled to a thermal field.
///
/// Temperature only enters through the thermal occupation nbar; the total
/// transition rate is gamma = gamma0 (2 nbar + 1).
class SystemParams {
 public:
  /// Throws DomainError unless omega > 0, gamma0 >= 0, nbar >= 0.
  SystemParams(double omega, double gamma0, double nbar = 0.0);

  /// nbar = thermal_occupation(omega, temperature), hbar = kB = 1.
  static SystemParams from_temperature(double omega, double gamma0, double temperature);

  double omega() const { return omega_; }
  double gamma0() const { return gamma0_; }
  double nbar() const { return nbar_; }
  double gamma() const { return gamma0_ * (2.0 * nbar_ + 1.0); }

 private:
  double omega_;
  double gamma0_;
  double nbar_;
};

/// Bose-Einstein occupation 1 / (exp(omega / T) - 1); exactly 0 at T = 0.
double thermal_occupation(double omega, double temperature);

/// Real 4x4 matrix in the (sigma_x, sigma_y, sigma_z, I) basis.
///
/// Row i holds the expansion of the image of basis operator i, so for a
/// Heisenberg propagator P the observable X = sum_i c_i sigma_i evolves to
/// coefficients P^T c, while the extended Bloch vector (rx, ry, rz, 1) of a
/// state evolves to P s.
class Superoperator {
 public:
  Superoperator() : m_(Eigen::Matrix4d::Identity()) {}
  explicit Superoperator(const Eigen::Matrix4d& m) : m_(m) {}

  const Eigen::Matrix4d& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  PauliCoefficients apply_to_observable(const PauliCoefficients& c) const;

  friend Superoperator operator*(const Superoperator& a, const Superoperator& b) {
    return Superoperator(a.m_ * b.m_);
  }

 private:
  Eigen::Matrix4d m_;
};

/// Generator of the Heisenberg-picture dynamics.
Superoperator liouvillian_matrix(const SystemParams& p);

/// Closed-form exp(L t). Throws DomainError for t < 0.
Superoperator heisenberg_propagator(const SystemParams& p, double t);

/// Heisenberg-picture observable X(t).
QubitOperator evolve_observable(const SystemParams& p, const QubitOperator& x, double t);

/// Schrodinger-picture state, dual to heisenberg_propagator:
/// tr(X rho(t)) = tr(X(t) rho). Throws DomainError for t < 0.
DensityMatrix evolve_state(const SystemParams& p, const DensityMatrix& rho, double t);

/// Right-hand side of the Schrodinger-picture master equation,
/// -i[H, rho] + gamma0 (nbar + 1) D[sigma_-] rho + gamma0 nbar D[sigma_+] rho.
Matrix2c master_equation_rhs(const SystemParams& p, const Matrix2c& rho);

/// Classical RK4 with a fixed number of equal steps over [0, t].
Matrix2c integrate_rk4(const SystemParams& p, const Matrix2c& rho0, double t, std::size_t steps);

struct Rk4Report {
  Matrix2c state;
  std::size_t steps = 0;
  double local_error_estimate = 0.0;
};

/// Fixed-step RK4 oracle. Starts from t / 2^14 and halves the step until
/// the step-doubling local error estimate on the first step drops below tol.
Rk4Report integrate_rk4_to_tolerance(const SystemParams& p, const Matrix2c& rho0, double t,
                                     double tol);

/// Numerical counterpart of evolve_state. Throws DomainError on t < 0 or
/// tol <= 0.
DensityMatrix evolve_state_numerical(const SystemParams& p, const DensityMatrix& rho, double t,
                                     double tol);

namespace detail {
/// Affine entry gamma0 (exp(-gamma t) - 1) / gamma of the propagator, with the
/// gamma -> 0 limit -gamma0 t taken explicitly.
double relaxation_offset(double gamma0, double gamma, double t);
}  // namespace detail

/// Bloch vector (0, 0, -gamma0 / gamma). Throws NoUniqueSteadyState when
/// gamma0 = 0.
DensityMatrix steady_state(const SystemParams& p);

}  // namespace nsit
