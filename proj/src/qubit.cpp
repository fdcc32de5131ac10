#include "nsit/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsit/errors.hpp"

namespace nsit {

namespace {

constexpr Complex kI{0.0, 1.0};

std::string fmt_double(double v) { return std::to_string(v); }

}  // namespace

bool QubitOperator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double max_abs_diff(const QubitOperator& a, const QubitOperator& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

const PauliBasis& pauli_basis() {
  static const PauliBasis basis{
      QubitOperator(0.0, 1.0, 1.0, 0.0),
      QubitOperator(0.0, -kI, kI, 0.0),
      QubitOperator(1.0, 0.0, 0.0, -1.0),
      QubitOperator(1.0, 0.0, 0.0, 1.0),
  };
  return basis;
}

QubitOperator sigma_plus() { return QubitOperator(0.0, 1.0, 0.0, 0.0); }
QubitOperator sigma_minus() { return QubitOperator(0.0, 0.0, 1.0, 0.0); }
QubitOperator projector_plus() { return QubitOperator(0.5, 0.5, 0.5, 0.5); }
QubitOperator projector_minus() { return QubitOperator(0.5, -0.5, -0.5, 0.5); }

PauliCoefficients to_pauli(const QubitOperator& x) {
  if (!x.is_hermitian()) {
    throw NonHermitianError("to_pauli: operator is not Hermitian");
  }
  // tr(sigma_i sigma_j) = 2 delta_ij
  const auto& m = x.matrix();
  return {
      m(0, 1).real(),
      -m(0, 1).imag(),
      0.5 * (m(0, 0).real() - m(1, 1).real()),
      0.5 * (m(0, 0).real() + m(1, 1).real()),
  };
}

QubitOperator from_pauli(const PauliCoefficients& c) {
  return QubitOperator(Complex(c.cI + c.cz, 0.0), Complex(c.cx, -c.cy),
                       Complex(c.cx, c.cy), Complex(c.cI - c.cz, 0.0));
}

double BlochVector::norm() const { return std::sqrt(rx * rx + ry * ry + rz * rz); }

std::array<double, 2> hermitian_eigenvalues(const Matrix2c& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double half_trace = 0.5 * (a + d);
  const double half_gap = std::hypot(0.5 * (a - d), std::abs(m(0, 1)));
  return {half_trace - half_gap, half_trace + half_gap};
}

DensityMatrix::DensityMatrix(const Matrix2c& m) : m_(m) {
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol) {
    throw InvalidStateError("density matrix is not Hermitian");
  }
  const Complex tr = m_.trace();
  if (std::abs(tr - 1.0) > kAlgebraTol) {
    throw InvalidStateError("density matrix trace " + fmt_double(tr.real()) + " != 1");
  }
  if (hermitian_eigenvalues(m_)[0] < -kAlgebraTol) {
    throw InvalidStateError("density matrix has a negative eigenvalue");
  }
}

std::array<double, 2> DensityMatrix::eigenvalues() const { return hermitian_eigenvalues(m_); }

double DensityMatrix::determinant() const {
  // Real for Hermitian input; clamp roundoff on pure states.
  return std::max(0.0, m_.determinant().real());
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix DensityMatrix::maximally_mixed() { return bloch_to_density({0.0, 0.0, 0.0}); }
DensityMatrix DensityMatrix::plus() { return bloch_to_density({1.0, 0.0, 0.0}); }
DensityMatrix DensityMatrix::minus() { return bloch_to_density({-1.0, 0.0, 0.0}); }
DensityMatrix DensityMatrix::up() { return bloch_to_density({0.0, 0.0, 1.0}); }
DensityMatrix DensityMatrix::down() { return bloch_to_density({0.0, 0.0, -1.0}); }

DensityMatrix bloch_to_density(const BlochVector& in) {
  const double n = in.norm();
  if (!(n <= 1.0 + kBlochTol)) {
    throw BlochNormError("Bloch vector norm " + fmt_double(n) + " exceeds 1");
  }
  // Inside the slack band the vector is pulled back onto the sphere; the
  // eigenvalue check of DensityMatrix is tighter than the norm slack.
  const BlochVector r = n > 1.0 ? BlochVector{in.rx / n, in.ry / n, in.rz / n} : in;
  Matrix2c m;
  m << Complex(0.5 * (1.0 + r.rz), 0.0), Complex(0.5 * r.rx, -0.5 * r.ry),
      Complex(0.5 * r.rx, 0.5 * r.ry), Complex(0.5 * (1.0 - r.rz), 0.0);
  return DensityMatrix(m);
}

BlochVector density_to_bloch(const DensityMatrix& rho) {
  const auto& m = rho.matrix();
  return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

double expectation(const QubitOperator& x, const DensityMatrix& rho) {
  if (!x.is_hermitian()) {
    throw NonHermitianError("expectation: observable is not Hermitian");
  }
  return (x.matrix() * rho.matrix()).trace().real();
}

}  // namespace nsit
