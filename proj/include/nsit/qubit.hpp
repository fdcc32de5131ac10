#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace nsit {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

/// Tolerance for algebraic identities (Hermiticity, trace, round trips).
inline constexpr double kAlgebraTol = 1e-12;
/// Slack on the Bloch ball radius.
inline constexpr double kBlochTol = 1e-10;

/// Arbitrary 2x2 complex operator on the qubit Hilbert space.
///
/// Basis convention: index 0 is |up> (sigma_z = +1), index 1 is |down>.
class QubitOperator {
 public:
  QubitOperator() : m_(Matrix2c::Zero()) {}
  explicit QubitOperator(const Matrix2c& m) : m_(m) {}
  QubitOperator(Complex a00, Complex a01, Complex a10, Complex a11) {
    m_ << a00, a01, a10, a11;
  }

  const Matrix2c& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }

  Complex trace() const { return m_.trace(); }
  Complex determinant() const { return m_.determinant(); }
  QubitOperator adjoint() const { return QubitOperator(m_.adjoint()); }
  bool is_hermitian(double tol = kAlgebraTol) const;

  friend QubitOperator operator+(const QubitOperator& a, const QubitOperator& b) {
    return QubitOperator(a.m_ + b.m_);
  }
  friend QubitOperator operator-(const QubitOperator& a, const QubitOperator& b) {
    return QubitOperator(a.m_ - b.m_);
  }
  friend QubitOperator operator*(const QubitOperator& a, const QubitOperator& b) {
    return QubitOperator(a.m_ * b.m_);
  }
  friend QubitOperator operator*(Complex s, const QubitOperator& a) {
    return QubitOperator(s * a.m_);
  }
  friend QubitOperator operator*(double s, const QubitOperator& a) {
    return QubitOperator(s * a.m_);
  }

 private:
  Matrix2c m_;
};

/// Maximum elementwise modulus of a - b.
double max_abs_diff(const QubitOperator& a, const QubitOperator& b);

struct PauliBasis {
  QubitOperator x;
  QubitOperator y;
  QubitOperator z;
  QubitOperator identity;
};

/// The (sigma_x, sigma_y, sigma_z, I) basis, in that order everywhere.
const PauliBasis& pauli_basis();

QubitOperator sigma_plus();   // (sigma_x + i sigma_y) / 2 = |up><down|
QubitOperator sigma_minus();  // (sigma_x - i sigma_y) / 2 = |down><up|
QubitOperator projector_plus();
QubitOperator projector_minus();

/// Coordinates of an observable X = cx sx + cy sy + cz sz + cI I.
struct PauliCoefficients {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double cI = 0.0;

  Eigen::Vector4d as_vector() const { return {cx, cy, cz, cI}; }
  static PauliCoefficients from_vector(const Eigen::Vector4d& v) {
    return {v(0), v(1), v(2), v(3)};
  }
};

/// Decomposes a Hermitian operator; throws NonHermitianError otherwise.
PauliCoefficients to_pauli(const QubitOperator& x);
QubitOperator from_pauli(const PauliCoefficients& c);

struct BlochVector {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;

  double norm() const;
  std::array<double, 3> as_array() const { return {rx, ry, rz}; }
};

/// Unit-trace, Hermitian, positive semidefinite 2x2 matrix. The constructor
/// validates all three properties and throws InvalidStateError on failure.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix2c& m);
  explicit DensityMatrix(const QubitOperator& op) : DensityMatrix(op.matrix()) {}

  const Matrix2c& matrix() const { return m_; }
  QubitOperator as_operator() const { return QubitOperator(m_); }
  Complex operator()(int row, int col) const { return m_(row, col); }

  /// Closed-form eigenvalues, ascending.
  std::array<double, 2> eigenvalues() const;
  double determinant() const;
  double purity() const;

  static DensityMatrix maximally_mixed();
  static DensityMatrix plus();   // |+><+|
  static DensityMatrix minus();  // |-><-|
  static DensityMatrix up();
  static DensityMatrix down();

 private:
  Matrix2c m_;
};

/// Eigenvalues of a 2x2 Hermitian matrix from trace and determinant.
std::array<double, 2> hermitian_eigenvalues(const Matrix2c& m);

/// rho = (I + r . sigma) / 2. Throws BlochNormError when |r| > 1 + 1e-10;
/// vectors with 1 < |r| <= 1 + 1e-10 are normalized to the sphere.
DensityMatrix bloch_to_density(const BlochVector& r);
BlochVector density_to_bloch(const DensityMatrix& rho);

/// tr(X rho) for Hermitian X; throws NonHermitianError otherwise.
double expectation(const QubitOperator& x, const DensityMatrix& rho);

}  // namespace nsit
