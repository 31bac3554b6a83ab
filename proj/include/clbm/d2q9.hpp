#ifndef CLBM_D2Q9_HPP
#define CLBM_D2Q9_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace clbm {

inline constexpr int kQ = 9;

template <typename Scalar>
using PopulationVector = Eigen::Matrix<Scalar, kQ, 1>;

template <typename Scalar>
using VelocityMatrix = Eigen::Matrix<Scalar, kQ, kQ>;

/// A Q x Q block indexed (j, k), row-major so that its storage order is j*Q + k.
template <typename Scalar>
using PairBlock = Eigen::Matrix<Scalar, kQ, kQ, Eigen::RowMajor>;

/// Rank-3 coefficient tensor T_ijk stored as a Q x Q^2 matrix with column j*Q + k.
template <typename Scalar>
using PairTensor = Eigen::Matrix<Scalar, kQ, kQ * kQ>;

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

/// D2Q9 lattice: index 0 is the rest particle, 1-4 the axis neighbours and
/// 5-8 the diagonals. All modules share this ordering.
template <typename Scalar = double>
struct VelocitySet {
  static constexpr int Q = kQ;

  PopulationVector<Scalar> weights;
  Eigen::Matrix<int, 2, kQ> velocities;
  Scalar cs2;

  Vector2<Scalar> velocity(int i) const { return velocities.col(i).template cast<Scalar>(); }
  int cx(int i) const { return velocities(0, i); }
  int cy(int i) const { return velocities(1, i); }
  int dot(int i, int j) const { return velocities.col(i).dot(velocities.col(j)); }
};

template <typename Scalar = double>
VelocitySet<Scalar> build_velocity_set() {
  VelocitySet<Scalar> vs;
  const Scalar rest = Scalar(4) / Scalar(9);
  const Scalar axis = Scalar(1) / Scalar(9);
  const Scalar diag = Scalar(1) / Scalar(36);
  vs.weights << rest, axis, axis, axis, axis, diag, diag, diag, diag;
  // clang-format off
  vs.velocities << 0, 1, 0, -1,  0, 1, -1, -1,  1,
                   0, 0, 1,  0, -1, 1,  1, -1, -1;
  // clang-format on
  vs.cs2 = Scalar(1) / Scalar(3);
  return vs;
}

template <typename Scalar>
struct Moments {
  Scalar density;
  Vector2<Scalar> momentum;

  Vector2<Scalar> velocity() const { return momentum / density; }
};

/// Second-order polynomial equilibrium of the BGK model.
template <typename Scalar>
PopulationVector<Scalar> equilibrium(Scalar rho, const Vector2<Scalar>& u, const VelocitySet<Scalar>& vs) {
  if (!(rho > Scalar(0))) {
    throw std::invalid_argument("equilibrium: density must be positive");
  }
  const Scalar cs2 = vs.cs2;
  const Scalar uu = u.squaredNorm();
  PopulationVector<Scalar> feq;
  for (int i = 0; i < kQ; ++i) {
    const Scalar cu = vs.velocity(i).dot(u);
    feq(i) = vs.weights(i) * rho *
             (Scalar(1) + cu / cs2 + cu * cu / (Scalar(2) * cs2 * cs2) - uu / (Scalar(2) * cs2));
  }
  return feq;
}

template <typename Derived>
Moments<typename Derived::Scalar> moments(const Eigen::MatrixBase<Derived>& f,
                                          const VelocitySet<typename Derived::Scalar>& vs) {
  using Scalar = typename Derived::Scalar;
  Moments<Scalar> m{Scalar(0), Vector2<Scalar>::Zero()};
  for (int i = 0; i < kQ; ++i) {
    m.density += f(i);
    m.momentum += vs.velocity(i) * f(i);
  }
  return m;
}

/// Coefficients of the collision written as a polynomial in the populations,
/// valid in the weakly-compressible limit 1/rho ~ 2 - rho.
///
/// The cubic tensor Cc_ijkl does not depend on l and equals -(omega/2) Qt_ijk,
/// so it is never materialised; use cubic() for element access.
template <typename Scalar = double>
struct CollisionTensors {
  Scalar omega;
  VelocityMatrix<Scalar> L;
  PairTensor<Scalar> Qt;
  VelocityMatrix<Scalar> A;
  PairTensor<Scalar> B;

  Scalar quadratic_eq(int i, int j, int k) const { return Qt(i, j * kQ + k); }
  Scalar quadratic(int i, int j, int k) const { return B(i, j * kQ + k); }
  Scalar cubic(int i, int j, int k, int /*l*/) const { return -omega / Scalar(2) * Qt(i, j * kQ + k); }
  Scalar cubic_factor() const { return -omega / Scalar(2); }
};

inline void require_relaxation_frequency(double omega, const char* who) {
  if (!(omega > 0.0 && omega < 2.0)) {
    throw std::invalid_argument(std::string(who) + ": omega must lie in (0, 2), got " + std::to_string(omega));
  }
}

template <typename Scalar>
CollisionTensors<Scalar> build_tensors(Scalar omega, const VelocitySet<Scalar>& vs) {
  require_relaxation_frequency(static_cast<double>(omega), "build_tensors");
  const Scalar cs2 = vs.cs2;
  const Scalar cs4 = cs2 * cs2;

  CollisionTensors<Scalar> t;
  t.omega = omega;
  for (int i = 0; i < kQ; ++i) {
    for (int j = 0; j < kQ; ++j) {
      t.L(i, j) = vs.weights(i) * (Scalar(1) + Scalar(vs.dot(i, j)) / cs2);
      for (int k = 0; k < kQ; ++k) {
        t.Qt(i, j * kQ + k) =
            vs.weights(i) / cs4 * (Scalar(vs.dot(i, j) * vs.dot(i, k)) - cs2 * Scalar(vs.dot(j, k)));
      }
    }
  }
  t.A = (Scalar(1) - omega) * VelocityMatrix<Scalar>::Identity() + omega * t.L;
  t.B = omega * t.Qt;
  return t;
}

/// Contraction sum_jk T_ijk M_jk of a rank-3 tensor with a pair block.
template <typename Scalar, typename Derived>
PopulationVector<Scalar> contract_pair(const PairTensor<Scalar>& tensor, const Eigen::MatrixBase<Derived>& block) {
  const PairBlock<Scalar> m = block;
  return tensor * Eigen::Map<const Eigen::Matrix<Scalar, kQ * kQ, 1>>(m.data());
}

/// Kinematic viscosity in lattice units. omega = 2 is accepted as the inviscid limit.
template <typename Scalar>
Scalar viscosity(Scalar omega) {
  if (!(omega > Scalar(0) && omega <= Scalar(2))) {
    throw std::invalid_argument("viscosity: omega must lie in (0, 2]");
  }
  return (Scalar(2) / omega - Scalar(1)) / Scalar(6);
}

template <typename Scalar>
Scalar reynolds(Scalar speed, Scalar length, Scalar nu) {
  if (!(nu > Scalar(0))) {
    throw std::invalid_argument("reynolds: viscosity must be positive");
  }
  return std::abs(speed) * length / nu;
}

}  // namespace clbm

#endif  // CLBM_D2Q9_HPP
