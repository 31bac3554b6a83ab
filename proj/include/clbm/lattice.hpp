#ifndef CLBM_LATTICE_HPP
#define CLBM_LATTICE_HPP

#include "clbm/d2q9.hpp"
#include "clbm/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clbm {

/// Distribution functions f_i(x, y) on a fully periodic nx x ny grid.
///
/// Storage is a row-major Q x N matrix; site index s = x * ny + y, so the
/// flattened data is ordered (i, x, y) and coincides with the first-degree
/// block of the Carleman vector.
template <typename Scalar = double>
class LatticeField {
 public:
  using Storage = Eigen::Matrix<Scalar, kQ, Eigen::Dynamic, Eigen::RowMajor>;
  using Index = Eigen::Index;

  LatticeField() = default;
  LatticeField(int nx, int ny) : nx_(nx), ny_(ny), data_(Storage::Zero(kQ, Index(nx) * ny)) {
    if (nx < 1 || ny < 1) {
      throw std::invalid_argument("LatticeField: grid extents must be positive");
    }
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  Index sites() const { return data_.cols(); }
  Index site(int x, int y) const { return Index(x) * ny_ + y; }
  int site_x(Index s) const { return static_cast<int>(s / ny_); }
  int site_y(Index s) const { return static_cast<int>(s % ny_); }

  /// Site reached from s after moving by (dx, dy) with periodic wrap.
  Index shifted(Index s, int dx, int dy) const {
    const int x = ((site_x(s) + dx) % nx_ + nx_) % nx_;
    const int y = ((site_y(s) + dy) % ny_ + ny_) % ny_;
    return site(x, y);
  }

  Scalar& operator()(int i, int x, int y) { return data_(i, site(x, y)); }
  Scalar operator()(int i, int x, int y) const { return data_(i, site(x, y)); }

  Storage& data() { return data_; }
  const Storage& data() const { return data_; }

  PopulationVector<Scalar> at_site(Index s) const { return data_.col(s); }

  bool all_finite() const { return data_.allFinite(); }

 private:
  int nx_ = 0;
  int ny_ = 0;
  Storage data_;
};

enum class CollisionKind { bgk, mode_coupling };

struct FlowConfig {
  int nx = 32;
  int ny = 32;
  double omega = 1.5;
  double ax = 0.3;
  double ay = 0.0;
  int kx = 1;
  int ky = 1;
  int steps = 100;
  CollisionKind collision = CollisionKind::bgk;

  void validate() const {
    if (nx < 1 || ny < 1) throw std::invalid_argument("FlowConfig: nx and ny must be positive");
    require_relaxation_frequency(omega, "FlowConfig");
    if (!(ax >= 0.0 && ax <= 1.0) || !(ay >= 0.0 && ay <= 1.0)) {
      throw std::invalid_argument("FlowConfig: amplitudes must lie in [0, 1]");
    }
    if (steps < 0) throw std::invalid_argument("FlowConfig: steps must be non-negative");
  }
};

/// Kolmogorov-like shear initialisation: u_x varies along y with wave number
/// kx, u_y varies along x with wave number ky.
template <typename Scalar>
LatticeField<Scalar> init_kolmogorov(const FlowConfig& cfg, const VelocitySet<Scalar>& vs) {
  cfg.validate();
  LatticeField<Scalar> field(cfg.nx, cfg.ny);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  for (int x = 0; x < cfg.nx; ++x) {
    for (int y = 0; y < cfg.ny; ++y) {
      const Scalar shear_x = Scalar(cfg.ax) * std::cos(two_pi * Scalar(cfg.kx) * Scalar(y) / Scalar(cfg.ny));
      const Scalar shear_y = Scalar(cfg.ay) * std::cos(two_pi * Scalar(cfg.ky) * Scalar(x) / Scalar(cfg.nx));
      for (int i = 0; i < kQ; ++i) {
        // c_i . c_1 = c_ix and c_i . c_2 = c_iy
        field(i, x, y) = vs.weights(i) * (Scalar(1) + shear_x * Scalar(vs.cx(i)) + shear_y * Scalar(vs.cy(i)));
      }
    }
  }
  return field;
}

template <typename Scalar>
LatticeField<Scalar> collide_bgk(const LatticeField<Scalar>& field, Scalar omega, const VelocitySet<Scalar>& vs) {
  LatticeField<Scalar> out(field.nx(), field.ny());
  for (Eigen::Index s = 0; s < field.sites(); ++s) {
    const PopulationVector<Scalar> f = field.at_site(s);
    const Moments<Scalar> m = moments(f, vs);
    out.data().col(s) = (Scalar(1) - omega) * f + omega * equilibrium(m.density, m.velocity(), vs);
  }
  return out;
}

/// f*_i = A_ij f_j + B_ijk f_j f_k + Cc_ijkl f_j f_k f_l at every site.
template <typename Scalar>
PopulationVector<Scalar> collide_site_mode_coupling(const PopulationVector<Scalar>& f,
                                                    const CollisionTensors<Scalar>& t) {
  const PairBlock<Scalar> ff = f * f.transpose();
  const PopulationVector<Scalar> quad = contract_pair(t.B, ff);
  // Cc_ijkl f_j f_k f_l = -(1/2) B_ijk f_j f_k * sum_l f_l
  return t.A * f + quad - Scalar(0.5) * f.sum() * quad;
}

template <typename Scalar>
LatticeField<Scalar> collide_mode_coupling(const LatticeField<Scalar>& field, const CollisionTensors<Scalar>& t) {
  LatticeField<Scalar> out(field.nx(), field.ny());
  for (Eigen::Index s = 0; s < field.sites(); ++s) {
    out.data().col(s) = collide_site_mode_coupling<Scalar>(field.at_site(s), t);
  }
  return out;
}

/// Periodic destination table: dest[i][s] is the site that population i at s moves to.
template <typename Scalar>
std::vector<std::vector<Eigen::Index>> streaming_table(const LatticeField<Scalar>& field,
                                                       const VelocitySet<Scalar>& vs) {
  std::vector<std::vector<Eigen::Index>> dest(kQ, std::vector<Eigen::Index>(field.sites()));
  for (int i = 0; i < kQ; ++i) {
    for (Eigen::Index s = 0; s < field.sites(); ++s) {
      dest[i][s] = field.shifted(s, vs.cx(i), vs.cy(i));
    }
  }
  return dest;
}

template <typename Scalar>
LatticeField<Scalar> stream(const LatticeField<Scalar>& field, const VelocitySet<Scalar>& vs) {
  LatticeField<Scalar> out(field.nx(), field.ny());
  for (int i = 0; i < kQ; ++i) {
    for (Eigen::Index s = 0; s < field.sites(); ++s) {
      out.data()(i, field.shifted(s, vs.cx(i), vs.cy(i))) = field.data()(i, s);
    }
  }
  return out;
}

/// One time step: collide, then stream.
template <typename Scalar>
LatticeField<Scalar> step(const LatticeField<Scalar>& field, const FlowConfig& cfg,
                          const CollisionTensors<Scalar>& t, const VelocitySet<Scalar>& vs) {
  if (cfg.collision == CollisionKind::bgk) {
    return stream(collide_bgk(field, Scalar(cfg.omega), vs), vs);
  }
  return stream(collide_mode_coupling(field, t), vs);
}

template <typename Scalar>
struct MacroscopicField {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rho;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ux;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> uy;
};

template <typename Scalar>
MacroscopicField<Scalar> macroscopic(const LatticeField<Scalar>& field, const VelocitySet<Scalar>& vs) {
  const Eigen::Index n = field.sites();
  MacroscopicField<Scalar> m{decltype(m.rho)(n), decltype(m.ux)(n), decltype(m.uy)(n)};
  for (Eigen::Index s = 0; s < n; ++s) {
    const Moments<Scalar> mo = moments(field.at_site(s), vs);
    m.rho(s) = mo.density;
    m.ux(s) = mo.momentum(0) / mo.density;
    m.uy(s) = mo.momentum(1) / mo.density;
  }
  return m;
}

/// Sum over all populations and sites in fixed order with Neumaier compensation.
template <typename Scalar>
Scalar global_mass(const LatticeField<Scalar>& field) {
  Scalar sum(0);
  Scalar comp(0);
  const Scalar* p = field.data().data();
  for (Eigen::Index n = 0; n < field.data().size(); ++n) {
    const Scalar v = p[n];
    const Scalar t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

struct VelocityAmplitudes {
  double ux;
  double uy;
};

/// Fourier amplitude of u_x(y) at wave number kx and of u_y(x) at ky, both
/// averaged over the other direction. For a pure cosine profile U cos(2 pi k y / Ny)
/// the returned value is U.
template <typename Scalar>
VelocityAmplitudes velocity_amplitudes(const LatticeField<Scalar>& field, int kx, int ky,
                                       const VelocitySet<Scalar>& vs) {
  const MacroscopicField<Scalar> m = macroscopic(field, vs);
  const double two_pi = 2.0 * std::numbers::pi;
  std::complex<double> cx(0.0, 0.0);
  std::complex<double> cy(0.0, 0.0);
  for (int x = 0; x < field.nx(); ++x) {
    for (int y = 0; y < field.ny(); ++y) {
      const Eigen::Index s = field.site(x, y);
      cx += static_cast<double>(m.ux(s)) * std::polar(1.0, -two_pi * kx * y / field.ny());
      cy += static_cast<double>(m.uy(s)) * std::polar(1.0, -two_pi * ky * x / field.nx());
    }
  }
  const double n = static_cast<double>(field.sites());
  const double fx = (kx % field.ny() == 0) ? 1.0 : 2.0;
  const double fy = (ky % field.nx() == 0) ? 1.0 : 2.0;
  return {fx * std::abs(cx) / n, fy * std::abs(cy) / n};
}

struct DiagnosticRow {
  int t;
  double amplitude_ux;
  double amplitude_uy;
};

template <typename Scalar>
struct Trajectory {
  std::vector<DiagnosticRow> diagnostics;
  LatticeField<Scalar> final_field;
};

/// Runs cfg.steps time steps, recording amplitudes at t = 0..steps. The
/// optional observer sees the field after every step (and at t = 0).
template <typename Scalar>
Trajectory<Scalar> run(LatticeField<Scalar> field, const FlowConfig& cfg, const CollisionTensors<Scalar>& t,
                       const VelocitySet<Scalar>& vs,
                       const std::function<void(int, const LatticeField<Scalar>&)>& observer = {}) {
  cfg.validate();
  Trajectory<Scalar> traj;
  traj.diagnostics.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  auto record = [&](int step_index) {
    const VelocityAmplitudes a = velocity_amplitudes(field, cfg.kx, cfg.ky, vs);
    traj.diagnostics.push_back({step_index, a.ux, a.uy});
    if (observer) observer(step_index, field);
  };
  if (!field.all_finite()) throw NumericalError("lbm run: non-finite population in the initial state");
  record(0);
  for (int n = 1; n <= cfg.steps; ++n) {
    field = step(field, cfg, t, vs);
    if (!field.all_finite()) {
      throw NumericalError("lbm run: non-finite population at step " + std::to_string(n));
    }
    record(n);
  }
  traj.final_field = std::move(field);
  return traj;
}

/// Decay rate per step: negated least-squares slope of log(amplitude) against
/// the sample index.
inline double fit_decay(std::span<const double> amplitudes) {
  if (amplitudes.size() < 2) {
    throw std::invalid_argument("fit_decay: need at least two samples");
  }
  const double n = static_cast<double>(amplitudes.size());
  double mean_t = 0.0;
  double mean_l = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    if (!(amplitudes[k] > 0.0)) {
      throw std::invalid_argument("fit_decay: amplitudes must be positive (index " + std::to_string(k) + ")");
    }
    mean_t += static_cast<double>(k);
    mean_l += std::log(amplitudes[k]);
  }
  mean_t /= n;
  mean_l /= n;
  double stt = 0.0;
  double stl = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const double dt = static_cast<double>(k) - mean_t;
    stt += dt * dt;
    stl += dt * (std::log(amplitudes[k]) - mean_l);
  }
  return -stl / stt;
}

}  // namespace clbm

#endif  // CLBM_LATTICE_HPP
