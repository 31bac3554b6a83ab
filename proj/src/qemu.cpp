#include "clbm/qemu.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace clbm::qemu {

namespace {

constexpr double kPhaseTolerance = 1e-10;

int ceil_log2(std::uint64_t n) { return qubits_for(n); }

// Geometry-only field used to evaluate periodic shifts.
LatticeField<double> geometry(const RegisterLayout& layout) { return LatticeField<double>(layout.nx, layout.ny); }

bool valid_velocity(int v) { return v < kQ; }

}  // namespace

RegisterLayout make_layout(int nx, int ny, bool single_step) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("make_layout: grid extents must be positive");
  RegisterLayout l;
  l.nx = nx;
  l.ny = ny;
  l.q_tau = ceil_log2(2);
  l.q_v = ceil_log2(kQ);
  l.q_p = ceil_log2(static_cast<std::uint64_t>(nx) * static_cast<std::uint64_t>(ny));
  l.single_step = single_step;
  if (l.total_qubits() + 1 > 40) throw std::invalid_argument("make_layout: register too large to emulate");
  return l;
}

QuantumState embed(const CarlemanState<double>& s) {
  if (s.order != 2) throw std::invalid_argument("embed: only order-2 states have a register layout");
  if (s.exhausted) throw StateExhaustedError("embed: state has already been streamed");
  const bool single = s.locality == Locality::local_single_step;
  QuantumState qs;
  qs.layout = make_layout(s.f.nx(), s.f.ny(), single);
  const RegisterLayout& l = qs.layout;
  const Index N = s.sites();

  const double norm = std::sqrt(s.f.data().squaredNorm() + s.g.squaredNorm());
  if (!(norm > 0.0)) throw ZeroScaleError("embed: cannot amplitude-encode a zero vector");
  qs.scale = norm;
  qs.data_block = 1;
  qs.amplitudes = StateVector::Zero(2 * l.dim());
  const Index base = l.dim();

  for (int i = 0; i < kQ; ++i) {
    for (Index x = 0; x < N; ++x) {
      qs.amplitudes(base + l.index(0, i, x, 0, 0)) = s.f.data()(i, x) / norm;
      for (int j = 0; j < kQ; ++j) {
        if (single) {
          qs.amplitudes(base + l.index(1, i, x, j, 0)) = s.g(s.g_local_index(i, x, j)) / norm;
        } else {
          for (Index x2 = 0; x2 < N; ++x2) {
            qs.amplitudes(base + l.index(1, i, x, j, x2)) = s.g(s.g_index(i, x, j, x2)) / norm;
          }
        }
      }
    }
  }
  return qs;
}

Readback readback(const QuantumState& qs) {
  const RegisterLayout& l = qs.layout;
  if (qs.amplitudes.size() != 2 * l.dim()) throw std::invalid_argument("readback: amplitude length does not match layout");
  const Index N = l.sites();
  const Index base = qs.data_block == 0 ? 0 : l.dim();

  Readback r;
  CarlemanState<double>& s = r.state;
  s.order = 2;
  s.cutoff = Cutoff::truncation;
  s.locality = l.single_step ? Locality::local_single_step : Locality::full_pairs;
  s.f = LatticeField<double>(l.nx, l.ny);
  s.g = Eigen::VectorXd::Zero(l.single_step ? N * kQ * kQ : N * N * kQ * kQ);

  // Everything the embedding never writes is leakage.
  std::vector<bool> used(static_cast<std::size_t>(l.dim()), false);
  auto take = [&](Index idx) {
    used[static_cast<std::size_t>(idx)] = true;
    const Complex a = qs.amplitudes(base + idx);
    r.leakage_max = std::max(r.leakage_max, std::abs(a.imag()) * qs.scale);
    return qs.scale * a.real();
  };
  for (int i = 0; i < kQ; ++i) {
    for (Index x = 0; x < N; ++x) {
      s.f.data()(i, x) = take(l.index(0, i, x, 0, 0));
      for (int j = 0; j < kQ; ++j) {
        if (l.single_step) {
          s.g(s.g_local_index(i, x, j)) = take(l.index(1, i, x, j, 0));
        } else {
          for (Index x2 = 0; x2 < N; ++x2) s.g(s.g_index(i, x, j, x2)) = take(l.index(1, i, x, j, x2));
        }
      }
    }
  }
  const Index other = l.dim() - base;
  for (Index k = 0; k < l.dim(); ++k) {
    if (!used[static_cast<std::size_t>(k)]) r.leakage_max = std::max(r.leakage_max, qs.scale * std::abs(qs.amplitudes(base + k)));
    r.leakage_max = std::max(r.leakage_max, qs.scale * std::abs(qs.amplitudes(other + k)));
  }
  r.leakage_warning = r.leakage_max > kLeakageThreshold;

  // The single-step circuit streams f only; the stale pairs are not a valid
  // continuation, mirroring stream_lifted on a local state.
  if (qs.pairs_stale) {
    s.g.setZero();
    s.exhausted = true;
  }
  return r;
}

SparseOperator build_collision_matrix(const CollisionTensors<double>& t, const RegisterLayout& l) {
  using Triplet = Eigen::Triplet<double, Index>;
  std::vector<Triplet> entries;
  const double kZero = 0.0;

  if (l.single_step) {
    const Index F = l.factor_dim();
    for (int i = 0; i < kQ; ++i) {
      for (int j = 0; j < kQ; ++j) {
        if (t.A(i, j) != kZero) entries.emplace_back(l.factor_index(0, i, 0), l.factor_index(0, j, 0), t.A(i, j));
        for (int k = 0; k < kQ; ++k) {
          const double b = t.quadratic(i, j, k);
          if (b != kZero) entries.emplace_back(l.factor_index(0, i, 0), l.factor_index(1, j, k), b);
        }
      }
    }
    for (int i = 0; i < kQ; ++i) {
      for (int j = 0; j < kQ; ++j) {
        for (int k = 0; k < kQ; ++k) {
          for (int m = 0; m < kQ; ++m) {
            const double a = t.A(i, k) * t.A(j, m);
            if (a != kZero) entries.emplace_back(l.factor_index(1, i, j), l.factor_index(1, k, m), a);
          }
        }
      }
    }
    SparseOperator C(F, F);
    C.setFromTriplets(entries.begin(), entries.end());
    return C;
  }

  // The quadratic term reads the same-site pair g(j, x, k, x) into f(i, x).
  const Index N = l.sites();
  for (Index x = 0; x < N; ++x) {
    for (int i = 0; i < kQ; ++i) {
      const Index row = l.index(0, i, x, 0, 0);
      for (int j = 0; j < kQ; ++j) {
        if (t.A(i, j) != kZero) entries.emplace_back(row, l.index(0, j, x, 0, 0), t.A(i, j));
        for (int k = 0; k < kQ; ++k) {
          const double b = t.quadratic(i, j, k);
          if (b != kZero) entries.emplace_back(row, l.index(1, j, x, k, x), b);
        }
      }
    }
  }
  for (Index x1 = 0; x1 < N; ++x1) {
    for (Index x2 = 0; x2 < N; ++x2) {
      for (int i = 0; i < kQ; ++i) {
        for (int j = 0; j < kQ; ++j) {
          const Index row = l.index(1, i, x1, j, x2);
          for (int k = 0; k < kQ; ++k) {
            for (int m = 0; m < kQ; ++m) {
              const double a = t.A(i, k) * t.A(j, m);
              if (a != kZero) entries.emplace_back(row, l.index(1, k, x1, m, x2), a);
            }
          }
        }
      }
    }
  }
  SparseOperator C(l.dim(), l.dim());
  C.setFromTriplets(entries.begin(), entries.end());
  return C;
}

Eigen::MatrixXd build_symmetric_single_step_matrix(const CollisionTensors<double>& t) {
  constexpr int kPairs = kQ * (kQ + 1) / 2;
  constexpr int kDim = kQ + kPairs;
  // pair(i, j) with i <= j, enumerated row by row as in pack_symmetric.
  Eigen::Matrix<int, kQ, kQ> pair;
  int k = kQ;
  for (int i = 0; i < kQ; ++i) {
    for (int j = i; j < kQ; ++j) {
      pair(i, j) = k;
      pair(j, i) = k;
      ++k;
    }
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(kDim, kDim);
  for (int i = 0; i < kQ; ++i) {
    for (int j = 0; j < kQ; ++j) {
      C(i, j) = t.A(i, j);
      for (int m = 0; m < kQ; ++m) C(i, pair(j, m)) += t.quadratic(i, j, m);
    }
  }
  for (int i = 0; i < kQ; ++i) {
    for (int j = i; j < kQ; ++j) {
      for (int a = 0; a < kQ; ++a) {
        for (int b = 0; b < kQ; ++b) C(pair(i, j), pair(a, b)) += t.A(i, a) * t.A(j, b);
      }
    }
  }
  return C;
}

SparseOperator hermitian_augment(const SparseOperator& C) {
  if (C.rows() != C.cols()) throw std::invalid_argument("hermitian_augment: matrix must be square");
  using Triplet = Eigen::Triplet<double, Index>;
  const Index D = C.rows();
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(2 * C.nonZeros()));
  for (Index r = 0; r < C.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(C, r); it; ++it) {
      entries.emplace_back(it.row(), D + it.col(), it.value());
      entries.emplace_back(D + it.col(), it.row(), it.value());
    }
  }
  SparseOperator H(2 * D, 2 * D);
  H.setFromTriplets(entries.begin(), entries.end());
  return H;
}

Eigen::MatrixXd hermitian_augment(const Eigen::MatrixXd& C) {
  if (C.rows() != C.cols()) throw std::invalid_argument("hermitian_augment: matrix must be square");
  const Index D = C.rows();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * D, 2 * D);
  H.topRightCorner(D, D) = C;
  H.bottomLeftCorner(D, D) = C.transpose();
  return H;
}

PhasePair phase_pair(double lambda, double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("phase_pair: gamma must be >= 0");
  auto infeasible = [&] {
    std::ostringstream os;
    os.precision(17);
    os << "phase_pair: eigenvalue " << lambda << " is not reachable with gamma = " << gamma;
    return InfeasibleDecompositionError(os.str(), lambda);
  };
  if (gamma == 0.0) {
    if (std::abs(std::abs(lambda) - 1.0) > kPhaseTolerance) throw infeasible();
    const double alpha = lambda > 0.0 ? 0.0 : std::numbers::pi;
    return {alpha, alpha};
  }
  double c;
  if (gamma == 1.0) {
    c = lambda / 2.0;
  } else {
    if (lambda == 0.0) throw infeasible();
    c = (lambda * lambda + 1.0 - gamma * gamma) / (2.0 * lambda);
  }
  if (std::abs(c) > 1.0 + kPhaseTolerance) throw infeasible();
  const double alpha = std::acos(std::clamp(c, -1.0, 1.0));
  const double beta = std::atan2(-std::sin(alpha) / gamma, (lambda - std::cos(alpha)) / gamma);
  return {alpha, beta};
}

StateVector LcuDecomposition::apply(const Eigen::MatrixXcd& block, Complex rest, const StateVector& v) const {
  if (v.size() != dim) throw std::invalid_argument("LcuDecomposition: vector length does not match");
  StateVector out = rest * v;
  const Index m = static_cast<Index>(active.size());
  StateVector sub(m);
  for (Index k = 0; k < m; ++k) sub(k) = v(active[static_cast<std::size_t>(k)]);
  const StateVector res = block * sub;
  for (Index k = 0; k < m; ++k) out(active[static_cast<std::size_t>(k)]) = res(k);
  return out;
}

Eigen::MatrixXcd LcuDecomposition::dense(const Eigen::MatrixXcd& block, Complex rest) const {
  Eigen::MatrixXcd M = rest * Eigen::MatrixXcd::Identity(dim, dim);
  const Index m = static_cast<Index>(active.size());
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) M(active[a], active[b]) = block(a, b);
  }
  return M;
}

namespace {

struct GammaChoice {
  double gamma;
  bool fallback;
  std::string notice;
};

GammaChoice choose_gamma(const LcuOptions& options, double lo, double hi) {
  if (options.gamma) {
    if (!(*options.gamma >= 0.0)) throw std::invalid_argument("lcu_decompose: gamma must be >= 0");
    return {*options.gamma, false, {}};
  }
  if (lo > 0.0) return {1.0 - lo / hi, false, {}};
  std::ostringstream os;
  os << "lcu_decompose: spectrum [" << lo << ", " << hi
     << "] is not positive, so gamma = 1 - c_m/c_M violates the width condition; using gamma = 1";
  return {1.0, true, os.str()};
}

void finish(LcuDecomposition& d, const GammaChoice& g, double radius) {
  if (!(radius > 0.0)) throw ZeroScaleError("lcu_decompose: operator is zero");
  d.gamma = g.gamma;
  d.fallback = g.fallback;
  d.notice = g.notice;
  d.c_max = radius / (1.0 + g.gamma);
  d.gamma_angle = std::acos(std::sqrt(g.gamma / (g.gamma + 1.0)));
}

void set_rest(LcuDecomposition& d, bool has_zero_eigenvalue) {
  if (!has_zero_eigenvalue) {
    d.ua_rest = d.ub_rest = Complex(1.0, 0.0);
    return;
  }
  const PhasePair p = phase_pair(0.0, d.gamma);
  d.ua_rest = std::polar(1.0, p.alpha);
  d.ub_rest = std::polar(1.0, p.beta);
}

void check_symmetric(const SparseOperator& H) {
  if (H.rows() != H.cols()) throw std::invalid_argument("lcu_decompose: matrix must be square");
  if (H.nonZeros() == 0) return;
  const SparseOperator diff = H - SparseOperator(H.transpose());
  const double scale = std::max(1.0, H.coeffs().cwiseAbs().maxCoeff());
  if (diff.nonZeros() > 0 && diff.coeffs().cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("lcu_decompose: matrix is not Hermitian");
  }
}

bool is_dilation(const SparseOperator& H) {
  if (H.rows() % 2 != 0) return false;
  const Index D = H.rows() / 2;
  for (Index r = 0; r < H.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(H, r); it; ++it) {
      if ((it.row() < D) == (it.col() < D) && it.value() != 0.0) return false;
    }
  }
  return true;
}

LcuDecomposition decompose_generic(const SparseOperator& H, const LcuOptions& options) {
  LcuDecomposition d;
  d.dim = H.rows();
  for (Index r = 0; r < H.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(H, r); it; ++it) {
      if (it.value() != 0.0) {
        d.active.push_back(r);
        break;
      }
    }
  }
  const Index m = static_cast<Index>(d.active.size());
  std::vector<Index> pos(static_cast<std::size_t>(d.dim), -1);
  for (Index k = 0; k < m; ++k) pos[d.active[k]] = k;
  Eigen::MatrixXd Ha = Eigen::MatrixXd::Zero(m, m);
  for (Index r = 0; r < H.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(H, r); it; ++it) Ha(pos[it.row()], pos[it.col()]) = it.value();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ha);
  if (es.info() != Eigen::Success) throw NumericalError("lcu_decompose: eigendecomposition failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const bool complement = m < d.dim;
  double lo = m > 0 ? lam.minCoeff() : 0.0;
  double hi = m > 0 ? lam.maxCoeff() : 0.0;
  if (complement) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  const double radius = std::max(std::abs(lo), std::abs(hi));
  finish(d, choose_gamma(options, lo, hi), radius);

  Eigen::VectorXcd ea(m), eb(m);
  for (Index k = 0; k < m; ++k) {
    const PhasePair p = phase_pair(lam(k) / d.c_max, d.gamma);
    ea(k) = std::polar(1.0, p.alpha);
    eb(k) = std::polar(1.0, p.beta);
  }
  const Eigen::MatrixXcd V = es.eigenvectors().cast<Complex>();
  d.ua_active = V * ea.asDiagonal() * V.adjoint();
  d.ub_active = V * eb.asDiagonal() * V.adjoint();
  set_rest(d, complement);
  return d;
}

// For H = [[0, C], [C^T, 0]], H^2 is block diagonal with the Gram matrices,
// and every function of H splits as H g(H^2) + i h(H^2).
LcuDecomposition decompose_dilation(const SparseOperator& H, const LcuOptions& options) {
  LcuDecomposition d;
  d.dim = H.rows();
  const Index D = d.dim / 2;
  std::vector<bool> touched(static_cast<std::size_t>(D), false);
  for (Index r = 0; r < H.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(H, r); it; ++it) {
      if (it.value() != 0.0) touched[static_cast<std::size_t>(it.row() % D)] = true;
    }
  }
  std::vector<Index> S;
  std::vector<Index> pos(static_cast<std::size_t>(D), -1);
  for (Index k = 0; k < D; ++k) {
    if (touched[static_cast<std::size_t>(k)]) {
      pos[k] = static_cast<Index>(S.size());
      S.push_back(k);
    }
  }
  const Index m = static_cast<Index>(S.size());
  Eigen::MatrixXd Cs = Eigen::MatrixXd::Zero(m, m);
  for (Index r = 0; r < D; ++r) {
    for (SparseOperator::InnerIterator it(H, r); it; ++it) Cs(pos[it.row()], pos[it.col() - D]) = it.value();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(Cs * Cs.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(Cs.transpose() * Cs);
  if (e1.info() != Eigen::Success || e2.info() != Eigen::Success) {
    throw NumericalError("lcu_decompose: Gram eigendecomposition failed");
  }
  const Eigen::VectorXd s1 = e1.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd s2 = e2.eigenvalues().cwiseMax(0.0);
  const double radius = std::sqrt(std::max(s1.maxCoeff(), s2.maxCoeff()));
  finish(d, choose_gamma(options, -radius, radius), radius);

  const double c2 = d.c_max * d.c_max;
  const double gam = d.gamma;
  // cos(alpha) = lambda * g(lambda^2), sin(alpha) = h(lambda^2); phase_pair
  // performs the feasibility check.
  auto gh = [&](double s, double& g, double& h) {
    const double lambda = std::sqrt(s / c2);
    const PhasePair p = phase_pair(lambda, gam);
    h = std::sin(p.alpha);
    if (gam == 1.0) {
      g = 0.5;
    } else if (lambda > 0.0) {
      g = std::cos(p.alpha) / lambda;
    } else {
      g = 0.0;
    }
  };
  Eigen::VectorXd g1(m), h1(m), g2(m), h2(m);
  for (Index k = 0; k < m; ++k) {
    gh(s1(k), g1(k), h1(k));
    gh(s2(k), g2(k), h2(k));
  }
  const Eigen::MatrixXd& V1 = e1.eigenvectors();
  const Eigen::MatrixXd& V2 = e2.eigenvectors();
  const Eigen::MatrixXd Ct = Cs / d.c_max;

  d.active.resize(static_cast<std::size_t>(2 * m));
  for (Index k = 0; k < m; ++k) {
    d.active[k] = S[k];
    d.active[m + k] = D + S[k];
  }
  d.ua_active.resize(2 * m, 2 * m);
  const Complex I(0.0, 1.0);
  d.ua_active.topLeftCorner(m, m) = I * (V1 * h1.asDiagonal() * V1.transpose()).cast<Complex>();
  d.ua_active.bottomRightCorner(m, m) = I * (V2 * h2.asDiagonal() * V2.transpose()).cast<Complex>();
  d.ua_active.topRightCorner(m, m) = (Ct * (V2 * g2.asDiagonal() * V2.transpose())).cast<Complex>();
  d.ua_active.bottomLeftCorner(m, m) = (Ct.transpose() * (V1 * g1.asDiagonal() * V1.transpose())).cast<Complex>();

  if (gam == 0.0) {
    d.ub_active = d.ua_active;
  } else {
    Eigen::MatrixXcd Ht = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
    Ht.topRightCorner(m, m) = Ct.cast<Complex>();
    Ht.bottomLeftCorner(m, m) = Ct.transpose().cast<Complex>();
    d.ub_active = (Ht - d.ua_active) / gam;
  }
  set_rest(d, m < D);
  return d;
}

}  // namespace

LcuDecomposition lcu_decompose(const SparseOperator& H, const LcuOptions& options) {
  check_symmetric(H);
  if (H.nonZeros() == 0) throw ZeroScaleError("lcu_decompose: operator is zero");
  if (!options.force_generic && is_dilation(H)) return decompose_dilation(H, options);
  return decompose_generic(H, options);
}

LcuDecomposition lcu_decompose(const Eigen::MatrixXd& H, const LcuOptions& options) {
  const SparseOperator S = H.sparseView(0.0, 0.0);
  return lcu_decompose(S, options);
}

CircuitOutcome apply_collision_circuit(const QuantumState& qs, const LcuDecomposition& d, CircuitMode mode,
                                       std::uint64_t seed) {
  const RegisterLayout& l = qs.layout;
  const Index total = qs.amplitudes.size();
  const double cg = std::cos(d.gamma_angle);
  const double sg = std::sin(d.gamma_angle);

  // Branches after R(angle), anti-controlled Ub and controlled Ua.
  StateVector top(total), bottom(total);
  if (d.dim == total) {
    top = cg * d.apply_b(qs.amplitudes);
    bottom = sg * d.apply_a(qs.amplitudes);
  } else if (l.single_step && d.dim == 2 * l.factor_dim()) {
    const Index F = l.factor_dim();
    const Index P = Index{1} << l.q_p;
    std::vector<Index> map(static_cast<std::size_t>(2 * F));
    StateVector sub(2 * F);
    for (Index p = 0; p < P; ++p) {
      for (int aug = 0; aug < 2; ++aug) {
        for (Index f = 0; f < F; ++f) {
          const Index tau = f >> (2 * l.q_v);
          const int v1 = static_cast<int>((f >> l.q_v) & ((Index{1} << l.q_v) - 1));
          const int v2 = static_cast<int>(f & ((Index{1} << l.q_v) - 1));
          const Index global = aug * l.dim() + l.index(static_cast<int>(tau), v1, p, v2, 0);
          map[static_cast<std::size_t>(aug * F + f)] = global;
          sub(aug * F + f) = qs.amplitudes(global);
        }
      }
      const StateVector b = d.apply_b(sub);
      const StateVector a = d.apply_a(sub);
      for (Index k = 0; k < 2 * F; ++k) {
        top(map[k]) = cg * b(k);
        bottom(map[k]) = sg * a(k);
      }
    }
  } else {
    throw std::invalid_argument("apply_collision_circuit: decomposition does not match the state dimension");
  }

  // Inverse rotation on the ancilla.
  const StateVector out0 = cg * top + sg * bottom;
  const StateVector out1 = -sg * top + cg * bottom;
  const double p0 = std::clamp(out0.squaredNorm(), 0.0, 1.0);

  int outcome = 0;
  if (mode == CircuitMode::sample) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    outcome = u(rng) < p0 ? 0 : 1;
  }

  CircuitOutcome r;
  r.outcome_bit = outcome;
  r.p_success = p0;
  r.post_state = qs;
  if (outcome == 0) {
    if (!(p0 > 0.0)) throw ZeroScaleError("apply_collision_circuit: success probability is zero");
    r.post_state.amplitudes = out0 / std::sqrt(p0);
    r.post_state.scale = qs.scale * d.c_max * (d.gamma + 1.0) * std::sqrt(p0);
  } else {
    const double p1 = 1.0 - p0;
    r.post_state.amplitudes = out1 / std::sqrt(p1);
  }
  const Index half = total / 2;
  const double n0 = r.post_state.amplitudes.head(half).squaredNorm();
  const double n1 = r.post_state.amplitudes.tail(half).squaredNorm();
  r.post_state.data_block = n0 >= n1 ? 0 : 1;
  return r;
}

PositionPermutation build_streaming_operator(int i, const RegisterLayout& layout) {
  if (i < 0 || i >= kQ) throw std::invalid_argument("build_streaming_operator: velocity index out of range");
  const auto vs = build_velocity_set<double>();
  const LatticeField<double> g = geometry(layout);
  const Index P = Index{1} << layout.q_p;
  PositionPermutation S(static_cast<int>(P));
  for (Index p = 0; p < P; ++p) {
    S.indices()(p) = static_cast<int>(p < layout.sites() ? g.shifted(p, vs.cx(i), vs.cy(i)) : p);
  }
  return S;
}

std::vector<Index> multistreaming_permutation(const RegisterLayout& l) {
  std::vector<Eigen::VectorXi> shift(kQ);
  for (int i = 0; i < kQ; ++i) shift[i] = build_streaming_operator(i, l).indices();
  const Index D = l.dim();
  std::vector<Index> dest(static_cast<std::size_t>(D));
  for (Index k = 0; k < D; ++k) {
    const auto c = l.decode(k);
    Index p1 = c.p1;
    Index p2 = c.p2;
    if (c.tau == 0) {
      if (valid_velocity(c.v1)) p1 = shift[c.v1](p1);
    } else if (!l.single_step) {
      if (valid_velocity(c.v1)) p1 = shift[c.v1](p1);
      if (valid_velocity(c.v2)) p2 = shift[c.v2](p2);
    }
    dest[static_cast<std::size_t>(k)] = l.index(c.tau, c.v1, p1, c.v2, p2);
  }
  return dest;
}

QuantumState apply_multistreaming(const QuantumState& qs) {
  const RegisterLayout& l = qs.layout;
  if (qs.amplitudes.size() != 2 * l.dim()) {
    throw std::invalid_argument("apply_multistreaming: amplitude length does not match layout");
  }
  const std::vector<Index> dest = multistreaming_permutation(l);
  QuantumState out = qs;
  const Index D = l.dim();
  for (Index block = 0; block < 2; ++block) {
    for (Index k = 0; k < D; ++k) out.amplitudes(block * D + dest[k]) = qs.amplitudes(block * D + k);
  }
  if (l.single_step) out.pairs_stale = true;
  return out;
}

GateEstimate gate_count_estimate(int n) {
  if (n < 1) throw std::invalid_argument("gate_count_estimate: need at least one system qubit");
  if (n + 1 > 31) throw std::overflow_error("gate_count_estimate: 4^(n+1) overflows 64 bits");
  const std::uint64_t per = std::uint64_t{1} << (2 * (n + 1));
  return {per, 2 * per};
}

int global_system_qubits(std::uint64_t n_sites, int q) {
  const std::uint64_t nq = detail::checked_mul(n_sites, static_cast<std::uint64_t>(q));
  return qubits_for(nq + detail::checked_mul(nq, nq)) + 1;
}

double global_gate_scaling(std::uint64_t n_sites, int q) {
  const double nq = static_cast<double>(n_sites) * q;
  return nq * nq * nq * nq;
}

}  // namespace clbm::qemu
