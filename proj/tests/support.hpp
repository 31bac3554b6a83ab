#ifndef CLBM_TESTS_SUPPORT_HPP
#define CLBM_TESTS_SUPPORT_HPP

#include "clbm/carleman.hpp"
#include "clbm/d2q9.hpp"
#include "clbm/lattice.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace clbm::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Entries drawn independently from (lo, hi).
inline LatticeField<double> random_field(Rng& rng, int nx, int ny, double lo = 0.01, double hi = 0.5) {
  LatticeField<double> f(nx, ny);
  for (Eigen::Index k = 0; k < f.data().size(); ++k) f.data().data()[k] = uniform(rng, lo, hi);
  return f;
}

/// w_i (1 + eps) with eps uniform in (-amp, amp): a flow close to rest.
inline LatticeField<double> near_rest_field(Rng& rng, int nx, int ny, double amp = 0.1) {
  const auto vs = build_velocity_set<double>();
  LatticeField<double> f(nx, ny);
  for (Eigen::Index s = 0; s < f.sites(); ++s) {
    for (int i = 0; i < kQ; ++i) f.data()(i, s) = vs.weights(i) * (1.0 + uniform(rng, -amp, amp));
  }
  return f;
}

/// A lifted state whose g and h entries are independent of f.
inline CarlemanState<double> random_lifted(Rng& rng, int nx, int ny, int order, Cutoff cutoff,
                                           Locality locality = Locality::full_pairs) {
  CarlemanState<double> s = lift(random_field(rng, nx, ny), order, cutoff, locality);
  for (Eigen::Index k = 0; k < s.g.size(); ++k) s.g(k) = uniform(rng, -0.1, 0.1);
  for (Eigen::Index k = 0; k < s.h.size(); ++k) s.h(k) = uniform(rng, -0.1, 0.1);
  return s;
}

/// Term-by-term evaluation of the lifted collision equations on full pair
/// storage, written with explicit velocity and site indices.
///
/// The closure-3 g-update carries A_ik w_k, which reduces to w_i.
inline CarlemanState<double> naive_collide(const CarlemanState<double>& s, const CollisionTensors<double>& t,
                                           const VelocitySet<double>& vs) {
  const int N = static_cast<int>(s.sites());
  const auto& A = t.A;
  auto B = [&](int i, int j, int k) { return t.quadratic(i, j, k); };
  auto C = [&](int i, int j, int k, int l) { return t.cubic(i, j, k, l); };
  const auto& w = vs.weights;
  auto f = [&](int i, int x) { return s.f.data()(i, x); };
  auto g = [&](int i, int x1, int j, int x2) { return s.g(s.g_index(i, x1, j, x2)); };
  auto h = [&](int i, int x1, int j, int x2, int k, int x3) { return s.h(s.h_index(i, x1, j, x2, k, x3)); };
  const bool closure = s.cutoff == Cutoff::closure;
  const bool third = s.order == 3;

  // sum_n h_lmn(x, x, x)
  auto hsum = [&](int l, int m, int x) {
    double acc = 0.0;
    for (int n = 0; n < kQ; ++n) acc += h(l, x, m, x, n, x);
    return acc;
  };

  CarlemanState<double> out = s;
  for (int x = 0; x < N; ++x) {
    for (int i = 0; i < kQ; ++i) {
      double acc = 0.0;
      for (int j = 0; j < kQ; ++j) acc += A(i, j) * f(j, x);
      const double bcoef = (closure && !third) ? 5.0 / 6.0 : 1.0;
      for (int j = 0; j < kQ; ++j) {
        for (int k = 0; k < kQ; ++k) acc += bcoef * B(i, j, k) * g(j, x, k, x);
      }
      if (third) {
        for (int j = 0; j < kQ; ++j) {
          for (int k = 0; k < kQ; ++k) {
            for (int l = 0; l < kQ; ++l) acc += C(i, j, k, l) * h(j, x, k, x, l, x);
          }
        }
      }
      out.f.data()(i, x) = acc;
    }
  }

  for (int x1 = 0; x1 < N; ++x1) {
    for (int x2 = 0; x2 < N; ++x2) {
      for (int i = 0; i < kQ; ++i) {
        for (int j = 0; j < kQ; ++j) {
          double acc = 0.0;
          for (int k = 0; k < kQ; ++k) {
            for (int l = 0; l < kQ; ++l) acc += A(i, k) * A(j, l) * g(k, x1, l, x2);
          }
          if (!third && closure) {
            for (int k = 0; k < kQ; ++k) {
              for (int l = 0; l < kQ; ++l) {
                acc += 5.0 / 18.0 * (w(i) * B(j, k, l) * g(k, x2, l, x2) + w(j) * B(i, k, l) * g(k, x1, l, x1));
              }
            }
          }
          if (third) {
            const double c = closure ? 7.0 / 8.0 : 1.0;
            for (int k = 0; k < kQ; ++k) {
              for (int l = 0; l < kQ; ++l) {
                for (int m = 0; m < kQ; ++m) {
                  acc += c * A(i, k) * B(j, l, m) * h(k, x1, l, x2, m, x2);
                  acc += c * B(i, k, l) * A(j, m) * h(k, x1, l, x1, m, x2);
                }
              }
            }
            if (closure) {
              for (int l = 0; l < kQ; ++l) {
                for (int m = 0; m < kQ; ++m) {
                  acc += 0.25 * (w(i) * B(j, l, m) * hsum(l, m, x2) + w(j) * B(i, l, m) * hsum(l, m, x1));
                }
              }
            }
          }
          out.g(s.g_index(i, x1, j, x2)) = acc;
        }
      }
    }
  }

  if (!third) return out;

  for (int x1 = 0; x1 < N; ++x1) {
    for (int x2 = 0; x2 < N; ++x2) {
      for (int x3 = 0; x3 < N; ++x3) {
        for (int i = 0; i < kQ; ++i) {
          for (int j = 0; j < kQ; ++j) {
            for (int k = 0; k < kQ; ++k) {
              double acc = 0.0;
              for (int l = 0; l < kQ; ++l) {
                for (int m = 0; m < kQ; ++m) {
                  for (int n = 0; n < kQ; ++n) acc += A(i, l) * A(j, m) * A(k, n) * h(l, x1, m, x2, n, x3);
                }
              }
              if (closure) {
                double q = 0.0;
                for (int l = 0; l < kQ; ++l) {
                  for (int m = 0; m < kQ; ++m) {
                    for (int n = 0; n < kQ; ++n) {
                      q += w(i) * A(j, l) * B(k, m, n) * h(l, x2, m, x3, n, x3);
                      q += w(j) * A(i, l) * B(k, m, n) * h(l, x1, m, x3, n, x3);
                      q += w(i) * B(j, l, m) * A(k, n) * h(l, x2, m, x2, n, x3);
                      q += w(k) * A(i, l) * B(j, m, n) * h(l, x1, m, x2, n, x2);
                      q += w(j) * B(i, l, m) * A(k, n) * h(l, x1, m, x1, n, x3);
                      q += w(k) * B(i, l, m) * A(j, n) * h(l, x1, m, x1, n, x2);
                    }
                  }
                }
                double r = 0.0;
                for (int l = 0; l < kQ; ++l) {
                  for (int m = 0; m < kQ; ++m) {
                    r += w(i) * w(j) * B(k, l, m) * hsum(l, m, x3);
                    r += w(i) * w(k) * B(j, l, m) * hsum(l, m, x2);
                    r += w(j) * w(k) * B(i, l, m) * hsum(l, m, x1);
                  }
                }
                acc += 0.25 * q + r / 32.0;
              }
              out.h(s.h_index(i, x1, j, x2, k, x3)) = acc;
            }
          }
        }
      }
    }
  }
  return out;
}

/// Dense matrix of a linear map on the canonical Carleman vector, assembled
/// column by column from unit vectors.
template <typename Map>
Eigen::MatrixXd assemble_matrix(const CarlemanState<double>& layout, Map&& op) {
  const Eigen::Index n = layout.to_vector().size();
  Eigen::MatrixXd M(n, n);
  CarlemanState<double> e = layout;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    unit(c) = 1.0;
    e.assign_from_vector(unit);
    M.col(c) = op(e).to_vector();
    unit(c) = 0.0;
  }
  return M;
}

}  // namespace clbm::testing

#endif  // CLBM_TESTS_SUPPORT_HPP
