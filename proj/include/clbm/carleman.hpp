#ifndef CLBM_CARLEMAN_HPP
#define CLBM_CARLEMAN_HPP

#include "clbm/d2q9.hpp"
#include "clbm/errors.hpp"
#include "clbm/lattice.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace clbm {

enum class Cutoff { truncation, closure };

/// full_pairs keeps every product over site tuples and supports multi-step
/// evolution; local_single_step keeps only same-site products and can take
/// exactly one collide + stream.
enum class Locality { full_pairs, local_single_step };

inline constexpr std::size_t kDefaultMemoryCap = std::size_t{2} << 30;

/// Carleman-lifted state (f, g[, h]).
///
/// Canonical ordering is degree-major, velocity outer and position inner on
/// every slot: with n = Q*N and slot index a = i*N + x,
///   g[a1*n + a2],  h[(a1*n + a2)*n + a3]          for full_pairs,
///   g[(i*N + x)*Q + j], h[((i*N + x)*Q + j)*Q + k] for local_single_step.
template <typename Scalar = double>
struct CarlemanState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Index = Eigen::Index;

  int order = 2;
  Cutoff cutoff = Cutoff::truncation;
  Locality locality = Locality::full_pairs;
  LatticeField<Scalar> f;
  Vector g;
  Vector h;
  bool exhausted = false;

  Index sites() const { return f.sites(); }
  Index width() const { return kQ * f.sites(); }

  Index slot(int i, Index x) const { return Index(i) * sites() + x; }
  Index g_index(int i, Index x1, int j, Index x2) const { return slot(i, x1) * width() + slot(j, x2); }
  Index h_index(int i, Index x1, int j, Index x2, int k, Index x3) const {
    return (slot(i, x1) * width() + slot(j, x2)) * width() + slot(k, x3);
  }
  Index g_local_index(int i, Index x, int j) const { return slot(i, x) * kQ + j; }
  Index h_local_index(int i, Index x, int j, int k) const { return (slot(i, x) * kQ + j) * kQ + k; }

  /// f, g and h concatenated in canonical order.
  Vector to_vector() const {
    const Index nf = f.data().size();
    Vector v(nf + g.size() + h.size());
    v.head(nf) = Eigen::Map<const Vector>(f.data().data(), nf);
    v.segment(nf, g.size()) = g;
    v.tail(h.size()) = h;
    return v;
  }

  void assign_from_vector(const Vector& v) {
    const Index nf = f.data().size();
    if (v.size() != nf + g.size() + h.size()) {
      throw std::invalid_argument("CarlemanState: vector length does not match the state layout");
    }
    Eigen::Map<Vector>(f.data().data(), nf) = v.head(nf);
    g = v.segment(nf, g.size());
    h = v.tail(h.size());
  }
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw std::overflow_error("Carleman variable count overflows 64 bits");
  }
  return a * b;
}

inline std::uint64_t checked_pow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int e = 0; e < exp; ++e) r = checked_mul(r, base);
  return r;
}

}  // namespace detail

/// Number of stored Carleman variables for a state on n_sites sites.
inline std::uint64_t lifted_size(std::uint64_t n_sites, int order, Locality locality) {
  const std::uint64_t n = n_sites * kQ;
  std::uint64_t total = n;
  for (int d = 2; d <= order; ++d) {
    total += locality == Locality::full_pairs ? detail::checked_pow(n, d)
                                              : detail::checked_mul(n_sites, detail::checked_pow(kQ, d));
  }
  return total;
}

template <typename Scalar>
CarlemanState<Scalar> lift(const LatticeField<Scalar>& field, int order, Cutoff cutoff, Locality locality,
                           std::size_t memory_cap = kDefaultMemoryCap) {
  using Vector = typename CarlemanState<Scalar>::Vector;
  using Index = Eigen::Index;
  if (order != 2 && order != 3) {
    throw std::invalid_argument("lift: Carleman order must be 2 or 3");
  }
  const std::uint64_t count = lifted_size(static_cast<std::uint64_t>(field.sites()), order, locality);
  const std::uint64_t bytes = detail::checked_mul(count, sizeof(Scalar));
  if (bytes > memory_cap) {
    throw CapacityError("lift: order-" + std::to_string(order) + " state with " + std::to_string(count) +
                            " variables",
                        static_cast<std::size_t>(bytes), memory_cap);
  }

  CarlemanState<Scalar> s;
  s.order = order;
  s.cutoff = cutoff;
  s.locality = locality;
  s.f = field;
  const Index n = s.width();
  const Index N = s.sites();
  const Vector fv = Eigen::Map<const Vector>(field.data().data(), n);

  if (locality == Locality::full_pairs) {
    s.g.resize(n * n);
    Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(s.g.data(), n, n) =
        fv * fv.transpose();
    if (order == 3) {
      s.h.resize(n * n * n);
      for (Index a = 0; a < n * n; ++a) {
        s.h.segment(a * n, n) = s.g(a) * fv;
      }
    }
  } else {
    s.g.resize(N * kQ * kQ);
    if (order == 3) s.h.resize(N * kQ * kQ * kQ);
    for (Index x = 0; x < N; ++x) {
      const PopulationVector<Scalar> fx = field.at_site(x);
      for (int i = 0; i < kQ; ++i) {
        for (int j = 0; j < kQ; ++j) {
          s.g(s.g_local_index(i, x, j)) = fx(i) * fx(j);
          if (order == 3) {
            for (int k = 0; k < kQ; ++k) s.h(s.h_local_index(i, x, j, k)) = fx(i) * fx(j) * fx(k);
          }
        }
      }
    }
  }
  return s;
}

namespace detail {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using SiteMatrix = Eigen::Matrix<Scalar, kQ, Eigen::Dynamic>;

/// Applies M to the velocity index of slot `axis` of a rank-`rank` tensor
/// whose every slot has extent Q*N (velocity outer, position inner).
template <typename Scalar>
void apply_velocity_operator(Vec<Scalar>& data, int rank, int axis, const VelocityMatrix<Scalar>& M, Eigen::Index N) {
  const Eigen::Index n = kQ * N;
  Eigen::Index outer = 1;
  for (int a = 0; a < axis; ++a) outer *= n;
  Eigen::Index rest = N;
  for (int a = axis + 1; a < rank; ++a) rest *= n;
  for (Eigen::Index o = 0; o < outer; ++o) {
    Eigen::Map<Eigen::Matrix<Scalar, kQ, Eigen::Dynamic, Eigen::RowMajor>> blk(data.data() + o * kQ * rest, kQ, rest);
    blk = M * blk;
  }
}

/// b(:, x) = B . g(x, x) for a full pair field.
template <typename Scalar>
SiteMatrix<Scalar> contract_pair_diagonal(const PairTensor<Scalar>& B, const Vec<Scalar>& g, Eigen::Index N) {
  const Eigen::Index n = kQ * N;
  SiteMatrix<Scalar> out(kQ, N);
  PairBlock<Scalar> blk;
  for (Eigen::Index x = 0; x < N; ++x) {
    for (int j = 0; j < kQ; ++j) {
      for (int k = 0; k < kQ; ++k) blk(j, k) = g((j * N + x) * n + k * N + x);
    }
    out.col(x) = contract_pair(B, blk);
  }
  return out;
}

/// Flattens a Q x N site matrix into a slot vector (i*N + x).
template <typename Scalar>
Vec<Scalar> slot_vector(const SiteMatrix<Scalar>& m) {
  const Eigen::Matrix<Scalar, kQ, Eigen::Dynamic, Eigen::RowMajor> r = m;
  return Eigen::Map<const Vec<Scalar>>(r.data(), r.size());
}

template <typename Scalar>
Vec<Scalar> weight_slots(const PopulationVector<Scalar>& w, Eigen::Index N) {
  Vec<Scalar> out(kQ * N);
  for (int i = 0; i < kQ; ++i) out.segment(i * N, N).setConstant(w(i));
  return out;
}

template <typename Scalar>
struct Lifted {
  Eigen::Matrix<Scalar, kQ, Eigen::Dynamic, Eigen::RowMajor> f;
  Vec<Scalar> g;
  Vec<Scalar> h;
};

/// Order-2 collision on full pair storage over N sites.
template <typename Scalar>
void collide2_full(Lifted<Scalar>& v, const CollisionTensors<Scalar>& t, const PopulationVector<Scalar>& w,
                   Cutoff cutoff, Eigen::Index N) {
  const Eigen::Index n = kQ * N;
  const SiteMatrix<Scalar> bq = contract_pair_diagonal(t.B, v.g, N);
  const Scalar fcoef = cutoff == Cutoff::closure ? Scalar(5) / Scalar(6) : Scalar(1);
  v.f = t.A * v.f + fcoef * bq;

  apply_velocity_operator(v.g, 2, 0, t.A, N);
  apply_velocity_operator(v.g, 2, 1, t.A, N);
  if (cutoff == Cutoff::closure) {
    const Vec<Scalar> W = weight_slots(w, N);
    const Vec<Scalar> b = slot_vector(bq);
    Eigen::Map<RowMat<Scalar>> G(v.g.data(), n, n);
    G += (Scalar(5) / Scalar(18)) * (W * b.transpose() + b * W.transpose());
  }
}

/// Order-3 collision on full storage over N sites.
template <typename Scalar>
void collide3_full(Lifted<Scalar>& v, const CollisionTensors<Scalar>& t, const PopulationVector<Scalar>& w,
                   Cutoff cutoff, Eigen::Index N) {
  using Index = Eigen::Index;
  const Index n = kQ * N;
  const Index n2 = n * n;
  const auto& h = v.h;

  // u(:, x) = B_ijk sum_l h_jkl(x, x, x)
  SiteMatrix<Scalar> u(kQ, N);
  PairBlock<Scalar> blk;
  for (Index x = 0; x < N; ++x) {
    for (int j = 0; j < kQ; ++j) {
      for (int k = 0; k < kQ; ++k) {
        Scalar acc(0);
        for (int l = 0; l < kQ; ++l) acc += h((j * N + x) * n2 + (k * N + x) * n + l * N + x);
        blk(j, k) = acc;
      }
    }
    u.col(x) = contract_pair(t.B, blk);
  }
  const SiteMatrix<Scalar> bg = contract_pair_diagonal(t.B, v.g, N);

  // D12[(k,x1),(j,x2)] = B_jlm h_klm(x1, x2, x2);  D01[(i,x1),(m,x2)] = B_ikl h_klm(x1, x1, x2)
  RowMat<Scalar> d12(n, n);
  RowMat<Scalar> d01(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index x2 = 0; x2 < N; ++x2) {
      for (int l = 0; l < kQ; ++l) {
        for (int m = 0; m < kQ; ++m) blk(l, m) = h(a * n2 + (l * N + x2) * n + m * N + x2);
      }
      const PopulationVector<Scalar> r = contract_pair(t.B, blk);
      for (int j = 0; j < kQ; ++j) d12(a, j * N + x2) = r(j);
    }
  }
  for (Index x1 = 0; x1 < N; ++x1) {
    for (Index c = 0; c < n; ++c) {
      for (int k = 0; k < kQ; ++k) {
        for (int l = 0; l < kQ; ++l) blk(k, l) = h((k * N + x1) * n2 + (l * N + x1) * n + c);
      }
      const PopulationVector<Scalar> r = contract_pair(t.B, blk);
      for (int i = 0; i < kQ; ++i) d01(i * N + x1, c) = r(i);
    }
  }
  Vec<Scalar> ma = Eigen::Map<const Vec<Scalar>>(d12.data(), n2);
  apply_velocity_operator(ma, 2, 0, t.A, N);
  Vec<Scalar> mb = Eigen::Map<const Vec<Scalar>>(d01.data(), n2);
  apply_velocity_operator(mb, 2, 1, t.A, N);

  const bool closure = cutoff == Cutoff::closure;
  v.f = t.A * v.f + bg - Scalar(0.5) * u;

  const Vec<Scalar> W = weight_slots(w, N);
  const Vec<Scalar> U = slot_vector(u);
  apply_velocity_operator(v.g, 2, 0, t.A, N);
  apply_velocity_operator(v.g, 2, 1, t.A, N);
  {
    Eigen::Map<RowMat<Scalar>> G(v.g.data(), n, n);
    const Scalar c = closure ? Scalar(7) / Scalar(8) : Scalar(1);
    G += c * (Eigen::Map<const RowMat<Scalar>>(ma.data(), n, n) + Eigen::Map<const RowMat<Scalar>>(mb.data(), n, n));
    if (closure) G += Scalar(0.25) * (W * U.transpose() + U * W.transpose());
  }

  apply_velocity_operator(v.h, 3, 0, t.A, N);
  apply_velocity_operator(v.h, 3, 1, t.A, N);
  apply_velocity_operator(v.h, 3, 2, t.A, N);
  if (closure) {
    const Vec<Scalar> S = ma + mb;
    const Scalar quarter = Scalar(0.25);
    const Scalar tiny = Scalar(1) / Scalar(32);
    for (Index a = 0; a < n; ++a) {
      for (Index b = 0; b < n; ++b) {
        Scalar* out = v.h.data() + a * n2 + b * n;
        for (Index c = 0; c < n; ++c) {
          out[c] += quarter * (W(a) * S(b * n + c) + W(b) * S(a * n + c) + W(c) * S(a * n + b)) +
                    tiny * (W(a) * W(b) * U(c) + W(a) * W(c) * U(b) + W(b) * W(c) * U(a));
        }
      }
    }
  }
}

/// Same-site states collide site by site as independent one-site full states.
template <typename Scalar>
void collide_local(CarlemanState<Scalar>& s, const CollisionTensors<Scalar>& t, const PopulationVector<Scalar>& w) {
  using Index = Eigen::Index;
  const Index N = s.sites();
  const Index q2 = kQ * kQ;
  const Index q3 = q2 * kQ;
  Lifted<Scalar> site;
  for (Index x = 0; x < N; ++x) {
    site.f = s.f.at_site(x);
    site.g.resize(q2);
    for (int i = 0; i < kQ; ++i) site.g.segment(i * kQ, kQ) = s.g.segment(s.g_local_index(i, x, 0), kQ);
    if (s.order == 3) {
      site.h.resize(q3);
      for (int i = 0; i < kQ; ++i) site.h.segment(i * q2, q2) = s.h.segment(s.h_local_index(i, x, 0, 0), q2);
      collide3_full(site, t, w, s.cutoff, 1);
    } else {
      collide2_full(site, t, w, s.cutoff, 1);
    }
    s.f.data().col(x) = site.f.col(0);
    for (int i = 0; i < kQ; ++i) s.g.segment(s.g_local_index(i, x, 0), kQ) = site.g.segment(i * kQ, kQ);
    if (s.order == 3) {
      for (int i = 0; i < kQ; ++i) s.h.segment(s.h_local_index(i, x, 0, 0), q2) = site.h.segment(i * q2, q2);
    }
  }
}

template <typename Scalar>
CarlemanState<Scalar> collide_checked(const CarlemanState<Scalar>& in, const CollisionTensors<Scalar>& t,
                                      const PopulationVector<Scalar>& w, int order, Cutoff cutoff, const char* who) {
  if (in.order != order || in.cutoff != cutoff) {
    throw std::invalid_argument(std::string(who) + ": state order or cut-off mode does not match");
  }
  if (in.exhausted) {
    throw StateExhaustedError(std::string(who) + ": single-step state has already been streamed");
  }
  CarlemanState<Scalar> out = in;
  if (in.locality == Locality::local_single_step) {
    collide_local(out, t, w);
    return out;
  }
  Lifted<Scalar> v{in.f.data(), in.g, in.h};
  if (order == 2) {
    collide2_full(v, t, w, cutoff, in.sites());
  } else {
    collide3_full(v, t, w, cutoff, in.sites());
  }
  out.f.data() = v.f;
  out.g = std::move(v.g);
  out.h = std::move(v.h);
  return out;
}

}  // namespace detail

/// Second-order truncation: every degree >= 3 term is dropped.
template <typename Scalar>
CarlemanState<Scalar> collide_truncate2(const CarlemanState<Scalar>& s, const CollisionTensors<Scalar>& t) {
  return detail::collide_checked(s, t, PopulationVector<Scalar>::Zero().eval(), 2, Cutoff::truncation,
                                 "collide_truncate2");
}

template <typename Scalar>
CarlemanState<Scalar> collide_truncate3(const CarlemanState<Scalar>& s, const CollisionTensors<Scalar>& t) {
  return detail::collide_checked(s, t, PopulationVector<Scalar>::Zero().eval(), 3, Cutoff::truncation,
                                 "collide_truncate3");
}

/// Second-order closure: cubic monomials are closed by replacing one factor
/// with its lattice weight, which couples g at different sites.
template <typename Scalar>
CarlemanState<Scalar> collide_closure2(const CarlemanState<Scalar>& s, const CollisionTensors<Scalar>& t,
                                       const VelocitySet<Scalar>& vs) {
  return detail::collide_checked(s, t, vs.weights, 2, Cutoff::closure, "collide_closure2");
}

template <typename Scalar>
CarlemanState<Scalar> collide_closure3(const CarlemanState<Scalar>& s, const CollisionTensors<Scalar>& t,
                                       const VelocitySet<Scalar>& vs) {
  return detail::collide_checked(s, t, vs.weights, 3, Cutoff::closure, "collide_closure3");
}

template <typename Scalar>
CarlemanState<Scalar> collide(const CarlemanState<Scalar>& s, const CollisionTensors<Scalar>& t,
                              const VelocitySet<Scalar>& vs) {
  if (s.cutoff == Cutoff::truncation) {
    return s.order == 2 ? collide_truncate2(s, t) : collide_truncate3(s, t);
  }
  return s.order == 2 ? collide_closure2(s, t, vs) : collide_closure3(s, t, vs);
}

/// Streams every slot of every monomial along its own velocity. A
/// local_single_step state streams f, drops its same-site products and is
/// marked exhausted.
template <typename Scalar>
CarlemanState<Scalar> stream_lifted(const CarlemanState<Scalar>& s, const VelocitySet<Scalar>& vs) {
  using Index = Eigen::Index;
  if (s.exhausted) {
    throw StateExhaustedError("stream_lifted: single-step state cannot stream into a second collision");
  }
  CarlemanState<Scalar> out = s;
  out.f = stream(s.f, vs);
  if (s.locality == Locality::local_single_step) {
    out.g.setZero();
    out.h.setZero();
    out.exhausted = true;
    return out;
  }

  const Index N = s.sites();
  const Index n = s.width();
  const auto dest = streaming_table(s.f, vs);
  // slot_dest[a] is the slot that slot a = i*N + x moves to.
  std::vector<Index> slot_dest(n);
  for (int i = 0; i < kQ; ++i) {
    for (Index x = 0; x < N; ++x) slot_dest[i * N + x] = i * N + dest[i][x];
  }
  for (Index a = 0; a < n; ++a) {
    const Index ra = slot_dest[a] * n;
    for (Index b = 0; b < n; ++b) out.g(ra + slot_dest[b]) = s.g(a * n + b);
  }
  if (s.order == 3) {
    for (Index a = 0; a < n; ++a) {
      for (Index b = 0; b < n; ++b) {
        const Index rab = (slot_dest[a] * n + slot_dest[b]) * n;
        const Index src = (a * n + b) * n;
        for (Index c = 0; c < n; ++c) out.h(rab + slot_dest[c]) = s.h(src + c);
      }
    }
  }
  return out;
}

template <typename Scalar>
CarlemanState<Scalar> carleman_step(const CarlemanState<Scalar>& s, const CollisionTensors<Scalar>& t,
                                    const VelocitySet<Scalar>& vs) {
  return stream_lifted(collide(s, t, vs), vs);
}

struct CarlemanCounts {
  std::uint64_t n_natural;
  std::uint64_t n_cl;
  int q;
};

/// Smallest q with 2^q >= n.
inline int qubits_for(std::uint64_t n) { return n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1)); }

/// Variable and qubit counts for N sites with Q velocities.
///
/// steps == 0 requests the global count (pairs over all sites). For
/// 1 <= steps < (L+1)/2, with L = floor(sqrt(N)) the linear size of a square
/// lattice, the windowed order-2 count N(Q + Q^2 (2s-1)^2) is returned.
/// symmetric selects the single-step count with g_ij = g_ji merged.
inline CarlemanCounts carleman_counts(std::uint64_t N, int Q, int order, int steps = 0, bool symmetric = false) {
  if (N < 1 || Q < 1 || steps < 0) throw std::invalid_argument("carleman_counts: N, Q must be >= 1, steps >= 0");
  if (order != 2 && order != 3) throw std::invalid_argument("carleman_counts: order must be 2 or 3");
  using detail::checked_mul;
  using detail::checked_pow;
  const std::uint64_t q = static_cast<std::uint64_t>(Q);
  const std::uint64_t nq = checked_mul(N, q);
  CarlemanCounts c{nq, 0, 0};

  if (symmetric) {
    if (order != 2 || steps > 1) {
      throw std::invalid_argument("carleman_counts: symmetric count is defined for single-step order 2");
    }
    c.n_cl = nq + checked_mul(N, q * (q + 1) / 2);
  } else {
    std::uint64_t L = 0;
    while ((L + 1) * (L + 1) <= N) ++L;
    const bool global = steps == 0 || 2 * static_cast<std::uint64_t>(steps) >= L + 1;
    if (global) {
      c.n_cl = nq + checked_pow(nq, 2);
      if (order == 3) c.n_cl += checked_pow(nq, 3);
    } else {
      if (order != 2) throw std::invalid_argument("carleman_counts: windowed count is defined for order 2");
      const std::uint64_t window = 2 * static_cast<std::uint64_t>(steps) - 1;
      c.n_cl = checked_mul(N, q + checked_mul(q * q, window * window));
    }
  }
  c.q = qubits_for(c.n_cl);
  return c;
}

/// f followed by the upper triangle (i <= j) of g_ij(x, x) per site; valid
/// for local order-2 states whose pair blocks are symmetric.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> pack_symmetric(const CarlemanState<Scalar>& s) {
  if (s.order != 2 || s.locality != Locality::local_single_step) {
    throw std::invalid_argument("pack_symmetric: requires a local order-2 state");
  }
  const Eigen::Index N = s.sites();
  const Eigen::Index per_site = kQ * (kQ + 1) / 2;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(kQ * N + per_site * N);
  v.head(kQ * N) = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(s.f.data().data(), kQ * N);
  Eigen::Index k = kQ * N;
  for (Eigen::Index x = 0; x < N; ++x) {
    for (int i = 0; i < kQ; ++i) {
      for (int j = i; j < kQ; ++j) v(k++) = s.g(s.g_local_index(i, x, j));
    }
  }
  return v;
}

template <typename Scalar>
void unpack_symmetric(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, CarlemanState<Scalar>& s) {
  const Eigen::Index N = s.sites();
  if (s.order != 2 || s.locality != Locality::local_single_step ||
      v.size() != kQ * N + N * kQ * (kQ + 1) / 2) {
    throw std::invalid_argument("unpack_symmetric: layout mismatch");
  }
  Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(s.f.data().data(), kQ * N) = v.head(kQ * N);
  Eigen::Index k = kQ * N;
  for (Eigen::Index x = 0; x < N; ++x) {
    for (int i = 0; i < kQ; ++i) {
      for (int j = i; j < kQ; ++j) {
        s.g(s.g_local_index(i, x, j)) = v(k);
        s.g(s.g_local_index(j, x, i)) = v(k);
        ++k;
      }
    }
  }
}

/// Header of the binary Carleman-vector dump: four little-endian uint32
/// fields (magic, order, N, Q) followed by the canonical vector as float64.
struct VectorDumpHeader {
  static constexpr std::uint32_t kMagic = 0x564C4243;  // "CBLV"
  std::uint32_t magic = kMagic;
  std::uint32_t order = 2;
  std::uint32_t sites = 1;
  std::uint32_t velocities = kQ;
};

void save_carleman_vector(const std::filesystem::path& path, const CarlemanState<double>& s);

struct LoadedVector {
  VectorDumpHeader header;
  Eigen::VectorXd values;
};

LoadedVector load_carleman_vector(const std::filesystem::path& path);

}  // namespace clbm

#endif  // CLBM_CARLEMAN_HPP
