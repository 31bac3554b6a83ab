#ifndef CLBM_QEMU_HPP
#define CLBM_QEMU_HPP

#include "clbm/carleman.hpp"
#include "clbm/d2q9.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace clbm::qemu {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;
using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;

/// Amplitudes above this magnitude outside the embedded layout flag leakage.
inline constexpr double kLeakageThreshold = 1e-9;

/// Qubit registers of the order-2 embedding, most significant first:
/// tau | v1 | p1 | v2 | p2. The single-step layout drops p2.
///
/// Velocity registers span 2^q_v = 16 states for Q = 9; values 9..15 are
/// structurally zero. Position registers span 2^q_p >= N states likewise.
struct RegisterLayout {
  int nx = 1;
  int ny = 1;
  int q_tau = 1;
  int q_v = 4;
  int q_p = 0;
  bool single_step = false;

  Index sites() const { return Index(nx) * ny; }
  int position_registers() const { return single_step ? 1 : 2; }
  int total_qubits() const { return q_tau + 2 * q_v + position_registers() * q_p; }
  Index dim() const { return Index{1} << total_qubits(); }

  Index index(int tau, int v1, Index p1, int v2, Index p2) const {
    Index r = (Index(tau) << q_v) | v1;
    r = (r << q_p) | p1;
    r = (r << q_v) | v2;
    if (!single_step) r = (r << q_p) | p2;
    return r;
  }

  struct Decoded {
    int tau;
    int v1;
    Index p1;
    int v2;
    Index p2;
  };

  Decoded decode(Index r) const {
    Decoded d{};
    const Index pmask = (Index{1} << q_p) - 1;
    const Index vmask = (Index{1} << q_v) - 1;
    if (!single_step) {
      d.p2 = r & pmask;
      r >>= q_p;
    }
    d.v2 = static_cast<int>(r & vmask);
    r >>= q_v;
    d.p1 = r & pmask;
    r >>= q_p;
    d.v1 = static_cast<int>(r & vmask);
    r >>= q_v;
    d.tau = static_cast<int>(r);
    return d;
  }

  /// Qubits of the (tau, v1, v2) factor on which the single-step collision acts.
  int factor_qubits() const { return q_tau + 2 * q_v; }
  Index factor_dim() const { return Index{1} << factor_qubits(); }
  Index factor_index(int tau, int v1, int v2) const { return (((Index(tau) << q_v) | v1) << q_v) | v2; }
};

RegisterLayout make_layout(int nx, int ny, bool single_step);

/// Unit-norm amplitudes plus the classical factor that restores physical
/// magnitudes: scale * amplitudes equals the embedded Carleman values.
///
/// The amplitude vector carries one extra, most significant qubit for the
/// Hermitian dilation; data_block says which half holds the data.
struct QuantumState {
  RegisterLayout layout;
  StateVector amplitudes;
  double scale = 0.0;
  int data_block = 1;
  bool pairs_stale = false;
};

QuantumState embed(const CarlemanState<double>& s);

struct Readback {
  CarlemanState<double> state;
  double leakage_max = 0.0;
  bool leakage_warning = false;
};

Readback readback(const QuantumState& qs);

/// Truncation-2 collision matrix in the embedded basis. For a multi-step
/// layout it acts on the whole system register; for a single-step layout it
/// is the (tau, v1, v2) factor, to be applied as factor (x) 1_p1.
SparseOperator build_collision_matrix(const CollisionTensors<double>& t, const RegisterLayout& layout);

/// 1-site collision on the 54 symmetric single-step variables
/// (f followed by g_ij, i <= j, as produced by pack_symmetric).
Eigen::MatrixXd build_symmetric_single_step_matrix(const CollisionTensors<double>& t);

/// [[0, C], [C^T, 0]].
SparseOperator hermitian_augment(const SparseOperator& C);
Eigen::MatrixXd hermitian_augment(const Eigen::MatrixXd& C);

struct PhasePair {
  double alpha;
  double beta;
};

/// Phases with exp(i alpha) + gamma exp(i beta) = lambda and sin(alpha) >= 0.
PhasePair phase_pair(double lambda, double gamma);

struct LcuOptions {
  /// Forces the weight; infeasible eigenvalues then raise an error.
  std::optional<double> gamma;
  /// Skips the Gram-matrix shortcut for dilated operators.
  bool force_generic = false;
};

/// H / c_max = Ua + gamma * Ub with both unitaries functions of H.
///
/// Only the active subspace (indices where H has a nonzero row) is stored
/// densely; on its complement H vanishes and the unitaries act as the
/// scalars ua_rest and ub_rest.
struct LcuDecomposition {
  Index dim = 0;
  std::vector<Index> active;
  Eigen::MatrixXcd ua_active;
  Eigen::MatrixXcd ub_active;
  Complex ua_rest{0.0, 1.0};
  Complex ub_rest{0.0, -1.0};
  double gamma = 1.0;
  double gamma_angle = 0.0;
  double c_max = 1.0;
  bool fallback = false;
  std::string notice;

  StateVector apply_a(const StateVector& v) const { return apply(ua_active, ua_rest, v); }
  StateVector apply_b(const StateVector& v) const { return apply(ub_active, ub_rest, v); }
  Eigen::MatrixXcd ua_dense() const { return dense(ua_active, ua_rest); }
  Eigen::MatrixXcd ub_dense() const { return dense(ub_active, ub_rest); }

 private:
  StateVector apply(const Eigen::MatrixXcd& block, Complex rest, const StateVector& v) const;
  Eigen::MatrixXcd dense(const Eigen::MatrixXcd& block, Complex rest) const;
};

LcuDecomposition lcu_decompose(const SparseOperator& H, const LcuOptions& options = {});
LcuDecomposition lcu_decompose(const Eigen::MatrixXd& H, const LcuOptions& options = {});

enum class CircuitMode { postselect, sample };

struct CircuitOutcome {
  int outcome_bit = 0;
  QuantumState post_state;
  double p_success = 0.0;
};

/// Ancilla rotation, anti-controlled Ub, controlled Ua, inverse rotation,
/// ancilla measurement. The rotation maps |0> to cos(angle)|0> + sin(angle)|1>
/// (RY(2 * angle) in the half-angle convention).
CircuitOutcome apply_collision_circuit(const QuantumState& qs, const LcuDecomposition& d,
                                       CircuitMode mode = CircuitMode::postselect, std::uint64_t seed = 0);

using PositionPermutation = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;

/// x -> x + c_i (periodic) on one position register; padding states are fixed.
PositionPermutation build_streaming_operator(int i, const RegisterLayout& layout);

/// Destination of every system basis index under the controlled streaming.
std::vector<Index> multistreaming_permutation(const RegisterLayout& layout);

QuantumState apply_multistreaming(const QuantumState& qs);

struct GateEstimate {
  std::uint64_t per_controlled_unitary;
  std::uint64_t total;
};

/// Two-qubit gate lower bound 4^(n+1) per controlled n-qubit unitary; the
/// circuit holds two of them.
GateEstimate gate_count_estimate(int n_system_qubits);

/// System qubits of the multi-step order-2 circuit, ceil(log2(NQ + (NQ)^2)) + 1.
int global_system_qubits(std::uint64_t n_sites, int q);

/// (NQ)^4 scaling of the multi-step circuit.
double global_gate_scaling(std::uint64_t n_sites, int q);

}  // namespace clbm::qemu

#endif  // CLBM_QEMU_HPP
