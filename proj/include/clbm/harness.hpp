#ifndef CLBM_HARNESS_HPP
#define CLBM_HARNESS_HPP

#include "clbm/carleman.hpp"
#include "clbm/d2q9.hpp"
#include "clbm/lattice.hpp"
#include "clbm/qemu.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clbm {

enum class Method {
  lbm_bgk,
  lbm_mode_coupling,
  carleman_tr2,
  carleman_cl2,
  carleman_tr3,
  carleman_cl3,
  qemu_single_step,
};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);

inline constexpr double kDivisionGuard = 1e-12;

struct ExperimentConfig {
  FlowConfig flow{16, 16};
  Method method = Method::lbm_bgk;
  /// Time step of the RMSE report; unset means min(100, steps).
  std::optional<int> compare_at;
  std::filesystem::path output_dir = "out";
  std::size_t memory_cap_bytes = kDefaultMemoryCap;
  std::uint64_t seed = 0;
  /// qemu_single_step only: draw ancilla outcomes instead of post-selecting.
  bool sample = false;

  int effective_compare_at() const { return compare_at.value_or(std::min(100, flow.steps)); }
  void validate() const;
};

/// Applies one key=value setting; `line` is reported in errors.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Flat key=value file; '#' starts a comment, blank lines are ignored.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// sqrt(sum_s (1/N) ((a_s - b_s) / a_s)^2) for one population over N sites.
double rmse(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b);

struct RmseReport {
  PopulationVector<double> per_velocity_rmse;
  double mean_rmse = 0.0;
  double omega = 0.0;
  int t = 0;
};

/// Per-velocity rmse of `other` against `reference` and their mean over Q.
RmseReport mean_rmse(const LatticeField<double>& reference, const LatticeField<double>& other, double omega, int t);

using FieldObserver = std::function<void(int, const LatticeField<double>&)>;

/// Per-step record of the emulated collision circuit.
struct CircuitRow {
  int step;
  double p_success;
  double gamma;
  double c_max;
  double leakage_max;
};

/// Evolves the populations with `method` for `steps` steps, reporting the
/// f-component at t = 0..steps.
///
/// qemu_single_step re-lifts the populations every step and pushes them
/// through embed, the LCU collision circuit, multistreaming and readback.
struct EvolveResult {
  LatticeField<double> final_field;
  std::vector<CircuitRow> circuit;
  int circuit_attempts = 0;
  double max_equivalence_residual = 0.0;
};

EvolveResult evolve(const ExperimentConfig& cfg, Method method, int steps, const FieldObserver& observer = {});

/// Precomputed LCU data for the truncation-2 collision on one grid.
struct QemuCollision {
  qemu::RegisterLayout layout;
  qemu::LcuDecomposition lcu;
};

QemuCollision prepare_qemu_collision(int nx, int ny, const CollisionTensors<double>& t, bool single_step);

struct QemuStepResult {
  CarlemanState<double> quantum;
  CarlemanState<double> classical;
  double residual = 0.0;
  double p_success = 0.0;
  /// ||H~ psi||^2 / (gamma + 1)^2 from the classical collision.
  double p_expected = 0.0;
  double leakage_max = 0.0;
  int outcome_bit = 0;
};

/// One quantum step from an exact lift of `f`, checked against the classical
/// truncation-2 collide + stream. In sample mode `seed` drives the draw and a
/// failed outcome is returned as is.
QemuStepResult qemu_step(const LatticeField<double>& f, const CollisionTensors<double>& t,
                         const VelocitySet<double>& vs, const QemuCollision& qc,
                         qemu::CircuitMode mode = qemu::CircuitMode::postselect, std::uint64_t seed = 0);

struct RunSummary {
  std::map<std::string, std::string> values;
  std::vector<DiagnosticRow> diagnostics;
  std::vector<std::pair<int, double>> rmse_series;
  RmseReport report;
};

/// Runs cfg.method and the BGK reference, writes
///   diagnostics.csv  t,amplitude_ux,amplitude_uy
///   field.csv        x,y,rho,ux,uy (final state)
///   rmse.csv         report at compare_at
///   rmse_series.csv  t,mean_rmse
///   circuit.csv      step,p_success,gamma,c_max,leakage_max (qemu only)
///   summary.txt      key=value
/// into cfg.output_dir.
RunSummary run_experiment(const ExperimentConfig& cfg);

/// Error time series of `method` against BGK for t = 0..compare_at.
struct Comparison {
  std::vector<std::pair<int, double>> series;
  RmseReport report;
};

Comparison compare_methods(const ExperimentConfig& cfg, Method method);

struct SweepRow {
  Method method;
  RmseReport report;
};

/// One row per (omega, method) at t = compare_at, BGK as reference.
std::vector<SweepRow> sweep_omega(const ExperimentConfig& cfg, const std::vector<double>& omegas,
                                  const std::vector<Method>& methods);

/// method,omega,t,mean_rmse,rmse_0..rmse_8 at full precision.
void write_rmse_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

/// Six significant digits, as used in summaries.
std::string format_summary_number(double v);

}  // namespace clbm

#endif  // CLBM_HARNESS_HPP
