// clbm: command-line front end for the lattice Boltzmann / Carleman experiments.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "clbm/harness.hpp"

namespace {

using namespace clbm;

constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitNumerical = 4;

// Command-line flags and the config keys they override.
const std::pair<const char*, const char*> kFlagKeys[] = {
    {"--nx", "nx"},
    {"--ny", "ny"},
    {"--omega", "omega"},
    {"--ax", "ax"},
    {"--ay", "ay"},
    {"--kx", "kx"},
    {"--ky", "ky"},
    {"--steps", "steps"},
    {"--method", "method"},
    {"--compare-at", "compare_at"},
    {"--out", "out"},
    {"--seed", "seed"},
    {"--memory-cap", "memory_cap"},
};

struct CommonFlags {
  std::optional<std::string> config;
  std::vector<std::optional<std::string>> values = std::vector<std::optional<std::string>>(std::size(kFlagKeys));
  bool full_scale = false;
  bool sample = false;
};

void add_common(CLI::App* app, CommonFlags& flags) {
  app->add_option("--config", flags.config, "key=value config file; flags override it");
  for (std::size_t k = 0; k < std::size(kFlagKeys); ++k) {
    app->add_option(kFlagKeys[k].first, flags.values[k], std::string("overrides ") + kFlagKeys[k].second);
  }
  app->add_flag("--full-scale", flags.full_scale, "use the 32x32 grid");
  app->add_flag("--sample", flags.sample, "qemu_single_step: sample the ancilla instead of post-selecting");
}

ExperimentConfig resolve(const CommonFlags& flags) {
  ExperimentConfig cfg = flags.config ? load_config(*flags.config) : ExperimentConfig{};
  if (flags.full_scale) apply_setting(cfg, "full_scale", "true");
  for (std::size_t k = 0; k < std::size(kFlagKeys); ++k) {
    if (flags.values[k]) apply_setting(cfg, kFlagKeys[k].second, *flags.values[k]);
  }
  if (flags.sample) cfg.sample = true;
  cfg.validate();
  return cfg;
}

void print_report(const RmseReport& r) {
  std::printf("omega=%s t=%d mean_rmse=%s\n", format_summary_number(r.omega).c_str(), r.t,
              format_summary_number(r.mean_rmse).c_str());
  for (int i = 0; i < kQ; ++i) std::printf("rmse_%d=%s\n", i, format_summary_number(r.per_velocity_rmse(i)).c_str());
}

int cmd_run(const CommonFlags& flags) {
  const ExperimentConfig cfg = resolve(flags);
  const RunSummary s = run_experiment(cfg);
  for (const auto& [key, value] : s.values) std::printf("%s=%s\n", key.c_str(), value.c_str());
  std::printf("output_dir=%s\n", cfg.output_dir.string().c_str());
  return 0;
}

int cmd_compare(const CommonFlags& flags) {
  ExperimentConfig cfg = resolve(flags);
  if (cfg.method == Method::lbm_bgk) cfg.method = Method::carleman_tr2;
  const Comparison c = compare_methods(cfg, cfg.method);
  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream out(cfg.output_dir / "compare_series.csv");
    out << "t,mean_rmse\n";
    out.precision(17);
    for (const auto& [n, e] : c.series) out << n << ',' << e << '\n';
  }
  write_rmse_csv(cfg.output_dir / "compare.csv", {{cfg.method, c.report}});
  std::printf("method=%s reference=lbm_bgk\n", std::string(method_name(cfg.method)).c_str());
  print_report(c.report);
  return 0;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("invalid omega list entry '" + item + "'");
    }
  }
  return out;
}

int cmd_sweep(const CommonFlags& flags, const std::string& omegas, const std::vector<std::string>& methods) {
  const ExperimentConfig cfg = resolve(flags);
  std::vector<Method> ms;
  for (const auto& m : methods) ms.push_back(parse_method(m));
  const std::vector<SweepRow> rows = sweep_omega(cfg, parse_list(omegas), ms);
  std::filesystem::create_directories(cfg.output_dir);
  write_rmse_csv(cfg.output_dir / "sweep.csv", rows);
  for (const SweepRow& r : rows) {
    std::printf("%s omega=%s t=%d mean_rmse=%s\n", std::string(method_name(r.method)).c_str(),
                format_summary_number(r.report.omega).c_str(), r.report.t,
                format_summary_number(r.report.mean_rmse).c_str());
  }
  return 0;
}

int cmd_counts(std::uint64_t sites, int order, int steps, bool symmetric) {
  const CarlemanCounts c = carleman_counts(sites, kQ, order, steps, symmetric);
  std::printf("sites=%llu order=%d steps=%d symmetric=%d\n", static_cast<unsigned long long>(sites), order, steps,
              symmetric ? 1 : 0);
  std::printf("n_natural=%llu\nn_cl=%llu\nq=%d\n", static_cast<unsigned long long>(c.n_natural),
              static_cast<unsigned long long>(c.n_cl), c.q);
  return 0;
}

int cmd_gates(int qubits, std::uint64_t sites) {
  const qemu::GateEstimate g = qemu::gate_count_estimate(qubits);
  std::printf("system_qubits=%d\nper_controlled_unitary=%llu\ntotal=%llu\n", qubits,
              static_cast<unsigned long long>(g.per_controlled_unitary), static_cast<unsigned long long>(g.total));
  std::printf("global_sites=%llu\nglobal_system_qubits=%d\nglobal_gate_scaling=%s\n",
              static_cast<unsigned long long>(sites), qemu::global_system_qubits(sites, kQ),
              format_summary_number(qemu::global_gate_scaling(sites, kQ)).c_str());
  return 0;
}

int cmd_qemu_verify(const CommonFlags& flags, bool full_pairs) {
  const ExperimentConfig cfg = resolve(flags);
  const auto vs = build_velocity_set<double>();
  const auto t = build_tensors(cfg.flow.omega, vs);
  const QemuCollision qc = prepare_qemu_collision(cfg.flow.nx, cfg.flow.ny, t, !full_pairs);
  const LatticeField<double> f = init_kolmogorov(cfg.flow, vs);
  const auto mode = cfg.sample ? qemu::CircuitMode::sample : qemu::CircuitMode::postselect;
  const QemuStepResult r = qemu_step(f, t, vs, qc, mode, cfg.seed);
  if (!qc.lcu.notice.empty()) std::fprintf(stderr, "%s\n", qc.lcu.notice.c_str());
  std::printf("layout=%s\nqubits=%d\n", full_pairs ? "full_pairs" : "single_step", qc.layout.total_qubits() + 1);
  std::printf("gamma=%s\nc_max=%s\n", format_summary_number(qc.lcu.gamma).c_str(),
              format_summary_number(qc.lcu.c_max).c_str());
  std::printf("outcome=%d\np_success=%s\np_expected=%s\n", r.outcome_bit, format_summary_number(r.p_success).c_str(),
              format_summary_number(r.p_expected).c_str());
  std::printf("leakage_max=%s\nresidual=%s\n", format_summary_number(r.leakage_max).c_str(),
              format_summary_number(r.residual).c_str());
  if (r.outcome_bit != 0) {
    std::printf("verdict=retry (ancilla measured 1)\n");
    return 0;
  }
  const bool ok = r.residual <= 1e-10;
  std::printf("verdict=%s\n", ok ? "ok" : "mismatch");
  return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carleman-linearised lattice Boltzmann experiments"};
  app.require_subcommand(1);

  CommonFlags run_flags, compare_flags, sweep_flags, verify_flags;
  CLI::App* run = app.add_subcommand("run", "run one method and write CSV outputs");
  add_common(run, run_flags);

  CLI::App* compare = app.add_subcommand("compare", "RMSE time series of --method against BGK");
  add_common(compare, compare_flags);

  CLI::App* sweep = app.add_subcommand("sweep", "RMSE at compare_at for a list of omegas");
  add_common(sweep, sweep_flags);
  std::string omegas = "0.8,1.2,1.5";
  std::vector<std::string> methods{"carleman_tr2", "carleman_cl2"};
  sweep->add_option("--omegas", omegas, "comma-separated relaxation rates")->capture_default_str();
  sweep->add_option("--methods", methods, "methods compared against BGK")->capture_default_str();

  CLI::App* counts = app.add_subcommand("counts", "Carleman variable and qubit counts");
  std::uint64_t count_sites = 1024;
  int order = 2;
  int window = 0;
  bool symmetric = false;
  counts->add_option("--sites", count_sites, "lattice sites N")->capture_default_str();
  counts->add_option("--order", order, "truncation order (2 or 3)")->capture_default_str();
  counts->add_option("--window-steps", window, "time steps for the windowed count; 0 = global")->capture_default_str();
  counts->add_flag("--symmetric", symmetric, "single-step count with symmetric pairs merged");

  CLI::App* verify = app.add_subcommand("qemu-verify", "one emulated quantum step checked against the classical one");
  add_common(verify, verify_flags);
  bool full_pairs = false;
  verify->add_flag("--full-pairs", full_pairs, "embed all site pairs instead of the single-step layout");

  CLI::App* gates = app.add_subcommand("gates", "two-qubit gate estimates");
  int qubits = 6;
  std::uint64_t gate_sites = 1024;
  gates->add_option("--qubits", qubits, "system qubits of the collision unitary")->capture_default_str();
  gates->add_option("--sites", gate_sites, "sites for the multi-step scaling")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*compare) return cmd_compare(compare_flags);
    if (*sweep) return cmd_sweep(sweep_flags, omegas, methods);
    if (*counts) return cmd_counts(count_sites, order, window, symmetric);
    if (*verify) return cmd_qemu_verify(verify_flags, full_pairs);
    if (*gates) return cmd_gates(qubits, gate_sites);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid argument: %s\n", e.what());
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::fprintf(stderr, "capacity error: %s\n", e.what());
    return kExitCapacity;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
