#include "clbm/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace clbm {

namespace {

constexpr std::pair<Method, std::string_view> kMethodNames[] = {
    {Method::lbm_bgk, "lbm_bgk"},
    {Method::lbm_mode_coupling, "lbm_mode_coupling"},
    {Method::carleman_tr2, "carleman_tr2"},
    {Method::carleman_cl2, "carleman_cl2"},
    {Method::carleman_tr3, "carleman_tr3"},
    {Method::carleman_cl3, "carleman_cl3"},
    {Method::qemu_single_step, "qemu_single_step"},
};

constexpr int kMaxCircuitAttempts = 10000;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, int line) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key), line);
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value, int line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean '" + std::string(value) + "' for " + std::string(key), line);
}

/// Shortest representation that round-trips.
std::string csv_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void write_rmse_header(std::ostream& out) {
  out << "method,omega,t,mean_rmse";
  for (int i = 0; i < kQ; ++i) out << ",rmse_" << i;
  out << '\n';
}

void write_rmse_row(std::ostream& out, const SweepRow& row) {
  out << method_name(row.method) << ',' << csv_number(row.report.omega) << ',' << row.report.t << ','
      << csv_number(row.report.mean_rmse);
  for (int i = 0; i < kQ; ++i) out << ',' << csv_number(row.report.per_velocity_rmse(i));
  out << '\n';
}

void require_finite(const LatticeField<double>& f, const char* who, int step) {
  if (!f.all_finite()) {
    throw NumericalError(std::string(who) + ": non-finite population at step " + std::to_string(step));
  }
}

/// BGK populations at t = 0..steps.
std::vector<LatticeField<double>> reference_history(const ExperimentConfig& cfg, int steps) {
  std::vector<LatticeField<double>> history;
  history.reserve(static_cast<std::size_t>(steps) + 1);
  evolve(cfg, Method::lbm_bgk, steps, [&](int, const LatticeField<double>& f) { history.push_back(f); });
  return history;
}

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const auto& [method, n] : kMethodNames) {
    if (n == name) return method;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  try {
    flow.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (compare_at && (*compare_at < 0 || *compare_at > flow.steps)) {
    throw ConfigError("compare_at must lie in [0, steps]");
  }
  if (memory_cap_bytes == 0) throw ConfigError("memory_cap must be positive");
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value, int line) {
  if (key == "nx") {
    cfg.flow.nx = parse_number<int>(key, value, line);
  } else if (key == "ny") {
    cfg.flow.ny = parse_number<int>(key, value, line);
  } else if (key == "omega") {
    cfg.flow.omega = parse_number<double>(key, value, line);
  } else if (key == "ax") {
    cfg.flow.ax = parse_number<double>(key, value, line);
  } else if (key == "ay") {
    cfg.flow.ay = parse_number<double>(key, value, line);
  } else if (key == "kx") {
    cfg.flow.kx = parse_number<int>(key, value, line);
  } else if (key == "ky") {
    cfg.flow.ky = parse_number<int>(key, value, line);
  } else if (key == "steps") {
    cfg.flow.steps = parse_number<int>(key, value, line);
  } else if (key == "method") {
    try {
      cfg.method = parse_method(value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), line);
    }
  } else if (key == "compare_at") {
    cfg.compare_at = parse_number<int>(key, value, line);
  } else if (key == "out" || key == "output_dir") {
    cfg.output_dir = std::string(value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value, line);
  } else if (key == "memory_cap" || key == "memory_cap_bytes") {
    cfg.memory_cap_bytes = parse_number<std::size_t>(key, value, line);
  } else if (key == "sample") {
    cfg.sample = parse_bool(key, value, line);
  } else if (key == "full_scale") {
    if (parse_bool(key, value, line)) cfg.flow.nx = cfg.flow.ny = 32;
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'", line);
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value", line);
    const std::string_view key = trim(s.substr(0, eq));
    const std::string_view value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    apply_setting(base, key, value, line);
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, std::move(base));
}

double rmse(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  if (a.size() != b.size() || a.size() == 0) throw std::invalid_argument("rmse: fields must be non-empty and equal in size");
  const double n = static_cast<double>(a.size());
  double sum = 0.0;
  for (Eigen::Index s = 0; s < a.size(); ++s) {
    if (!(std::abs(a(s)) > kDivisionGuard)) {
      throw NumericalError("rmse: reference value " + csv_number(a(s)) + " at site " + std::to_string(s) +
                           " is below the division guard");
    }
    const double r = (a(s) - b(s)) / a(s);
    sum += r * r / n;
  }
  return std::sqrt(sum);
}

RmseReport mean_rmse(const LatticeField<double>& reference, const LatticeField<double>& other, double omega, int t) {
  if (reference.nx() != other.nx() || reference.ny() != other.ny()) {
    throw std::invalid_argument("mean_rmse: grids differ");
  }
  RmseReport r;
  r.omega = omega;
  r.t = t;
  for (int i = 0; i < kQ; ++i) r.per_velocity_rmse(i) = rmse(reference.data().row(i), other.data().row(i));
  r.mean_rmse = r.per_velocity_rmse.mean();
  return r;
}

QemuCollision prepare_qemu_collision(int nx, int ny, const CollisionTensors<double>& t, bool single_step) {
  QemuCollision qc;
  qc.layout = qemu::make_layout(nx, ny, single_step);
  const qemu::SparseOperator C = qemu::build_collision_matrix(t, qc.layout);
  qc.lcu = qemu::lcu_decompose(qemu::hermitian_augment(C));
  return qc;
}

QemuStepResult qemu_step(const LatticeField<double>& f, const CollisionTensors<double>& t,
                         const VelocitySet<double>& vs, const QemuCollision& qc, qemu::CircuitMode mode,
                         std::uint64_t seed) {
  const Locality locality = qc.layout.single_step ? Locality::local_single_step : Locality::full_pairs;
  const CarlemanState<double> s = lift(f, 2, Cutoff::truncation, locality);
  const qemu::QuantumState qs = qemu::embed(s);
  const qemu::CircuitOutcome out = qemu::apply_collision_circuit(qs, qc.lcu, mode, seed);

  QemuStepResult r;
  const CarlemanState<double> collided = collide_truncate2(s, t);
  r.classical = stream_lifted(collided, vs);
  const double gain = collided.to_vector().norm() / qs.scale / qc.lcu.c_max;
  r.p_expected = gain * gain / ((qc.lcu.gamma + 1.0) * (qc.lcu.gamma + 1.0));
  r.p_success = out.p_success;
  r.outcome_bit = out.outcome_bit;

  const qemu::Readback rb =
      qemu::readback(out.outcome_bit == 0 ? qemu::apply_multistreaming(out.post_state) : out.post_state);
  r.quantum = rb.state;
  r.leakage_max = rb.leakage_max;
  r.residual = out.outcome_bit == 0 ? (r.quantum.to_vector() - r.classical.to_vector()).cwiseAbs().maxCoeff()
                                    : std::numeric_limits<double>::infinity();
  return r;
}

EvolveResult evolve(const ExperimentConfig& cfg, Method method, int steps, const FieldObserver& observer) {
  cfg.validate();
  const auto vs = build_velocity_set<double>();
  const auto t = build_tensors(cfg.flow.omega, vs);
  FlowConfig flow = cfg.flow;
  EvolveResult result;
  LatticeField<double> field = init_kolmogorov(flow, vs);
  if (observer) observer(0, field);

  switch (method) {
    case Method::lbm_bgk:
    case Method::lbm_mode_coupling: {
      flow.collision = method == Method::lbm_bgk ? CollisionKind::bgk : CollisionKind::mode_coupling;
      for (int n = 1; n <= steps; ++n) {
        field = step(field, flow, t, vs);
        require_finite(field, "lbm", n);
        if (observer) observer(n, field);
      }
      break;
    }
    case Method::carleman_tr2:
    case Method::carleman_cl2:
    case Method::carleman_tr3:
    case Method::carleman_cl3: {
      const int order = method == Method::carleman_tr2 || method == Method::carleman_cl2 ? 2 : 3;
      const Cutoff cutoff =
          method == Method::carleman_tr2 || method == Method::carleman_tr3 ? Cutoff::truncation : Cutoff::closure;
      CarlemanState<double> s = lift(field, order, cutoff, Locality::full_pairs, cfg.memory_cap_bytes);
      for (int n = 1; n <= steps; ++n) {
        s = carleman_step(s, t, vs);
        require_finite(s.f, "carleman", n);
        if (observer) observer(n, s.f);
      }
      field = s.f;
      break;
    }
    case Method::qemu_single_step: {
      const QemuCollision qc = prepare_qemu_collision(flow.nx, flow.ny, t, true);
      std::mt19937_64 seeds(cfg.seed);
      const auto mode = cfg.sample ? qemu::CircuitMode::sample : qemu::CircuitMode::postselect;
      for (int n = 1; n <= steps; ++n) {
        QemuStepResult r;
        int attempts = 0;
        do {
          if (++attempts > kMaxCircuitAttempts) {
            throw NumericalError("qemu: no successful ancilla outcome after " + std::to_string(kMaxCircuitAttempts) +
                                 " attempts at step " + std::to_string(n));
          }
          r = qemu_step(field, t, vs, qc, mode, seeds());
        } while (r.outcome_bit != 0);
        result.circuit_attempts += attempts;
        result.circuit.push_back({n, r.p_success, qc.lcu.gamma, qc.lcu.c_max, r.leakage_max});
        result.max_equivalence_residual = std::max(result.max_equivalence_residual, r.residual);
        field = r.quantum.f;
        require_finite(field, "qemu", n);
        if (observer) observer(n, field);
      }
      break;
    }
  }
  result.final_field = std::move(field);
  return result;
}

Comparison compare_methods(const ExperimentConfig& cfg, Method method) {
  const int horizon = cfg.effective_compare_at();
  const auto reference = reference_history(cfg, horizon);
  Comparison c;
  evolve(cfg, method, horizon, [&](int n, const LatticeField<double>& f) {
    const RmseReport r = mean_rmse(reference[static_cast<std::size_t>(n)], f, cfg.flow.omega, n);
    c.series.emplace_back(n, r.mean_rmse);
    if (n == horizon) c.report = r;
  });
  return c;
}

std::vector<SweepRow> sweep_omega(const ExperimentConfig& cfg, const std::vector<double>& omegas,
                                  const std::vector<Method>& methods) {
  std::vector<SweepRow> rows;
  for (const double omega : omegas) {
    ExperimentConfig c = cfg;
    c.flow.omega = omega;
    c.validate();
    const int horizon = c.effective_compare_at();
    const LatticeField<double> reference = evolve(c, Method::lbm_bgk, horizon).final_field;
    for (const Method m : methods) {
      const LatticeField<double> other = evolve(c, m, horizon).final_field;
      rows.push_back({m, mean_rmse(reference, other, omega, horizon)});
    }
  }
  return rows;
}

void write_rmse_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_output(path);
  write_rmse_header(out);
  for (const SweepRow& row : rows) write_rmse_row(out, row);
}

std::string format_summary_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto vs = build_velocity_set<double>();
  const int horizon = cfg.effective_compare_at();
  const auto reference = reference_history(cfg, horizon);

  RunSummary summary;
  const LatticeField<double> initial = init_kolmogorov(cfg.flow, vs);
  const EvolveResult result = evolve(cfg, cfg.method, cfg.flow.steps, [&](int n, const LatticeField<double>& f) {
    const VelocityAmplitudes a = velocity_amplitudes(f, cfg.flow.kx, cfg.flow.ky, vs);
    summary.diagnostics.push_back({n, a.ux, a.uy});
    if (n <= horizon) {
      const RmseReport r = mean_rmse(reference[static_cast<std::size_t>(n)], f, cfg.flow.omega, n);
      summary.rmse_series.emplace_back(n, r.mean_rmse);
      if (n == horizon) summary.report = r;
    }
  });

  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream out = open_output(cfg.output_dir / "diagnostics.csv");
    out << "t,amplitude_ux,amplitude_uy\n";
    for (const DiagnosticRow& d : summary.diagnostics) {
      out << d.t << ',' << csv_number(d.amplitude_ux) << ',' << csv_number(d.amplitude_uy) << '\n';
    }
  }
  {
    std::ofstream out = open_output(cfg.output_dir / "field.csv");
    out << "x,y,rho,ux,uy\n";
    const auto m = macroscopic(result.final_field, vs);
    for (int x = 0; x < cfg.flow.nx; ++x) {
      for (int y = 0; y < cfg.flow.ny; ++y) {
        const Eigen::Index s = result.final_field.site(x, y);
        out << x << ',' << y << ',' << csv_number(m.rho(s)) << ',' << csv_number(m.ux(s)) << ','
            << csv_number(m.uy(s)) << '\n';
      }
    }
  }
  write_rmse_csv(cfg.output_dir / "rmse.csv", {{cfg.method, summary.report}});
  {
    std::ofstream out = open_output(cfg.output_dir / "rmse_series.csv");
    out << "t,mean_rmse\n";
    for (const auto& [n, e] : summary.rmse_series) out << n << ',' << csv_number(e) << '\n';
  }

  auto& v = summary.values;
  v["method"] = method_name(cfg.method);
  v["nx"] = std::to_string(cfg.flow.nx);
  v["ny"] = std::to_string(cfg.flow.ny);
  v["omega"] = format_summary_number(cfg.flow.omega);
  v["ax"] = format_summary_number(cfg.flow.ax);
  v["ay"] = format_summary_number(cfg.flow.ay);
  v["kx"] = std::to_string(cfg.flow.kx);
  v["ky"] = std::to_string(cfg.flow.ky);
  v["steps"] = std::to_string(cfg.flow.steps);
  v["compare_at"] = std::to_string(horizon);
  const double nu = viscosity(cfg.flow.omega);
  v["viscosity"] = format_summary_number(nu);
  v["reynolds"] = format_summary_number(reynolds(cfg.flow.ax, static_cast<double>(cfg.flow.ny), nu));
  v["mean_rmse"] = format_summary_number(summary.report.mean_rmse);
  v["mass_initial"] = format_summary_number(global_mass(initial));
  v["mass_final"] = format_summary_number(global_mass(result.final_field));
  v["mass_drift"] = format_summary_number(global_mass(result.final_field) - global_mass(initial));
  v["final_amplitude_ux"] = format_summary_number(summary.diagnostics.back().amplitude_ux);
  v["final_amplitude_uy"] = format_summary_number(summary.diagnostics.back().amplitude_uy);

  if (cfg.method == Method::qemu_single_step) {
    std::ofstream out = open_output(cfg.output_dir / "circuit.csv");
    out << "step,p_success,gamma,c_max,leakage_max\n";
    double p_min = 1.0;
    double leak = 0.0;
    for (const CircuitRow& c : result.circuit) {
      out << c.step << ',' << csv_number(c.p_success) << ',' << csv_number(c.gamma) << ',' << csv_number(c.c_max)
          << ',' << csv_number(c.leakage_max) << '\n';
      p_min = std::min(p_min, c.p_success);
      leak = std::max(leak, c.leakage_max);
    }
    if (!result.circuit.empty()) {
      v["p_success_min"] = format_summary_number(p_min);
      v["gamma"] = format_summary_number(result.circuit.front().gamma);
      v["c_max"] = format_summary_number(result.circuit.front().c_max);
    }
    v["leakage_max"] = format_summary_number(leak);
    v["equivalence_residual"] = format_summary_number(result.max_equivalence_residual);
    v["circuit_attempts"] = std::to_string(result.circuit_attempts);
  }

  std::ofstream out = open_output(cfg.output_dir / "summary.txt");
  for (const auto& [key, value] : v) out << key << '=' << value << '\n';
  return summary;
}

}  // namespace clbm
