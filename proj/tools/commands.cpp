#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsit/dynamics.hpp"
#include "nsit/errors.hpp"
#include "nsit/measurement.hpp"
#include "nsit/witness.hpp"

namespace nsit::cli {

namespace {

SystemParams params_of(const RunConfig& cfg) {
  return SystemParams(cfg.omega, cfg.gamma0, cfg.nbar);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool valid_strength(double e) { return e >= 0.0 && e <= 1.0; }

std::vector<double> strength_grid(const RunConfig& cfg) {
  if (cfg.epsilons_given) return cfg.epsilons;
  std::vector<double> grid(static_cast<std::size_t>(cfg.points));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = grid.size() == 1 ? 0.0
                               : static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  return grid;
}

BlochVector random_bloch(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  double x = normal(rng), y = normal(rng), z = normal(rng);
  const double n = std::sqrt(x * x + y * y + z * z);
  const double r = std::cbrt(unit(rng));
  return {r * x / n, r * y / n, r * z / n};
}

class SuiteAccumulator {
 public:
  SuiteAccumulator(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }
  void observe(double deviation) {
    if (!std::isfinite(deviation)) deviation = HUGE_VAL;
    result_.max_deviation = std::max(result_.max_deviation, deviation);
  }
  SuiteResult finish() {
    result_.passed = result_.max_deviation <= result_.tolerance;
    return result_;
  }

 private:
  SuiteResult result_;
};

// Mid-protocol state after the measurement at tau / 2, written out entry by
// entry from the dynamics and channel formulas.
Matrix2c expected_mid_state(const SystemParams& p, double tau, MeasurementStrength eps) {
  const double t1 = 0.5 * tau;
  const double root = eps.coherence_factor();
  const double relax = -std::expm1(-p.gamma() * t1) / (2.0 * p.nbar() + 1.0);
  const double damp = std::exp(-0.5 * p.gamma() * t1);
  const double c = std::cos(p.omega() * t1);
  const double s = std::sin(p.omega() * t1);
  Matrix2c m;
  m << 0.5 * (1.0 - root * relax), 0.5 * damp * Complex(c, -s * root),
      0.5 * damp * Complex(c, s * root), 0.5 * (1.0 + root * relax);
  return m;
}

}  // namespace

void validate(const RunConfig& cfg) {
  require(cfg.omega > 0.0 && std::isfinite(cfg.omega), "--omega must be > 0");
  require(cfg.gamma0 >= 0.0 && std::isfinite(cfg.gamma0), "--gamma0 must be >= 0");
  require(cfg.nbar >= 0.0 && std::isfinite(cfg.nbar), "--nbar must be >= 0");
  require(cfg.tau_steps >= 1, "--tau-steps must be >= 1");
  require(cfg.tau_min >= 0.0 && std::isfinite(cfg.tau_max), "--tau-min must be >= 0");
  require(cfg.tau_min <= cfg.tau_max, "--tau-min must not exceed --tau-max");
  require(!cfg.epsilons.empty(), "--epsilons must not be empty");
  require(std::all_of(cfg.epsilons.begin(), cfg.epsilons.end(), valid_strength),
          "--epsilons values must lie in [0, 1]");
  require(cfg.tol > 0.0, "--tol must be > 0");
  require(cfg.points >= 1, "--points must be >= 1");
  if (cfg.command == Command::EffStrength) {
    require(!cfg.gammas.empty(), "--gammas must not be empty");
    require(std::all_of(cfg.gammas.begin(), cfg.gammas.end(),
                        [](double g) { return g >= 0.0 && std::isfinite(g); }),
            "--gammas values must be >= 0");
    require(cfg.epsilons.size() == 1, "eff-strength takes exactly one --epsilons value");
  }
  if (cfg.command == Command::MonteCarlo) {
    require(cfg.shots >= kMinShots, "--shots must be >= 100");
  }
}

std::vector<double> tau_grid(const RunConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.tau_steps);
  std::vector<double> grid(n, cfg.tau_min);
  if (n == 1) return grid;
  const double span = cfg.tau_max - cfg.tau_min;
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = cfg.tau_min + span * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  grid.back() = cfg.tau_max;
  return grid;
}

Table witness_scan_table(const RunConfig& cfg) {
  Table t{{"tau", "epsilon", "p_unmeasured", "p_measured", "witness", "epsilon_eff"}, {}};
  const auto taus = tau_grid(cfg);
  for (const WitnessPoint& w : sweep(params_of(cfg), taus, cfg.epsilons, 0)) {
    t.rows.push_back({w.tau, w.epsilon, w.p_unmeasured, w.p_measured, w.witness, w.epsilon_eff});
  }
  return t;
}

Table strength_curve_table(const RunConfig& cfg) {
  Table t{{"epsilon", "f", "f_derivative"}, {}};
  for (double e : strength_grid(cfg)) {
    const MeasurementStrength eps(e);
    const double d = amplitude_factor_derivative(eps);
    t.rows.push_back({e, amplitude_factor(eps),
                      std::isfinite(d) ? std::optional<double>(d) : std::nullopt});
  }
  return t;
}

Table eff_strength_table(const RunConfig& cfg) {
  Table t{{"tau", "gamma", "epsilon_eff"}, {}};
  const MeasurementStrength eps(cfg.epsilons.front());
  const auto taus = tau_grid(cfg);
  for (double g0 : cfg.gammas) {
    const SystemParams p(cfg.omega, g0, cfg.nbar);
    for (double tau : taus) {
      t.rows.push_back({tau, p.gamma(), effective_strength(ProtocolConfig(p, tau, eps))});
    }
  }
  return t;
}

Table monte_carlo_table(const RunConfig& cfg) {
  Table t{{"tau", "epsilon", "witness", "estimate", "standard_error"}, {}};
  const SystemParams p = params_of(cfg);
  const auto taus = tau_grid(cfg);
  for (double e : cfg.epsilons) {
    for (double tau : taus) {
      const ProtocolConfig c(p, tau, MeasurementStrength(e));
      const MonteCarloEstimate mc = witness_monte_carlo(c, cfg.shots, cfg.seed);
      t.rows.push_back({tau, e, witness_closed_form(c), mc.estimate, mc.standard_error});
    }
  }
  return t;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string render(const Table& table, Format format) {
  if (format == Format::Json) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (row[i]) {
          obj[table.header[i]] = *row[i];
        } else {
          obj[table.header[i]] = nullptr;
        }
      }
      rows.push_back(std::move(obj));
    }
    return rows.dump(2) + "\n";
  }

  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (row[i]) out += format_number(*row[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<SuiteResult> run_verification(const RunConfig& cfg) {
  const SystemParams p = params_of(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit;
  const std::vector<double> strengths{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> taus;
  for (int k = 1; k <= 10; ++k) taus.push_back(2.0 * k);

  std::vector<SuiteResult> suites;

  {
    SuiteAccumulator duality("duality", 1e-10);
    const PauliBasis& basis = pauli_basis();
    const QubitOperator observables[] = {basis.x, basis.y, basis.z, basis.identity};
    for (int i = 0; i < 100; ++i) {
      const DensityMatrix rho = bloch_to_density(random_bloch(rng));
      const double t = 10.0 * unit(rng);
      const DensityMatrix evolved = evolve_state(p, rho, t);
      for (const QubitOperator& x : observables) {
        duality.observe(
            std::abs(expectation(x, evolved) - expectation(evolve_observable(p, x, t), rho)));
      }
    }
    suites.push_back(duality.finish());
  }

  {
    SuiteAccumulator semigroup("semigroup", 1e-10);
    for (int i = 0; i < 100; ++i) {
      const double t1 = 10.0 * unit(rng);
      const double t2 = 10.0 * unit(rng);
      const Eigen::Matrix4d lhs =
          (heisenberg_propagator(p, t1) * heisenberg_propagator(p, t2)).matrix();
      semigroup.observe((lhs - heisenberg_propagator(p, t1 + t2).matrix()).cwiseAbs().maxCoeff());
    }
    suites.push_back(semigroup.finish());
  }

  if (p.gamma0() > 0.0) {
    SuiteAccumulator fixed("steady-state", 1e-12);
    const DensityMatrix ss = steady_state(p);
    for (double t : {1.0 / p.gamma(), 5.0 / p.gamma(), 50.0}) {
      fixed.observe((evolve_state(p, ss, t).matrix() - ss.matrix()).cwiseAbs().maxCoeff());
    }
    suites.push_back(fixed.finish());
  }

  {
    SuiteAccumulator composed("probabilities-composed", 1e-12);
    SuiteAccumulator forms("witness-forms", 1e-12);
    for (double e : strengths) {
      for (double tau : taus) {
        const ProtocolConfig c(p, tau, MeasurementStrength(e));
        composed.observe(std::abs(prob_unmeasured(c) - prob_unmeasured_composed(c)));
        composed.observe(std::abs(prob_measured(c) - prob_measured_composed(c)));
        forms.observe(
            std::abs(witness_closed_form(c) - std::abs(prob_unmeasured(c) - prob_measured(c))));
      }
    }
    suites.push_back(composed.finish());
    suites.push_back(forms.finish());
  }

  {
    SuiteAccumulator pipeline("witness-pipeline", 10.0 * cfg.tol);
    SuiteAccumulator mid("mid-state", 10.0 * cfg.tol);
    for (double e : strengths) {
      for (double tau : taus) {
        const MeasurementStrength eps(e);
        const ProtocolConfig c(p, tau, eps);
        const PipelineResult r = run_witness_pipeline(c, cfg.tol);
        pipeline.observe(std::abs(r.witness - witness_closed_form(c)));
        mid.observe(
            (r.mid_state.matrix() - expected_mid_state(p, tau, eps)).cwiseAbs().maxCoeff());
      }
    }
    suites.push_back(pipeline.finish());
    suites.push_back(mid.finish());
  }

  {
    SuiteAccumulator channel("nonselective-bloch-action", 1e-12);
    for (int i = 0; i < 200; ++i) {
      const BlochVector r = random_bloch(rng);
      const MeasurementStrength eps(unit(rng));
      const BlochVector out = density_to_bloch(nonselective_update(bloch_to_density(r), eps));
      const double k = eps.coherence_factor();
      channel.observe(std::max({std::abs(out.rx - r.rx), std::abs(out.ry - k * r.ry),
                                std::abs(out.rz - k * r.rz)}));
    }
    suites.push_back(channel.finish());
  }

  {
    SuiteAccumulator eff("effective-strength-identity", 1e-12);
    for (int i = 0; i < 1000; ++i) {
      const MeasurementStrength eps(unit(rng));
      const double tau = 40.0 * unit(rng);
      const ProtocolConfig c(p, tau, eps);
      const double lhs = amplitude_factor(MeasurementStrength(effective_strength(c)));
      eff.observe(std::abs(lhs - std::exp(-0.5 * p.gamma() * tau) * amplitude_factor(eps)));
    }
    suites.push_back(eff.finish());
  }

  {
    SuiteAccumulator dist("disturbance", 1e-12);
    for (double e : {0.0, 0.6, 1.0}) {
      const MeasurementStrength eps(e);
      dist.observe(std::abs(disturbance(eps) - 0.5 * (1.0 - std::sqrt(1.0 - e * e))));
    }
    suites.push_back(dist.finish());
  }

  return suites;
}

std::string render_report(const std::vector<SuiteResult>& suites) {
  std::ostringstream os;
  bool all = true;
  for (const auto& s : suites) {
    os << (s.passed ? "PASS " : "FAIL ") << s.name << " max_deviation=" << shortest(s.max_deviation)
       << " tolerance=" << shortest(s.tolerance) << '\n';
    all = all && s.passed;
  }
  os << (all ? "verify: all suites passed" : "verify: FAILED") << '\n';
  return os.str();
}

int write_output(const std::string& text, const std::string& path, std::ostream& out,
                 std::ostream& err) {
  if (path == "-") {
    out << text;
    out.flush();
    return out ? kExitOk : kExitIo;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      err << "error: cannot open " << tmp.string() << " for writing\n";
      return kExitIo;
    }
    f << text;
    f.close();
    if (!f) {
      err << "error: failed writing " << tmp.string() << '\n';
      std::error_code ec;
      fs::remove(tmp, ec);
      return kExitIo;
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    err << "error: cannot move output into place at " << path << ": " << ec.message() << '\n';
    fs::remove(tmp, ec);
    return kExitIo;
  }
  return kExitOk;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (cfg.command == Command::Verify) {
      const auto suites = run_verification(cfg);
      const bool ok = std::all_of(suites.begin(), suites.end(),
                                  [](const SuiteResult& s) { return s.passed; });
      for (const auto& s : suites) {
        if (!s.passed) err << "verify: suite '" << s.name << "' exceeded tolerance\n";
      }
      const int io = write_output(render_report(suites), cfg.output_path, out, err);
      if (io != kExitOk) return io;
      return ok ? kExitOk : kExitVerifyFailed;
    }

    Table table;
    switch (cfg.command) {
      case Command::WitnessScan: table = witness_scan_table(cfg); break;
      case Command::StrengthCurve: table = strength_curve_table(cfg); break;
      case Command::EffStrength: table = eff_strength_table(cfg); break;
      case Command::MonteCarlo: table = monte_carlo_table(cfg); break;
      case Command::Verify: break;
    }
    return write_output(render(table, cfg.format), cfg.output_path, out, err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"No-signaling-in-time witness of a damped qubit under finite-strength measurements",
               "nsit"};
  app.set_config("--config", "", "INI/TOML file with option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "csv";
  app.add_option("--omega", cfg.omega, "qubit angular frequency")->capture_default_str();
  app.add_option("--gamma0", cfg.gamma0, "spontaneous decay rate")->capture_default_str();
  app.add_option("--nbar", cfg.nbar, "thermal occupation")->capture_default_str();
  app.add_option("--tau-min", cfg.tau_min)->capture_default_str();
  app.add_option("--tau-max", cfg.tau_max)->capture_default_str();
  app.add_option("--tau-steps", cfg.tau_steps)->capture_default_str();
  auto* eps_opt = app.add_option("--epsilons", cfg.epsilons, "measurement strengths")
                      ->delimiter(',')
                      ->capture_default_str();
  app.add_option("--gammas", cfg.gammas, "gamma0 values (eff-strength)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--points", cfg.points, "epsilon grid size (strength-curve)")
      ->capture_default_str();
  app.add_option("--shots", cfg.shots)->capture_default_str();
  app.add_option("--seed", cfg.seed)->capture_default_str();
  app.add_option("--out", cfg.output_path, "output path, '-' for stdout")->capture_default_str();
  app.add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--tol", cfg.tol, "RK4 tolerance")->capture_default_str();

  const std::pair<const char*, Command> commands[] = {
      {"witness-scan", Command::WitnessScan},   {"strength-curve", Command::StrengthCurve},
      {"eff-strength", Command::EffStrength},   {"verify", Command::Verify},
      {"monte-carlo", Command::MonteCarlo},
  };
  const char* descriptions[] = {
      "witness versus tau for several strengths",
      "amplitude factor f(epsilon) and its derivative",
      "effective strength versus tau for several damping rates",
      "closed forms against the numerical pipeline",
      "Monte Carlo estimate of the witness",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    subs.push_back(app.add_subcommand(commands[i].first, descriptions[i]));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) cfg.command = commands[i].second;
  }
  cfg.format = format == "json" ? Format::Json : Format::Csv;
  cfg.epsilons_given = eps_opt->count() > 0;
  if (cfg.command == Command::EffStrength && !cfg.epsilons_given) cfg.epsilons = {1.0};
  return run(cfg, out, err);
}

}  // namespace nsit::cli
