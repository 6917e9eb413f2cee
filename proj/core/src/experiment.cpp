#include "sddelab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sddelab/brownian.hpp"
#include "sddelab/errors.hpp"
#include "sddelab/euler.hpp"
#include "sddelab/oracle.hpp"

namespace sddelab {

namespace {

using nlohmann::json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* emit_name(EmitKind kind) {
  switch (kind) {
    case EmitKind::errors_csv: return "errors_csv";
    case EmitKind::report_json: return "report_json";
    case EmitKind::plot_data: return "plot_data";
  }
  return "?";
}

EmitKind emit_from_name(const std::string& name) {
  if (name == "errors_csv") return EmitKind::errors_csv;
  if (name == "report_json") return EmitKind::report_json;
  if (name == "plot_data") return EmitKind::plot_data;
  throw ConfigError("emit", "unknown output kind '" + name + "'");
}

const char* norm_name(ErrorNorm norm) {
  return norm == ErrorNorm::terminal ? "terminal" : "sup";
}

ErrorNorm norm_from_name(const std::string& name) {
  if (name == "terminal") return ErrorNorm::terminal;
  if (name == "sup") return ErrorNorm::sup;
  throw ConfigError("error_norm", "expected 'terminal' or 'sup', got '" + name + "'");
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Runs fn(stream) for stream 0..count-1 on `workers` threads. The assignment
/// of streams to threads is irrelevant to the result: every stream writes only
/// its own slot.
template <typename Fn>
void parallel_streams(std::int64_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count || failed.load(std::memory_order_relaxed)) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

TestProblemParams TestProblemSpec::params() const {
  TestProblemParams out;
  out.p = p;
  out.tau = tau;
  out.a = a;
  out.b = b;
  out.beta1 = beta1;
  out.beta2 = beta2;
  out.beta3 = beta3;
  out.l1 = l1;
  out.l2 = l2;
  const double s = xi.slope, c = xi.intercept;
  out.xi = [s, c](double t) { return s * t + c; };
  return out;
}

ExperimentConfig config_from_preset(const std::string& name) {
  ExperimentConfig config;
  config.preset = name;
  TestProblemSpec& pr = config.problem;
  if (name == "table1") {
    pr = TestProblemSpec{};  // the default parameter set is the reference study
  } else if (name == "table1_sqrt") {
    pr = TestProblemSpec{2.0, 1.0, -8.0, 4.0, 0.0, 1.0, 1.0, 0.5, 0.5, XiSpec{1.0, 1.0}};
  } else if (name == "zero_noise") {
    pr = TestProblemSpec{2.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, XiSpec{0.0, 1.0}};
  } else if (name == "additive_noise") {
    pr = TestProblemSpec{2.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, XiSpec{0.0, 1.0}};
  } else if (name == "zero") {
    pr = TestProblemSpec{2.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, XiSpec{0.0, 1.0}};
  } else {
    std::string known;
    for (const std::string& preset : preset_names()) {
      known += known.empty() ? preset : ", " + preset;
    }
    throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
  }
  return config;
}

std::vector<std::string> preset_names() {
  return {"table1", "table1_sqrt", "zero_noise", "additive_noise", "zero"};
}

namespace {

void apply_problem_fields(TestProblemSpec& pr, const json& jp) {
  if (jp.contains("p")) pr.p = jp.at("p").get<double>();
  if (jp.contains("tau")) pr.tau = jp.at("tau").get<double>();
  if (jp.contains("a")) pr.a = jp.at("a").get<double>();
  if (jp.contains("b")) pr.b = jp.at("b").get<double>();
  if (jp.contains("beta1")) pr.beta1 = jp.at("beta1").get<double>();
  if (jp.contains("beta2")) pr.beta2 = jp.at("beta2").get<double>();
  if (jp.contains("beta3")) pr.beta3 = jp.at("beta3").get<double>();
  if (jp.contains("l1")) pr.l1 = jp.at("l1").get<double>();
  if (jp.contains("l2")) pr.l2 = jp.at("l2").get<double>();
  if (jp.contains("xi")) {
    const json& jx = jp.at("xi");
    if (jx.contains("slope")) pr.xi.slope = jx.at("slope").get<double>();
    if (jx.contains("intercept")) pr.xi.intercept = jx.at("intercept").get<double>();
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }

  ExperimentConfig config;
  try {
    if (j.contains("preset")) {
      config = config_from_preset(j.at("preset").get<std::string>());
    }
    if (j.contains("problem")) {
      apply_problem_fields(config.problem, j.at("problem"));
    }
    if (j.contains("levels")) config.levels = j.at("levels").get<std::vector<int>>();
    if (j.contains("fine_exponent")) config.fine_exponent = j.at("fine_exponent").get<int>();
    if (j.contains("num_paths")) config.num_paths = j.at("num_paths").get<std::int64_t>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("p")) config.p = j.at("p").get<double>();
    if (j.contains("outputs")) config.outputs = j.at("outputs").get<std::string>();
    if (j.contains("emit")) {
      config.emit.clear();
      for (const auto& name : j.at("emit")) {
        config.emit.push_back(emit_from_name(name.get<std::string>()));
      }
    }
    if (j.contains("workers")) config.workers = j.at("workers").get<int>();
    if (j.contains("error_norm")) {
      config.error_norm = norm_from_name(j.at("error_norm").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError("<document>", std::string("malformed config: ") + e.what());
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config", "cannot open config file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  json j;
  if (config.preset) j["preset"] = *config.preset;
  j["problem"] = {{"p", config.problem.p},     {"tau", config.problem.tau},
                  {"a", config.problem.a},     {"b", config.problem.b},
                  {"beta1", config.problem.beta1}, {"beta2", config.problem.beta2},
                  {"beta3", config.problem.beta3}, {"l1", config.problem.l1},
                  {"l2", config.problem.l2},
                  {"xi", {{"slope", config.problem.xi.slope},
                          {"intercept", config.problem.xi.intercept}}}};
  j["levels"] = config.levels;
  j["fine_exponent"] = config.fine_exponent;
  j["num_paths"] = config.num_paths;
  j["seed"] = config.seed;
  j["p"] = config.p;
  j["outputs"] = config.outputs;
  json emit = json::array();
  for (EmitKind kind : config.emit) emit.push_back(emit_name(kind));
  j["emit"] = emit;
  j["workers"] = config.workers;
  j["error_norm"] = norm_name(config.error_norm);
  return j.dump(2) + "\n";
}

void validate_config(const ExperimentConfig& config) {
  if (!(config.problem.tau > 0.0)) throw ConfigError("problem.tau", "must be positive");
  if (!(config.problem.l1 > 0.0)) throw ConfigError("problem.l1", "must be positive");
  if (!(config.problem.l2 > 0.0)) throw ConfigError("problem.l2", "must be positive");
  if (!(config.p > 0.0)) throw ConfigError("p", "moment order must be positive");
  if (config.levels.empty()) throw ConfigError("levels", "at least one level required");
  for (int N : config.levels) {
    if (N < 0 || N > 30) throw ConfigError("levels", "exponents must be in [0, 30]");
  }
  if (!std::is_sorted(config.levels.begin(), config.levels.end()) ||
      std::adjacent_find(config.levels.begin(), config.levels.end()) != config.levels.end()) {
    throw ConfigError("levels", "must be sorted ascending without duplicates");
  }
  const int max_level = config.levels.back();
  if (config.fine_exponent < max_level + 4) {
    throw ConfigError("fine_exponent",
                      "oracle separation rule requires fine_exponent >= max(levels) + 4");
  }
  if (config.fine_exponent > 26) throw ConfigError("fine_exponent", "must be at most 26");
  if (config.num_paths < 1) throw ConfigError("num_paths", "at least one path required");
  if (config.workers < 0) throw ConfigError("workers", "must be non-negative");
  if (config.outputs.empty() && !config.emit.empty()) {
    throw ConfigError("outputs", "output directory required when emit is non-empty");
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);

  const TestProblemParams params = config.problem.params();
  const SDDEProblem problem = build_test_problem(params);
  {
    const auto validation = validate_delays(problem, 64);
    if (!validation.ok) {
      throw ConfigError("problem", "delay validation failed: " + validation.violation->reason);
    }
  }

  const double tau = params.tau;
  const std::int64_t fine_per_tau = std::int64_t{1} << config.fine_exponent;
  const std::int64_t fine_steps = 2 * fine_per_tau;  // horizon is 2 tau
  const std::size_t num_levels = config.levels.size();
  const std::int64_t M = config.num_paths;

  // Per-stream coupled differences, stored by stream so the reduction order
  // is independent of scheduling.
  std::vector<std::vector<double>> diff_pow(num_levels,
                                            std::vector<double>(static_cast<std::size_t>(M)));
  std::vector<std::vector<double>> diff_pow2(num_levels,
                                             std::vector<double>(static_cast<std::size_t>(M)));

  parallel_streams(M, resolve_workers(config.workers), [&](std::int64_t stream) {
    const BrownianPath path = generate_increments(config.seed, static_cast<std::uint64_t>(stream),
                                                  0.0, 2.0 * tau, fine_steps);
    OracleSolution oracle;
    try {
      oracle = exact_solution(params, path);
    } catch (const IntegrationError& e) {
      throw IntegrationError(e.step(), e.value(),
                             "oracle blow-up at stream " + std::to_string(stream) + ": " + e.what());
    }
    if (!(oracle.path_ref == path.ref())) {
      throw std::logic_error("run_experiment: oracle consumed a decoupled path");
    }
    if (!std::isfinite(oracle.terminal())) {
      throw IntegrationError(0, oracle.terminal(),
                             "oracle produced a non-finite terminal value at stream " +
                                 std::to_string(stream));
    }

    for (std::size_t li = 0; li < num_levels; ++li) {
      const int N = config.levels[li];
      const std::int64_t n_per_tau = std::int64_t{1} << N;
      const std::int64_t factor = fine_per_tau / n_per_tau;
      double diff;
      try {
        const EulerPath euler = integrate(problem, coarsen(path, factor), n_per_tau);
        if (config.error_norm == ErrorNorm::terminal) {
          diff = std::abs(oracle.terminal() - euler.terminal_scalar());
        } else {
          // sup over the Euler grid; the oracle grid refines it by `factor`
          diff = 0.0;
          for (std::int64_t j = 0; j <= euler.num_steps; ++j) {
            diff = std::max(diff, std::abs(oracle.values[static_cast<std::size_t>(j * factor)] -
                                           euler.scalar_state(j)));
          }
        }
      } catch (const IntegrationError& e) {
        throw IntegrationError(e.step(), e.value(),
                               "scheme blow-up at stream " + std::to_string(stream) + ", level n=2^" +
                                   std::to_string(N) + ": " + e.what());
      }
      const double d = std::pow(diff, config.p);
      diff_pow[li][static_cast<std::size_t>(stream)] = d;
      diff_pow2[li][static_cast<std::size_t>(stream)] = d * d;
    }
  });

  ConvergenceReport report;
  report.num_paths = M;
  report.seed = config.seed;
  report.p = config.p;
  for (std::size_t li = 0; li < num_levels; ++li) {
    const std::int64_t n_per_tau = std::int64_t{1} << config.levels[li];
    report.levels.push_back({n_per_tau, tau / static_cast<double>(n_per_tau)});
    const double mean_pow = pairwise_sum(diff_pow[li]) / static_cast<double>(M);
    const double error = std::pow(mean_pow, 1.0 / config.p);
    report.errors.push_back(error);
    // delta method: se(m^(1/p)) = m^(1/p - 1)/p * se(m)
    double se = 0.0;
    if (M > 1 && mean_pow > 0.0) {
      const double mean_pow2 = pairwise_sum(diff_pow2[li]) / static_cast<double>(M);
      const double var = std::max(mean_pow2 - mean_pow * mean_pow, 0.0);
      se = std::pow(mean_pow, 1.0 / config.p - 1.0) / config.p *
           std::sqrt(var / static_cast<double>(M - 1));
    }
    report.mc_std_errors.push_back(se);
    if (error == 0.0) report.degenerate = true;
  }
  if (!report.degenerate && report.levels.size() >= 3) {
    std::vector<std::int64_t> ns;
    for (const LevelSpec& level : report.levels) ns.push_back(level.n_per_tau);
    const RateFit fit = fit_rate(ns, report.errors);
    report.slope = fit.slope;
    report.slope_std_error = fit.std_error;
  }

  ExperimentResult result;
  result.report = std::move(report);

  if (!config.emit.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.outputs, ec);
    if (ec) {
      throw ConfigError("outputs", "cannot create output directory '" + config.outputs +
                                       "': " + ec.message());
    }
    for (EmitKind kind : config.emit) {
      const std::filesystem::path dir(config.outputs);
      switch (kind) {
        case EmitKind::errors_csv: {
          const std::string path = (dir / "errors.csv").string();
          write_errors_csv(result.report, path);
          result.files_written.push_back(path);
          break;
        }
        case EmitKind::report_json: {
          const std::string path = (dir / "report.json").string();
          std::ofstream out(path, std::ios::binary);
          if (!out) throw ConfigError("outputs", "cannot write '" + path + "'");
          out << report_to_json(result.report);
          result.files_written.push_back(path);
          break;
        }
        case EmitKind::plot_data: {
          // log-log data is undefined for degenerate (zero-error) or
          // single-level reports; the other outputs still carry the run
          if (result.report.degenerate || result.report.levels.size() < 2) break;
          const std::string path = (dir / "plot.csv").string();
          emit_plot_data(result.report, path);
          result.files_written.push_back(path);
          break;
        }
      }
    }
  }
  return result;
}

void emit_plot_data(const ConvergenceReport& report, const std::string& path) {
  if (report.levels.size() < 2) {
    throw std::invalid_argument("emit_plot_data: at least 2 levels required");
  }
  for (double e : report.errors) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("emit_plot_data: errors must be positive");
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("emit_plot_data: cannot write '" + path + "'");
  }
  out << "# seed=" << report.seed << "\n";
  out << "log2_n,log2_error,series\n";
  const double x0 = std::log2(static_cast<double>(report.levels.front().n_per_tau));
  const double y0 = std::log2(report.errors.front());
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const double x = std::log2(static_cast<double>(report.levels[i].n_per_tau));
    out << format_g17(x) << ',' << format_g17(std::log2(report.errors[i])) << ",data\n";
  }
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const double x = std::log2(static_cast<double>(report.levels[i].n_per_tau));
    out << format_g17(x) << ',' << format_g17(y0 - 0.5 * (x - x0)) << ",reference\n";
  }
  if (!out) {
    throw std::runtime_error("emit_plot_data: write failed for '" + path + "'");
  }
}

std::string report_to_json(const ConvergenceReport& report) {
  json levels = json::array();
  for (const LevelSpec& level : report.levels) {
    levels.push_back({{"n_per_tau", level.n_per_tau}, {"h", level.h}});
  }
  json j = {{"levels", levels},
            {"errors", report.errors},
            {"mc_std_errors", report.mc_std_errors},
            {"num_paths", report.num_paths},
            {"seed", report.seed},
            {"slope", report.slope ? json(*report.slope) : json(nullptr)},
            {"slope_std_error",
             report.slope_std_error ? json(*report.slope_std_error) : json(nullptr)},
            {"p", report.p},
            {"degenerate", report.degenerate}};
  return j.dump(2) + "\n";
}

void write_errors_csv(const ConvergenceReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_errors_csv: cannot write '" + path + "'");
  }
  out << "h,n,rmse,mc_stderr,num_paths,p,seed\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    out << format_g17(report.levels[i].h) << ',' << report.levels[i].n_per_tau << ','
        << format_g17(report.errors[i]) << ',' << format_g17(report.mc_std_errors[i]) << ','
        << report.num_paths << ',' << format_g17(report.p) << ',' << report.seed << "\n";
  }
  if (!out) {
    throw std::runtime_error("write_errors_csv: write failed for '" + path + "'");
  }
}

}  // namespace sddelab
