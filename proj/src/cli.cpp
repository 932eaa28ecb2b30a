#include "psurr/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "psurr/checkpoint.hpp"
#include "psurr/config.hpp"
#include "psurr/csv.hpp"

#ifndef PSURR_VERSION
#define PSURR_VERSION "0.0.0"
#endif

namespace psurr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised for bad invocations; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string version_stamp() {
  std::string stamp = "psurr " PSURR_VERSION;
  if (const char* git = std::getenv("PSURR_GIT_REV")) stamp += std::string(" git:") + git;
  return stamp;
}

fs::path resolve_out(const std::string& out, const char* command) {
  if (!out.empty()) return out;
  return fs::path(default_out_root()) / command;
}

void prepare_out_dir(const fs::path& dir, bool force) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw UsageError("output path '" + dir.string() + "' is not a directory");
    if (!fs::is_empty(dir, ec)) {
      if (!force) {
        throw UsageError("output directory '" + dir.string() + "' is not empty; pass --force to overwrite");
      }
      fs::remove_all(dir);
    }
  }
  fs::create_directories(dir);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  return json::parse(in);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Turns leftover `--key value` / `--key=value` pairs into config overrides.
void apply_extras(json& j, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string tok = extras[i];
    if (tok.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + tok + "'");
    tok = tok.substr(2);
    std::string value;
    if (const auto eq = tok.find('='); eq != std::string::npos) {
      value = tok.substr(eq + 1);
      tok = tok.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw UsageError("missing value for --" + tok);
      value = extras[++i];
    }
    std::replace(tok.begin(), tok.end(), '-', '_');
    apply_override(j, tok, value);
  }
}

json load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config", "'" + path + "' is not valid JSON");
  if (!j.is_object()) throw ConfigError("config", "top level must be an object");
  return j;
}

const std::vector<std::string> kMetricsHeader{"step",        "episode_return", "surrogate_loss",
                                              "value_loss",  "mean_ratio",     "mean_reg_amount",
                                              "entropy",     "grad_norm",      "skipped_updates"};

void write_metrics_row(CsvWriter& csv, const StepMetrics& m) {
  csv.field(m.step);
  csv.field(m.episode_return);
  csv.field(m.surrogate_loss);
  csv.field(m.value_loss);
  csv.field(m.mean_ratio);
  csv.field(m.mean_regularization_amount);
  csv.field(m.entropy);
  csv.field(m.grad_norm);
  csv.field(m.skipped_updates);
  csv.end_row();
}

json stats_json(const EvalStats& st) {
  return json{{"episodes", st.returns.size()}, {"median", st.median}, {"mean", st.mean},
              {"ci95_low", st.ci_low},          {"ci95_high", st.ci_high}};
}

/// Runs one training job into `dir`, which must exist. Returns the final
/// test statistics when `final_eval_episodes` > 0.
EvalStats run_training(const TrainerConfig& cfg, const fs::path& dir, int final_eval_episodes) {
  std::ofstream metrics(dir / "metrics.csv");
  if (!metrics) throw std::runtime_error("cannot write metrics.csv");
  CsvWriter csv(metrics);
  csv.header(kMetricsHeader);
  const TrainResult res = train(cfg, [&](const StepMetrics& m) { write_metrics_row(csv, m); });
  metrics.flush();

  std::ofstream evals(dir / "evals.csv");
  CsvWriter ecsv(evals);
  ecsv.header({"step", "median", "mean", "ci95_low", "ci95_high"});
  for (const auto& e : res.evals) {
    ecsv.field(e.step);
    ecsv.field(e.stats.median);
    ecsv.field(e.stats.mean);
    ecsv.field(e.stats.ci_low);
    ecsv.field(e.stats.ci_high);
    ecsv.end_row();
  }
  save_policy_file((dir / "policy.ckpt").string(), res.policy);
  save_value_file((dir / "value.ckpt").string(), res.value);
  if (final_eval_episodes <= 0) return {};
  return evaluate_policy(cfg.env, res.policy, final_eval_episodes, cfg.seed + 1000003ULL);
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::string out;
  bool force = false;
  std::vector<std::string> seed;  // kept as text so it flows through overrides
};

int cmd_train(const TrainArgs& a, const std::vector<std::string>& extras, std::ostream& out) {
  json j = load_config_json(a.config);
  if (!a.seed.empty()) apply_override(j, "seed", a.seed.front());
  apply_extras(j, extras);
  const TrainerConfig cfg = config_from_json(j);

  const fs::path dir = resolve_out(a.out, "train");
  prepare_out_dir(dir, a.force);
  json manifest{{"command", "train"},
                {"version", version_stamp()},
                {"config", config_to_json(cfg)},
                {"seeds", {cfg.seed}},
                {"files",
                 {{"metrics", "metrics.csv"},
                  {"evals", "evals.csv"},
                  {"policy", "policy.ckpt"},
                  {"value", "value.ckpt"}}},
                {"status", "running"}};
  write_json(dir / "manifest.json", manifest);

  run_training(cfg, dir, 0);
  manifest["status"] = "complete";
  write_json(dir / "manifest.json", manifest);
  out << "trained " << cfg.total_steps << " steps; outputs in " << dir.string() << '\n';
  return kExitOk;
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string env;
  int episodes = 50;
  std::uint64_t seed = 0;
  std::string out;
  bool force = false;
  bool stochastic = false;
  std::string trace;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (!fs::exists(a.checkpoint)) throw UsageError("checkpoint '" + a.checkpoint + "' does not exist");
  if (a.episodes <= 0) throw UsageError("--episodes must be positive");
  EnvSpec spec;
  try {
    spec = EnvSpec::make(parse_env_name(a.env));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  GaussianPolicy policy;
  try {
    policy = load_policy_file(a.checkpoint);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  if (policy.config().state_dim != spec.state_dim || policy.config().action_dim != spec.action_dim) {
    throw UsageError("checkpoint dimensions do not match environment '" + a.env + "'");
  }

  const fs::path dir = resolve_out(a.out, "eval");
  prepare_out_dir(dir, a.force);
  const EvalStats st = evaluate_policy(spec, policy, a.episodes, a.seed, !a.stochastic);

  std::ofstream rf(dir / "returns.csv");
  CsvWriter csv(rf);
  csv.header({"episode", "return"});
  for (std::size_t k = 0; k < st.returns.size(); ++k) {
    csv.field(static_cast<long long>(k));
    csv.field(st.returns[k]);
    csv.end_row();
  }
  json summary = stats_json(st);
  summary["env"] = a.env;
  summary["seed"] = a.seed;
  summary["checkpoint"] = a.checkpoint;
  summary["version"] = version_stamp();
  write_json(dir / "summary.json", summary);

  if (!a.trace.empty()) {
    std::ofstream tf(a.trace);
    if (!tf) throw std::runtime_error("cannot write trace '" + a.trace + "'");
    write_trace_csv(tf, run_episode(spec, policy, a.seed, !a.stochastic));
  }

  out << "episodes " << st.returns.size() << "  median " << format_double(st.median) << "  mean "
      << format_double(st.mean) << "  95% CI [" << format_double(st.ci_low) << ", "
      << format_double(st.ci_high) << "]\n";
  return kExitOk;
}

// --------------------------------------------------------------- curves

struct CurvesArgs {
  std::string variants = "ppo_clip,ppo_rb,ppo_rpe";
  double epsilon = 0.1;
  double beta = 0.5;
  double eta = 0.3;
  double rho_min = 0.01;
  double rho_max = 3.0;
  int points = 600;
  std::string out;
  bool force = false;
  bool svg = false;
};

void write_svg(const fs::path& path, const std::vector<CurvePoint>& rows, const std::string& title) {
  double lo = rows.front().neg_loss, hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.neg_loss);
    hi = std::max(hi, r.neg_loss);
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double x0 = rows.front().rho, x1 = rows.back().rho;
  constexpr double W = 480, H = 320, M = 30;
  std::ofstream out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<text x=\"" << M << "\" y=\"18\" font-size=\"12\">" << title << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"black\" points=\"";
  for (const auto& r : rows) {
    const double x = M + (r.rho - x0) / (x1 - x0) * (W - 2 * M);
    const double y = H - M - (r.neg_loss - lo) / (hi - lo) * (H - 2 * M);
    out << format_double(x) << ',' << format_double(y) << ' ';
  }
  out << "\"/>\n</svg>\n";
}

int cmd_curves(const CurvesArgs& a, std::ostream& out) {
  if (a.points < 2) throw UsageError("--points must be at least 2");
  if (!(a.rho_min > 0.0) || !(a.rho_max > a.rho_min)) throw UsageError("need 0 < rho-min < rho-max");
  std::vector<Variant> variants;
  try {
    for (const auto& v : split_list(a.variants)) variants.push_back(parse_variant(v));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (variants.empty()) throw UsageError("--variants is empty");

  std::vector<double> grid(static_cast<std::size_t>(a.points));
  for (int i = 0; i < a.points; ++i) {
    grid[static_cast<std::size_t>(i)] = a.rho_min + (a.rho_max - a.rho_min) * i / (a.points - 1);
  }

  std::vector<SurrogateSpec> specs;
  for (Variant v : variants) {
    SurrogateSpec s{v, a.epsilon, v == Variant::ppo_rb ? a.eta : 0.0, a.beta};
    try {
      validate(s);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string(to_string(v)) + ": " + e.what());
    }
    specs.push_back(s);
  }

  const fs::path dir = resolve_out(a.out, "curves");
  prepare_out_dir(dir, a.force);
  json files = json::array();
  for (const auto& s : specs) {
    for (Sign sigma : {Sign::positive, Sign::negative}) {
      const std::string stem =
          "curve_" + std::string(to_string(s.variant)) + (sigma == Sign::positive ? "_pos" : "_neg");
      const auto rows = loss_curve(s, sigma, grid);
      std::ofstream f(dir / (stem + ".csv"));
      CsvWriter csv(f);
      csv.header({"rho", "neg_loss", "dloss_drho"});
      for (const auto& r : rows) {
        csv.field(r.rho);
        csv.field(r.neg_loss);
        csv.field(r.dloss_drho);
        csv.end_row();
      }
      files.push_back(stem + ".csv");
      if (a.svg) {
        write_svg(dir / (stem + ".svg"), rows, stem);
        files.push_back(stem + ".svg");
      }
    }
  }

  std::vector<double> betas{0.0, 0.25, 0.5, 0.75, 1.0};
  if (std::find(betas.begin(), betas.end(), a.beta) == betas.end()) betas.push_back(a.beta);
  std::ofstream rf(dir / "relative_ratio.csv");
  CsvWriter csv(rf);
  csv.header({"rho", "beta", "rho_beta"});
  for (double b : betas) {
    for (double rho : grid) {
      csv.field(rho);
      csv.field(b);
      csv.field(relative_ratio(rho, b));
      csv.end_row();
    }
  }
  files.push_back("relative_ratio.csv");

  write_json(dir / "manifest.json", json{{"command", "curves"},
                                          {"version", version_stamp()},
                                          {"epsilon", a.epsilon},
                                          {"beta", a.beta},
                                          {"eta", a.eta},
                                          {"rho_min", a.rho_min},
                                          {"rho_max", a.rho_max},
                                          {"points", a.points},
                                          {"files", files}});
  out << "wrote " << files.size() << " files to " << dir.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string config;
  std::string seeds = "0,1,2,3,4";
  std::string variants = "ppo_clip,ppo_rb,ppo_rpe";
  double eta = 0.3;
  int workers = 0;
  std::string out;
  bool force = false;
  bool resume = false;
};

struct SweepJob {
  Variant variant;
  std::uint64_t seed;
  TrainerConfig config;
  fs::path dir;
};

int cmd_sweep(const SweepArgs& a, const std::vector<std::string>& extras, std::ostream& out,
              std::ostream& err) {
  json base = load_config_json(a.config);
  apply_extras(base, extras);
  (void)config_from_json(base);

  std::vector<std::uint64_t> seeds;
  for (const auto& s : split_list(a.seeds)) {
    try {
      seeds.push_back(std::stoull(s));
    } catch (const std::exception&) {
      throw UsageError("bad seed '" + s + "'");
    }
  }
  if (seeds.empty()) throw UsageError("--seeds is empty");

  const fs::path dir = resolve_out(a.out, "sweep");
  if (a.resume) {
    if (!fs::exists(dir / "manifest.json")) throw UsageError("--resume: no manifest in '" + dir.string() + "'");
  } else {
    prepare_out_dir(dir, a.force);
  }

  std::vector<SweepJob> jobs;
  json runs = json::array();
  for (const auto& vname : split_list(a.variants)) {
    Variant v;
    try {
      v = parse_variant(vname);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    for (std::uint64_t seed : seeds) {
      json j = base;
      j["variant"] = std::string(to_string(v));
      j["seed"] = seed;
      j["eta"] = v == Variant::ppo_rb ? a.eta : 0.0;
      SweepJob job{v, seed, config_from_json(j),
                   dir / "runs" / std::string(to_string(v)) / ("seed_" + std::to_string(seed))};
      runs.push_back({{"variant", to_string(v)}, {"seed", seed}, {"dir", fs::relative(job.dir, dir).string()}});
      jobs.push_back(std::move(job));
    }
  }
  if (jobs.empty()) throw UsageError("--variants is empty");

  json manifest{{"command", "sweep"},
                {"version", version_stamp()},
                {"config", base},
                {"seeds", seeds},
                {"runs", runs},
                {"files", {{"summary", "summary.csv"}}}};
  write_json(dir / "manifest.json", manifest);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers =
      std::min<unsigned>(a.workers > 0 ? static_cast<unsigned>(a.workers) : hw, static_cast<unsigned>(jobs.size()));
  std::vector<double> medians(jobs.size(), 0.0);
  std::vector<std::string> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const SweepJob& job = jobs[i];
      try {
        const fs::path result = job.dir / "result.json";
        if (a.resume && fs::exists(result)) {
          medians[i] = read_json(result).at("median_return").get<double>();
          continue;
        }
        fs::create_directories(job.dir);
        const EvalStats st = run_training(job.config, job.dir, job.config.eval_episodes);
        json r = stats_json(st);
        r["variant"] = to_string(job.variant);
        r["seed"] = job.seed;
        r["median_return"] = st.median;
        write_json(result, r);
        medians[i] = st.median;
        std::lock_guard lock(log_mutex);
        out << to_string(job.variant) << " seed " << job.seed << ": median " << format_double(st.median) << '\n';
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  bool failed = false;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!failures[i].empty()) {
      err << "run " << to_string(jobs[i].variant) << " seed " << jobs[i].seed << " failed: " << failures[i] << '\n';
      failed = true;
    }
  }
  if (failed) return kExitRuntime;

  std::ofstream sf(dir / "summary.csv");
  CsvWriter csv(sf);
  csv.header({"variant", "seed", "median_return"});
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    csv.field(to_string(jobs[i].variant));
    csv.field(static_cast<long long>(jobs[i].seed));
    csv.field(medians[i]);
    csv.end_row();
  }
  out << "summary written to " << (dir / "summary.csv").string() << '\n';
  return kExitOk;
}

}  // namespace

std::string default_out_root() {
  const char* env = std::getenv("PSURR_OUT_DIR");
  return env && *env ? std::string(env) : std::string("psurr_out");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Policy-regularized PPO surrogates: train, evaluate, export curves, sweep", "psurr"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train one agent from a JSON config");
  train_cmd->add_option("--config", ta.config, "JSON config file")->required();
  train_cmd->add_option("--out", ta.out, "Output directory");
  train_cmd->add_flag("--force", ta.force, "Overwrite a non-empty output directory");
  train_cmd->add_option("--seed", ta.seed, "Seed override")->expected(1);
  train_cmd->allow_extras();

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a policy checkpoint");
  eval_cmd->add_option("--checkpoint", ea.checkpoint, "Policy checkpoint")->required();
  eval_cmd->add_option("--env", ea.env, "Environment name")->required();
  eval_cmd->add_option("--episodes", ea.episodes, "Test episodes")->capture_default_str();
  eval_cmd->add_option("--seed", ea.seed, "Base seed")->capture_default_str();
  eval_cmd->add_option("--out", ea.out, "Output directory");
  eval_cmd->add_flag("--force", ea.force, "Overwrite a non-empty output directory");
  eval_cmd->add_flag("--stochastic", ea.stochastic, "Sample actions instead of acting with the mean");
  eval_cmd->add_option("--trace", ea.trace, "Write the first episode as a CSV trace");

  CurvesArgs ca;
  auto* curves_cmd = app.add_subcommand("curves", "Export surrogate loss curves and relative ratios");
  curves_cmd->add_option("--variants", ca.variants, "Comma-separated variants")->capture_default_str();
  curves_cmd->add_option("--epsilon", ca.epsilon)->capture_default_str();
  curves_cmd->add_option("--beta", ca.beta)->capture_default_str();
  curves_cmd->add_option("--eta", ca.eta, "Rollback gain for ppo_rb")->capture_default_str();
  curves_cmd->add_option("--rho-min", ca.rho_min)->capture_default_str();
  curves_cmd->add_option("--rho-max", ca.rho_max)->capture_default_str();
  curves_cmd->add_option("--points", ca.points)->capture_default_str();
  curves_cmd->add_option("--out", ca.out, "Output directory");
  curves_cmd->add_flag("--force", ca.force, "Overwrite a non-empty output directory");
  curves_cmd->add_flag("--svg", ca.svg, "Also render SVG line plots");

  SweepArgs sa;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train variants x seeds and summarize test medians");
  sweep_cmd->add_option("--config", sa.config, "JSON config file")->required();
  sweep_cmd->add_option("--seeds", sa.seeds, "Comma-separated seeds")->capture_default_str();
  sweep_cmd->add_option("--variants", sa.variants, "Comma-separated variants")->capture_default_str();
  sweep_cmd->add_option("--eta", sa.eta, "Rollback gain used for ppo_rb runs")->capture_default_str();
  sweep_cmd->add_option("--workers", sa.workers, "Parallel workers (0 = hardware threads)");
  sweep_cmd->add_option("--out", sa.out, "Output directory");
  sweep_cmd->add_flag("--force", sa.force, "Overwrite a non-empty output directory");
  sweep_cmd->add_flag("--resume", sa.resume, "Skip runs that already have results");
  sweep_cmd->allow_extras();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(ta, train_cmd->remaining(), out);
    if (*eval_cmd) return cmd_eval(ea, out);
    if (*curves_cmd) return cmd_curves(ca, out);
    if (*sweep_cmd) return cmd_sweep(sa, sweep_cmd->remaining(), out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace psurr::cli
