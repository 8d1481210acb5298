#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "neuropong/bench.hpp"
#include "neuropong/error.hpp"
#include "neuropong/io.hpp"

#ifndef NEUROPONG_VERSION
#define NEUROPONG_VERSION "unknown"
#endif

namespace neuropong::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Written before any work starts and rewritten when the command ends, so an
// interrupted run leaves a manifest that says so.
class Manifest {
 public:
  Manifest(fs::path file, const std::string& command, const Common& c) : file_(std::move(file)) {
    j_["tool"] = "neuropong";
    j_["version"] = NEUROPONG_VERSION;
    j_["command"] = command;
    j_["argv"] = c.argv;
    j_["config"] = to_json(c.settings);
    j_["started_utc"] = utc_now();
    j_["finished_utc"] = nullptr;
    j_["status"] = "running";
    j_["partial"] = true;
    j_["artifacts"] = json::object();
  }

  json& operator[](const char* key) { return j_[key]; }

  void write() const {
    const fs::path tmp = file_.string() + ".tmp";
    io::write_file(tmp, j_.dump(2) + "\n");
    fs::rename(tmp, file_);
  }

  void finish(bool ok, const std::string& error = {}) {
    j_["finished_utc"] = utc_now();
    j_["status"] = ok ? "complete" : "failed";
    j_["partial"] = !ok;
    if (!error.empty()) j_["error"] = error;
    try {
      write();
    } catch (const std::exception& e) {
      std::cerr << "error: could not finalize manifest: " << e.what() << '\n';
    }
  }

 private:
  fs::path file_;
  json j_;
};

std::string weights_text(const SynapseMatrix& w) {
  std::ostringstream out;
  io::write_weights(out, w);
  return out.str();
}

std::string iterations_csv(const std::vector<IterationLog>& logs) {
  std::ostringstream out;
  io::write_iteration_csv_header(out);
  for (const auto& log : logs) io::write_iteration_csv_row(out, log);
  return out.str();
}

// Game traces of the policy evaluated last, one file per start column.
void write_games(const fs::path& dir, const ExperimentConfig& cfg, const ExperimentResult& result) {
  fs::create_directories(dir);
  const Policy policy = evaluation_policy(result.final_weights, result.population, cfg);
  for (std::size_t start = 0; start < cfg.env.n_columns; ++start) {
    const Episode ep = play_episode(policy, cfg.env, start);
    std::ostringstream out;
    io::write_game_trace(out, ep.trace);
    char name[32];
    std::snprintf(name, sizeof(name), "start_%02zu.csv", start);
    io::write_file(dir / name, out.str());
  }
}

json summary_json(const io::MetricsFiles& files) {
  json j = json::object();
  std::istringstream in(files.summary_txt);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

void write_run_outputs(const fs::path& dir, const ExperimentConfig& cfg, const ExperimentResult& result,
                       bool write_logs) {
  const io::RunRecord record = io::make_record(cfg, result);
  if (write_logs) {
    io::write_file(dir / "iterations.csv", iterations_csv(result.logs));
    std::ostringstream nd;
    io::write_ndjson(nd, record);
    io::write_file(dir / "log.ndjson", nd.str());
  }
  io::write_metrics(dir / "metrics", record);
  io::write_file(dir / "weights_initial.txt", weights_text(result.initial_weights));
  io::write_file(dir / "weights_final.txt", weights_text(result.final_weights));
  write_games(dir / "games", cfg, result);
}

json run_artifacts() {
  return {{"iterations", "iterations.csv"},
          {"log", "log.ndjson"},
          {"catch_fraction", "metrics/catch_fraction.csv"},
          {"mean_reward", "metrics/mean_reward.csv"},
          {"summary", "metrics/summary.txt"},
          {"weights_heatmap", "metrics/weights_heatmap.csv"},
          {"weights_initial", "weights_initial.txt"},
          {"weights_final", "weights_final.txt"},
          {"games", "games/"}};
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::istringstream ss(text);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    if (s.empty() || s[0] == '-' || s[0] == '+') throw ConfigError("malformed seed list '" + text + "'");
    std::uint64_t v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || used == 0) throw ConfigError("malformed seed list '" + text + "'");
    return v;
  };
  for (std::string item; std::getline(ss, item, ',');) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(number(item));
      continue;
    }
    const auto lo = number(item.substr(0, dash)), hi = number(item.substr(dash + 1));
    if (hi < lo) throw ConfigError("seed range '" + item + "' is reversed");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

int cmd_run(const Common& c) {
  const ExperimentConfig& cfg = c.settings.experiment;
  cfg.validate();
  fs::create_directories(c.out);
  Manifest manifest(c.out / "manifest.json", "run", c);
  manifest["seed"] = cfg.seed;
  manifest["artifacts"] = run_artifacts();
  manifest.write();

  try {
    std::ofstream csv(c.out / "iterations.csv", std::ios::binary | std::ios::trunc);
    std::ofstream nd(c.out / "log.ndjson", std::ios::binary | std::ios::trunc);
    if (!csv || !nd) throw std::runtime_error("cannot open log files in " + c.out.string());
    io::write_iteration_csv_header(csv);
    io::NdjsonWriter writer(nd);

    ExperimentObserver obs;
    obs.on_start = [&](const Setup& setup) { writer.header(io::make_header_record(cfg, setup.population)); };
    obs.on_iteration = [&](const IterationLog& log) {
      io::write_iteration_csv_row(csv, log);
      writer.iteration(log);
    };
    obs.on_evaluation = [&](const CurvePoint& p) {
      writer.evaluation(p);
      if (!c.quiet) {
        std::cerr << "iteration " << p.iteration << "/" << cfg.n_iterations << "  catch_fraction "
                  << io::format_double(p.value) << '\n';
      }
    };
    const ExperimentResult result = run_experiment(cfg, obs);
    writer.final_weights(result.final_weights);
    csv.close();
    nd.close();
    if (!csv || !nd) throw std::runtime_error("writing logs failed");

    write_run_outputs(c.out, cfg, result, false);
    const io::MetricsFiles files = io::render_metrics(io::make_record(cfg, result));
    manifest["summary"] = summary_json(files);
    manifest.finish(true);
    std::cout << files.summary_txt << std::flush;
    return kExitOk;
  } catch (const std::exception& e) {
    manifest.finish(false, e.what());
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_sweep(const Common& c, const std::vector<std::uint64_t>& seeds, std::size_t jobs) {
  const ExperimentConfig& base = c.settings.experiment;
  base.validate();
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  fs::create_directories(c.out);
  Manifest manifest(c.out / "manifest.json", "sweep", c);
  manifest["seeds"] = seeds;
  manifest["artifacts"] = {{"aggregate", "aggregate_catch_fraction.csv"},
                           {"status", "status.csv"},
                           {"per_seed", "seed_<seed>/"}};
  manifest.write();

  std::vector<std::string> write_errors(seeds.size());
  std::mutex err_mutex;
  auto on_done = [&](const SweepEntry& entry) {
    // Called under the sweep's completion lock; each seed owns its directory.
    const std::size_t k = static_cast<std::size_t>(
        std::find(seeds.begin(), seeds.end(), entry.seed) - seeds.begin());
    if (entry.result) {
      ExperimentConfig cfg = base;
      cfg.seed = entry.seed;
      try {
        const fs::path dir = c.out / ("seed_" + std::to_string(entry.seed));
        fs::create_directories(dir);
        write_run_outputs(dir, cfg, *entry.result, true);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mutex);
        write_errors[k] = e.what();
      }
    }
    if (!c.quiet) {
      std::cerr << "seed " << entry.seed << ": "
                << (entry.result ? "done, final catch_fraction " +
                                       io::format_double(entry.result->metrics.catch_fraction_curve.back().value)
                                 : "failed: " + entry.error)
                << '\n';
    }
  };

  try {
    const auto entries = run_sweep(base, seeds, jobs, on_done);
    std::ostringstream agg;
    agg << "iteration,median,q25,q75,n_seeds\n";
    for (const auto& row : aggregate_catch_curves(entries)) {
      agg << row.iteration << ',' << io::format_double(row.median) << ',' << io::format_double(row.q25) << ','
          << io::format_double(row.q75) << ',' << row.n_seeds << '\n';
    }
    io::write_file(c.out / "aggregate_catch_fraction.csv", agg.str());

    std::ostringstream status;
    status << "seed,status,initial_catch_fraction,final_catch_fraction,diagonal_dominance,error\n";
    bool all_ok = true;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      std::string error = e.error.empty() ? write_errors[k] : e.error;
      const bool ok = e.result && error.empty();
      all_ok = all_ok && ok;
      for (auto& ch : error)
        if (ch == ',' || ch == '\n') ch = ';';
      status << e.seed << ',' << (ok ? "ok" : "failed") << ',';
      if (e.result) {
        const auto& m = e.result->metrics;
        status << io::format_double(m.initial_catch_fraction) << ','
               << io::format_double(m.catch_fraction_curve.back().value) << ','
               << io::format_double(m.diagonal_dominance);
      } else {
        status << ",,";
      }
      status << ',' << error << '\n';
    }
    io::write_file(c.out / "status.csv", status.str());
    manifest.finish(all_ok, all_ok ? "" : "one or more seeds failed");
    std::cout << status.str() << std::flush;
    return all_ok ? kExitOk : kExitRuntime;
  } catch (const std::exception& e) {
    manifest.finish(false, e.what());
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_bench(const Common& c) {
  bench::BenchConfig cfg = c.settings.bench;
  cfg.experiment = c.settings.experiment;
  cfg.validate();
  fs::create_directories(c.out);
  Manifest manifest(c.out / "manifest.json", "bench", c);
  manifest["artifacts"] = {{"summary", "bench_summary.csv"}, {"samples", "bench_samples.csv"}};
  manifest.write();
  try {
    const bench::Report report = bench::run_bench(cfg);
    std::ostringstream summary, samples;
    bench::write_summary_csv(summary, report.entries);
    bench::write_samples_csv(samples, report.samples);
    io::write_file(c.out / "bench_summary.csv", summary.str());
    io::write_file(c.out / "bench_samples.csv", samples.str());
    manifest["timer_resolution_s"] = report.timer_resolution_s;
    manifest["pinned"] = report.pinned;
    manifest["warnings"] = report.warnings;
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    manifest.finish(true);
    std::cout << summary.str() << std::flush;
    return kExitOk;
  } catch (const std::exception& e) {
    manifest.finish(false, e.what());
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_replay(const Common& c, const fs::path& log, std::size_t eval_every) {
  if (!fs::exists(log)) throw ConfigError("log file '" + log.string() + "' does not exist");
  if (eval_every == 0) throw ConfigError("--eval-every must be > 0");
  try {
    const std::string content = io::slurp(log);
    const auto first = content.find_first_not_of(" \t\r\n");
    fs::create_directories(c.out);
    std::vector<fs::path> written;
    if (first != std::string::npos && content[first] == '{') {
      std::istringstream in(content);
      io::write_metrics(c.out, io::read_ndjson(in));
      for (const char* f : {"catch_fraction.csv", "mean_reward.csv", "summary.txt", "weights_heatmap.csv"}) {
        written.push_back(c.out / f);
      }
    } else {
      std::istringstream in(content);
      const auto logs = io::read_iteration_csv(in);
      io::write_file(c.out / "mean_reward.csv", io::render_mean_reward(mean_reward_curve(logs, eval_every)));
      written.push_back(c.out / "mean_reward.csv");
      if (!c.quiet) {
        std::cerr << "note: CSV logs carry no evaluations or weights; replay the NDJSON log for "
                     "catch-fraction and heat-map output\n";
      }
    }
    for (const auto& p : written) std::cout << p.string() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << log.string() << ": " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace neuropong::cli
