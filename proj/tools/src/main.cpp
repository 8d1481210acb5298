#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "neuropong/error.hpp"
#include "neuropong/io.hpp"

using namespace neuropong;
using namespace neuropong::cli;

namespace {

// Collects `--section.key=value` and `--section.key value` overrides from the
// arguments CLI11 did not recognise.
std::vector<std::pair<std::string, std::string>> dotted_overrides(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.find('.') == std::string::npos) {
      throw ConfigError("unrecognised argument '" + arg + "'");
    }
    const std::string body = arg.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < extras.size()) {
      out.emplace_back(body, extras[++i]);
    } else {
      throw ConfigError("option '" + arg + "' needs a value");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop spiking network that learns a simplified Pong game"};
  app.require_subcommand(1);
  app.allow_extras();

  std::string config_path, manifest_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  bool quiet = false;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--manifest", manifest_path, "Reuse the configuration recorded in a manifest.json")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Base seed");
  app.add_option("--iterations", iterations, "Closed-loop iterations");
  app.add_flag("--quiet", quiet, "No progress output on stderr");

  auto* run = app.add_subcommand("run", "Train one network and write logs and metrics");
  auto* sweep = app.add_subcommand("sweep", "Independent runs over a seed list");
  std::string seeds_text = "1-10";
  std::size_t jobs = 1;
  sweep->add_option("--seeds", seeds_text, "Seed list such as 1-10 or 1,4,9");
  sweep->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  auto* bench_cmd = app.add_subcommand("bench", "Time closed-loop iterations");
  std::string modes_text, sizes_text;
  bench_cmd->add_option("--modes", modes_text, "no-plasticity,with-plasticity");
  bench_cmd->add_option("--sizes", sizes_text, "Network sizes such as 32x32,32x64");
  auto* replay = app.add_subcommand("replay", "Recompute metrics from a saved log");
  std::string log_path;
  std::size_t eval_every = 100;
  replay->add_option("log", log_path, "log.ndjson or iterations.csv")->required();
  replay->add_option("--eval-every", eval_every, "Window of the mean-reward curve for CSV input");

  for (auto* sub : {run, sweep, bench_cmd, replay}) {
    sub->fallthrough();
    sub->allow_extras();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  Common c;
  c.quiet = quiet;
  c.argv.assign(argv, argv + argc);
  try {
    std::vector<std::string> extras = app.remaining();
    if (!manifest_path.empty()) {
      const auto j = nlohmann::json::parse(io::slurp(manifest_path));
      if (!j.contains("config")) throw ConfigError(manifest_path + ": no config object");
      from_json(c.settings, j.at("config"), manifest_path);
    }
    if (!config_path.empty()) load_ini(c.settings, config_path);
    for (const auto& [key, value] : dotted_overrides(extras)) apply(c.settings, key, value, "command line");
    if (seed) c.settings.experiment.seed = *seed;
    if (iterations) c.settings.experiment.n_iterations = *iterations;
    if (!modes_text.empty()) apply(c.settings, "bench.modes", modes_text, "--modes");
    if (!sizes_text.empty()) apply(c.settings, "bench.sizes", sizes_text, "--sizes");

    c.out = out_dir.empty() ? std::filesystem::path("out") : std::filesystem::path(out_dir);
    if (run->parsed()) return cmd_run(c);
    if (sweep->parsed()) return cmd_sweep(c, parse_seed_list(seeds_text), jobs);
    if (bench_cmd->parsed()) return cmd_bench(c);
    if (out_dir.empty()) c.out = std::filesystem::path(log_path).parent_path() / "replay";
    return cmd_replay(c, log_path, eval_every);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << manifest_path << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
