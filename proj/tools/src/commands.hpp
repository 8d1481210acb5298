#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "settings.hpp"

namespace neuropong::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct Common {
  Settings settings;
  std::filesystem::path out;
  bool quiet = false;
  std::vector<std::string> argv;  // recorded in manifests
};

int cmd_run(const Common& c);
int cmd_sweep(const Common& c, const std::vector<std::uint64_t>& seeds, std::size_t jobs);
int cmd_bench(const Common& c);
int cmd_replay(const Common& c, const std::filesystem::path& log, std::size_t eval_every);

// "1-10", "1,4,9" or a mix such as "1-3,7".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace neuropong::cli
