#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "neuropong/bench.hpp"
#include "neuropong/experiment.hpp"

namespace neuropong::cli {

// Everything a command can be configured with.
struct Settings {
  ExperimentConfig experiment;
  bench::BenchConfig bench;
};

enum class Kind { kReal, kInteger, kBool, kText };

struct Key {
  std::string section;
  std::string name;
  Kind kind;
  std::function<std::string(const Settings&)> get;
  std::function<void(Settings&, const std::string&)> set;  // throws std::invalid_argument
  std::string dotted() const { return section + "." + name; }
};

// Every configurable key, in the order they are written back out.
const std::vector<Key>& keys();

// Sets one dotted key; throws ConfigError naming the key (and `origin`, when
// given) on unknown keys or unparsable values.
void apply(Settings& s, const std::string& dotted, const std::string& value,
           const std::string& origin = {});

// INI-style file: `[section]` headers, `key = value` lines, `#` or `;`
// comments. Unknown sections or keys are errors reported with line numbers.
void load_ini(Settings& s, const std::filesystem::path& path);
void load_ini_text(Settings& s, const std::string& text, const std::string& origin);

std::string to_ini(const Settings& s);

// Fully resolved configuration as {section: {key: value}}.
nlohmann::json to_json(const Settings& s);
void from_json(Settings& s, const nlohmann::json& j, const std::string& origin);

}  // namespace neuropong::cli
