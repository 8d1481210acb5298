#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "neuropong/experiment.hpp"

namespace neuropong::bench {

enum class Mode { kNoPlasticity, kWithPlasticity };

std::string mode_name(Mode mode);
// Accepts "no-plasticity" and "with-plasticity"; throws ConfigError otherwise.
Mode parse_mode(const std::string& name);

struct Size {
  std::size_t n_input = 32;
  std::size_t n_output = 32;
  friend bool operator==(const Size&, const Size&) = default;
};

// Parses "32x32,64x64"; throws ConfigError on malformed entries.
std::vector<Size> parse_sizes(const std::string& text);

struct BenchConfig {
  std::size_t n_iterations = 200;  // per mode and size, warmup included
  std::size_t warmup = 20;
  std::vector<Size> sizes{{32, 32}, {32, 64}, {32, 128}};
  std::vector<Mode> modes{Mode::kNoPlasticity, Mode::kWithPlasticity};
  std::uint64_t seed = 1;
  bool pin_thread = true;
  // Network, plasticity and noise settings; the shape is taken from `sizes`.
  ExperimentConfig experiment;

  void validate() const;
};

struct Sample {
  Mode mode = Mode::kNoPlasticity;
  Size size;
  std::size_t iteration = 0;  // index among measured iterations
  double seconds = 0.0;
};

struct Entry {
  Mode mode = Mode::kNoPlasticity;
  Size size;
  double median_s = 0.0;
  double p10_s = 0.0;
  double p90_s = 0.0;
  std::size_t n_samples = 0;
};

struct Report {
  std::vector<Entry> entries;
  std::vector<Sample> samples;
  std::vector<std::string> warnings;
  double timer_resolution_s = 0.0;
  bool pinned = false;
};

// Smallest observable nonzero step of the steady clock.
double timer_resolution();

// Measures one closed-loop iteration per sample. Modes are interleaved within
// each iteration so drift in machine state affects them alike; both modes see
// the same inputs and noise seeds.
Report run_bench(const BenchConfig& cfg);

// Quantile summary recomputed from raw samples, in (size, mode) order of
// first appearance.
std::vector<Entry> summarize(const std::vector<Sample>& samples);

inline constexpr const char* kSummaryCsvHeader = "mode,n_input,n_output,median_s,p10_s,p90_s,n_samples";
inline constexpr const char* kSamplesCsvHeader = "mode,n_input,n_output,iteration,seconds";

void write_summary_csv(std::ostream& out, const std::vector<Entry>& entries);
void write_samples_csv(std::ostream& out, const std::vector<Sample>& samples);
std::vector<Sample> read_samples_csv(std::istream& in);

}  // namespace neuropong::bench
