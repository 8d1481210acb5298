#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "neuropong/experiment.hpp"
#include "neuropong/synapse_matrix.hpp"

namespace neuropong::io {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// ---- weight snapshots -----------------------------------------------------
// Header line followed by one row per input unit:
//   # neuropong-weights rows=R cols=C levels=L w_min=A w_max=B
//   l00 l01 ...
// Quantized matrices store integer level indices; continuous matrices
// (levels=0) store weight values.
void write_weights(std::ostream& out, const SynapseMatrix& w);
SynapseMatrix read_weights(std::istream& in);

// ---- run record -----------------------------------------------------------
// Everything the metrics files are derived from. A run and a replay of its
// NDJSON log build the same record and therefore the same files.
struct RunRecord {
  std::uint64_t seed = 0;
  std::size_t n_iterations = 0;
  std::size_t eval_every = 0;
  std::size_t n_input = 0;
  std::size_t n_output = 0;
  double w_min = 0.0;
  double w_max = 0.0;
  std::size_t levels = 0;
  std::vector<double> excitability_gap_mv;  // v_thresh - v_rest per neuron
  int permutation_shuffles = 0;
  std::uint64_t permutation_seed = 0;

  std::optional<double> initial_catch_fraction;
  std::vector<CurvePoint> catch_fraction_curve;
  std::vector<IterationLog> logs;
  std::optional<SynapseMatrix> final_weights;
};

// Header fields only; available before the first iteration.
RunRecord make_header_record(const ExperimentConfig& cfg, const Population& population);
RunRecord make_record(const ExperimentConfig& cfg, const ExperimentResult& result);

// ---- iteration logs -------------------------------------------------------
inline constexpr const char* kIterationCsvHeader = "iteration,state,action,reward,baseline,wall_time_s";

void write_iteration_csv_header(std::ostream& out);
void write_iteration_csv_row(std::ostream& out, const IterationLog& log);
// Throws FormatError naming the last valid row on malformed input.
std::vector<IterationLog> read_iteration_csv(std::istream& in);

// NDJSON stream: header, evaluation, iteration and final records, one JSON
// object per line.
class NdjsonWriter {
 public:
  explicit NdjsonWriter(std::ostream& out) : out_(out) {}
  void header(const RunRecord& record);
  void evaluation(const CurvePoint& point);
  void iteration(const IterationLog& log);
  void final_weights(const SynapseMatrix& w);

 private:
  std::ostream& out_;
};

// Writes a complete record in the order a live run streams it: header,
// initial evaluation, then iterations with each evaluation after the
// iteration that triggered it, then the final weights.
void write_ndjson(std::ostream& out, const RunRecord& record);

// Throws FormatError naming the last valid record if the stream is empty,
// malformed or lacks the final record.
RunRecord read_ndjson(std::istream& in);

// ---- metrics --------------------------------------------------------------
struct MetricsFiles {
  std::string catch_fraction_csv;
  std::string mean_reward_csv;
  std::string summary_txt;
  std::string heatmap_csv;
};

MetricsFiles render_metrics(const RunRecord& record);
// Writes catch_fraction.csv, mean_reward.csv, summary.txt, weights_heatmap.csv.
void write_metrics(const std::filesystem::path& dir, const RunRecord& record);

std::string render_catch_curve(const std::vector<CurvePoint>& curve);
std::string render_mean_reward(const std::vector<CurvePoint>& curve);
std::string render_heatmap(const SynapseMatrix& w);

// ---- game traces ----------------------------------------------------------
inline constexpr const char* kGameTraceHeader = "step,ball_x,ball_y,paddle_x,target_x";
void write_game_trace(std::ostream& out, const std::vector<GameState>& trace);

// Reads a whole file; throws FormatError if it cannot be opened.
std::string slurp(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace neuropong::io
