#include <gtest/gtest.h>

#include <sstream>

#include "neuropong/error.hpp"
#include "neuropong/io.hpp"

using namespace neuropong;

namespace {

const ExperimentResult& small_run() {
  static const ExperimentResult r = [] {
    ExperimentConfig cfg;
    cfg.n_iterations = 150;
    cfg.eval_every = 50;
    cfg.eval_repeats = 1;
    cfg.noise.fixed_pattern_sigma = 0.1;
    return run_experiment(cfg);
  }();
  return r;
}

ExperimentConfig small_cfg() {
  ExperimentConfig cfg;
  cfg.n_iterations = 150;
  cfg.eval_every = 50;
  cfg.eval_repeats = 1;
  cfg.noise.fixed_pattern_sigma = 0.1;
  return cfg;
}

std::string ndjson_of(const io::RunRecord& rec) {
  std::ostringstream out;
  io::write_ndjson(out, rec);
  return out.str();
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(0.0), "0");
  EXPECT_EQ(io::format_double(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(std::stod(io::format_double(2.0 / 7.0)), 2.0 / 7.0);
}

TEST(Weights, RoundTrip) {
  const auto& w = small_run().final_weights;
  std::stringstream s;
  io::write_weights(s, w);
  EXPECT_EQ(io::read_weights(s), w);
}

TEST(Weights, ContinuousRoundTrip) {
  SynapseMatrix w(2, 3, -1.0, 1.0, SynapseMatrix::kContinuous);
  w.set(0, 1, 0.123456789);
  w.set(1, 2, -0.7);
  std::stringstream s;
  io::write_weights(s, w);
  EXPECT_EQ(io::read_weights(s), w);
}

TEST(Weights, TruncatedInputRejected) {
  std::stringstream s;
  io::write_weights(s, small_run().final_weights);
  const std::string text = s.str();
  std::istringstream cut(text.substr(0, text.size() / 2));
  EXPECT_THROW(io::read_weights(cut), FormatError);
  std::istringstream bad("# something else\n1 2\n");
  EXPECT_THROW(io::read_weights(bad), FormatError);
}

TEST(IterationCsv, RoundTripWithoutRates) {
  std::stringstream s;
  io::write_iteration_csv_header(s);
  for (const auto& log : small_run().logs) io::write_iteration_csv_row(s, log);
  const auto back = io::read_iteration_csv(s);
  ASSERT_EQ(back.size(), small_run().logs.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].iteration, small_run().logs[k].iteration);
    EXPECT_EQ(back[k].reward, small_run().logs[k].reward);
    EXPECT_EQ(back[k].baseline, small_run().logs[k].baseline);
  }
}

TEST(IterationCsv, MalformedRowNamesLastValid) {
  std::istringstream in(std::string(io::kIterationCsvHeader) + "\n0,1,1,1,0.5,0\n1,2,x,0,0.5,0\n");
  try {
    io::read_iteration_csv(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("last valid"), std::string::npos) << e.what();
  }
}

TEST(Ndjson, RoundTripReproducesMetrics) {
  const auto rec = io::make_record(small_cfg(), small_run());
  const std::string text = ndjson_of(rec);
  std::istringstream in(text);
  const auto back = io::read_ndjson(in);
  EXPECT_EQ(back.logs, rec.logs);
  EXPECT_EQ(back.catch_fraction_curve, rec.catch_fraction_curve);
  EXPECT_EQ(back.final_weights, rec.final_weights);
  EXPECT_EQ(back.excitability_gap_mv, rec.excitability_gap_mv);
  EXPECT_EQ(ndjson_of(back), text);
  const auto a = io::render_metrics(rec), b = io::render_metrics(back);
  EXPECT_EQ(a.catch_fraction_csv, b.catch_fraction_csv);
  EXPECT_EQ(a.mean_reward_csv, b.mean_reward_csv);
  EXPECT_EQ(a.summary_txt, b.summary_txt);
  EXPECT_EQ(a.heatmap_csv, b.heatmap_csv);
}

TEST(Ndjson, StreamingWriterMatchesBatchWriter) {
  const auto cfg = small_cfg();
  std::ostringstream live;
  io::NdjsonWriter w(live);
  ExperimentObserver obs;
  obs.on_start = [&](const neuropong::Setup& s) { w.header(io::make_header_record(cfg, s.population)); };
  obs.on_iteration = [&](const IterationLog& l) { w.iteration(l); };
  obs.on_evaluation = [&](const CurvePoint& p) { w.evaluation(p); };
  const auto r = run_experiment(cfg, obs);
  w.final_weights(r.final_weights);
  EXPECT_EQ(live.str(), ndjson_of(io::make_record(cfg, r)));
}

TEST(Ndjson, TruncationDetected) {
  const std::string text = ndjson_of(io::make_record(small_cfg(), small_run()));
  // Drop the final record, then cut a record in half.
  const auto last_line = text.rfind('\n', text.size() - 2);
  for (const std::string& cut : {text.substr(0, last_line + 1), text.substr(0, text.size() / 2), std::string()}) {
    std::istringstream in(cut);
    EXPECT_THROW(io::read_ndjson(in), FormatError);
  }
}

TEST(Ndjson, SkippedIterationDetected) {
  const std::string text = ndjson_of(io::make_record(small_cfg(), small_run()));
  const auto pos = text.find("\"iteration\":5,");
  ASSERT_NE(pos, std::string::npos);
  const auto begin = text.rfind('\n', pos) + 1;
  const auto end = text.find('\n', pos) + 1;
  std::istringstream in(text.substr(0, begin) + text.substr(end));
  try {
    io::read_ndjson(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("last valid record"), std::string::npos) << e.what();
  }
}

TEST(Metrics, SummaryKeys) {
  const auto files = io::render_metrics(io::make_record(small_cfg(), small_run()));
  for (const char* key : {"initial_catch_fraction=", "final_catch_fraction=", "diagonal_dominance=",
                          "weight_excitability_rho=", "weight_excitability_p="}) {
    EXPECT_NE(files.summary_txt.find(key), std::string::npos) << key;
  }
  std::string want = "iteration,catch_fraction\n";
  for (const auto& p : small_run().metrics.catch_fraction_curve)
    want += std::to_string(p.iteration) + "," + io::format_double(p.value) + "\n";
  EXPECT_EQ(files.catch_fraction_csv, want);
  EXPECT_EQ(files.heatmap_csv.rfind("row,col,level\n", 0), 0u);
}

TEST(GameTrace, Header) {
  std::ostringstream out;
  io::write_game_trace(out, {GameState{}});
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), io::kGameTraceHeader);
}
