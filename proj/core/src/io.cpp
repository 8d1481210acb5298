#include "neuropong/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "neuropong/error.hpp"
#include "neuropong/random.hpp"
#include "neuropong/stats.hpp"

namespace neuropong::io {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
bool parse_number(const std::string& text, T& value) {
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  return res.ec == std::errc() && res.ptr == end;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void write_weights(std::ostream& out, const SynapseMatrix& w) {
  out << "# neuropong-weights rows=" << w.rows() << " cols=" << w.cols() << " levels=" << w.levels()
      << " w_min=" << format_double(w.w_min()) << " w_max=" << format_double(w.w_max()) << '\n';
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (j) out << ' ';
      if (w.continuous()) {
        out << format_double(w(i, j));
      } else {
        out << w.level_of(w(i, j));
      }
    }
    out << '\n';
  }
}

SynapseMatrix read_weights(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("weight snapshot is empty");
  header = strip_cr(header);
  std::istringstream hs(header);
  std::string hash, tag;
  hs >> hash >> tag;
  if (hash != "#" || tag != "neuropong-weights") throw FormatError("weight snapshot header missing");
  std::size_t rows = 0, cols = 0, levels = 0;
  double w_min = 0.0, w_max = 0.0;
  int seen = 0;
  for (std::string kv; hs >> kv;) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw FormatError("weight snapshot header field '" + kv + "' malformed");
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    bool ok = false;
    if (key == "rows") ok = parse_number(val, rows);
    else if (key == "cols") ok = parse_number(val, cols);
    else if (key == "levels") ok = parse_number(val, levels);
    else if (key == "w_min") ok = parse_number(val, w_min);
    else if (key == "w_max") ok = parse_number(val, w_max);
    if (!ok) throw FormatError("weight snapshot header field '" + kv + "' invalid");
    ++seen;
  }
  if (seen != 5) throw FormatError("weight snapshot header incomplete");

  SynapseMatrix w(rows, cols, w_min, w_max, levels);
  for (std::size_t i = 0; i < rows; ++i) {
    std::string line;
    if (!std::getline(in, line)) {
      throw FormatError("weight snapshot truncated after row " + std::to_string(i));
    }
    std::istringstream ls(strip_cr(line));
    std::vector<std::string> cells;
    for (std::string c; ls >> c;) cells.push_back(c);
    if (cells.size() != cols)
      throw FormatError("weight snapshot row " + std::to_string(i) + " has wrong width");
    for (std::size_t j = 0; j < cols; ++j) {
      if (w.continuous()) {
        double v = 0.0;
        if (!parse_number(cells[j], v)) throw FormatError("bad weight value in row " + std::to_string(i));
        w.set(i, j, v);
      } else {
        std::int64_t level = 0;
        if (!parse_number(cells[j], level) || level < 0 || level >= static_cast<std::int64_t>(levels)) {
          throw FormatError("bad weight level in row " + std::to_string(i));
        }
        w.set_raw(i, j, w.value_of_level(level));
      }
    }
  }
  return w;
}

RunRecord make_header_record(const ExperimentConfig& cfg, const Population& population) {
  RunRecord r;
  r.seed = cfg.seed;
  r.n_iterations = cfg.n_iterations;
  r.eval_every = cfg.eval_every;
  r.n_input = cfg.n_units();
  r.n_output = population.size();
  r.w_min = cfg.weights.w_min;
  r.w_max = cfg.weights.w_max;
  r.levels = cfg.weights.levels;
  for (const auto& p : population.params) r.excitability_gap_mv.push_back(p.v_thresh_mv - p.v_rest_mv);
  r.permutation_shuffles = cfg.permutation_shuffles;
  r.permutation_seed = derive_seed(cfg.seed, streams::kPermutation);
  return r;
}

RunRecord make_record(const ExperimentConfig& cfg, const ExperimentResult& result) {
  RunRecord r = make_header_record(cfg, result.population);
  r.initial_catch_fraction = result.metrics.initial_catch_fraction;
  r.catch_fraction_curve = result.metrics.catch_fraction_curve;
  r.logs = result.logs;
  r.final_weights = result.final_weights;
  return r;
}

void write_iteration_csv_header(std::ostream& out) { out << kIterationCsvHeader << '\n'; }

void write_iteration_csv_row(std::ostream& out, const IterationLog& log) {
  out << log.iteration << ',' << log.state << ',' << log.action << ',' << format_double(log.reward)
      << ',' << format_double(log.baseline) << ',' << format_double(log.wall_time_s) << '\n';
}

std::vector<IterationLog> read_iteration_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("iteration log is empty");
  if (strip_cr(line) != kIterationCsvHeader) throw FormatError("iteration log header does not match");
  std::vector<IterationLog> logs;
  auto fail = [&](const std::string& why) {
    std::string last = logs.empty() ? "none" : "iteration " + std::to_string(logs.back().iteration);
    throw FormatError("iteration log " + why + " after row " + std::to_string(logs.size()) +
                      " (last valid record: " + last + ")");
  };
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    IterationLog log;
    if (f.size() != 6 || !parse_number(f[0], log.iteration) || !parse_number(f[1], log.state) ||
        !parse_number(f[2], log.action) || !parse_number(f[3], log.reward) ||
        !parse_number(f[4], log.baseline) || !parse_number(f[5], log.wall_time_s)) {
      fail("malformed");
    }
    if (!logs.empty() && log.iteration <= logs.back().iteration) fail("out of order");
    logs.push_back(std::move(log));
  }
  if (logs.empty()) throw FormatError("iteration log has no records");
  return logs;
}

void NdjsonWriter::header(const RunRecord& r) {
  json j = {{"type", "header"},
            {"format", "neuropong-log"},
            {"version", 1},
            {"seed", r.seed},
            {"n_iterations", r.n_iterations},
            {"eval_every", r.eval_every},
            {"n_input", r.n_input},
            {"n_output", r.n_output},
            {"w_min", r.w_min},
            {"w_max", r.w_max},
            {"levels", r.levels},
            {"excitability_gap_mv", r.excitability_gap_mv},
            {"permutation_shuffles", r.permutation_shuffles},
            {"permutation_seed", r.permutation_seed}};
  out_ << j.dump() << '\n';
}

void NdjsonWriter::evaluation(const CurvePoint& p) {
  out_ << json{{"type", "evaluation"}, {"iteration", p.iteration}, {"catch_fraction", p.value}}.dump()
       << '\n';
}

void NdjsonWriter::iteration(const IterationLog& log) {
  json j = {{"type", "iteration"},          {"iteration", log.iteration},
            {"state", log.state},           {"action", log.action},
            {"reward", log.reward},         {"baseline", log.baseline},
            {"wall_time_s", log.wall_time_s}, {"weight_delta_norm", log.weight_delta_norm},
            {"rates_hz", log.rates_hz}};
  out_ << j.dump() << '\n';
  out_.flush();
}

void NdjsonWriter::final_weights(const SynapseMatrix& w) {
  json rows = json::array();
  for (std::size_t i = 0; i < w.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < w.cols(); ++j) {
      if (w.continuous()) row.push_back(w(i, j));
      else row.push_back(w.level_of(w(i, j)));
    }
    rows.push_back(std::move(row));
  }
  out_ << json{{"type", "final"}, {"weights", rows}}.dump() << '\n';
  out_.flush();
}

void write_ndjson(std::ostream& out, const RunRecord& r) {
  NdjsonWriter w(out);
  w.header(r);
  if (r.initial_catch_fraction) w.evaluation({0, *r.initial_catch_fraction});
  std::size_t next = 0;
  for (const auto& log : r.logs) {
    w.iteration(log);
    while (next < r.catch_fraction_curve.size() &&
           r.catch_fraction_curve[next].iteration == log.iteration + 1) {
      w.evaluation(r.catch_fraction_curve[next++]);
    }
  }
  if (r.final_weights) w.final_weights(*r.final_weights);
}

RunRecord read_ndjson(std::istream& in) {
  RunRecord r;
  bool have_header = false, have_final = false;
  std::size_t n_records = 0;
  std::string last_valid = "none";
  auto fail = [&](const std::string& why) {
    throw FormatError("log " + why + " after record " + std::to_string(n_records) +
                      " (last valid record: " + last_valid + ")");
  };

  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    if (have_final) fail("has data past the final record");
    json j;
    try {
      j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        if (have_header) fail("repeats its header");
        r.seed = j.at("seed").get<std::uint64_t>();
        r.n_iterations = j.at("n_iterations").get<std::size_t>();
        r.eval_every = j.at("eval_every").get<std::size_t>();
        r.n_input = j.at("n_input").get<std::size_t>();
        r.n_output = j.at("n_output").get<std::size_t>();
        r.w_min = j.at("w_min").get<double>();
        r.w_max = j.at("w_max").get<double>();
        r.levels = j.at("levels").get<std::size_t>();
        r.excitability_gap_mv = j.at("excitability_gap_mv").get<std::vector<double>>();
        r.permutation_shuffles = j.at("permutation_shuffles").get<int>();
        r.permutation_seed = j.at("permutation_seed").get<std::uint64_t>();
        have_header = true;
        last_valid = "header";
      } else if (!have_header) {
        fail("does not start with a header");
      } else if (type == "evaluation") {
        const CurvePoint p{j.at("iteration").get<std::size_t>(), j.at("catch_fraction").get<double>()};
        if (p.iteration == 0) r.initial_catch_fraction = p.value;
        else r.catch_fraction_curve.push_back(p);
        last_valid = "evaluation at iteration " + std::to_string(p.iteration);
      } else if (type == "iteration") {
        IterationLog log;
        log.iteration = j.at("iteration").get<std::size_t>();
        log.state = j.at("state").get<std::size_t>();
        log.action = j.at("action").get<std::size_t>();
        log.reward = j.at("reward").get<double>();
        log.baseline = j.at("baseline").get<double>();
        log.wall_time_s = j.at("wall_time_s").get<double>();
        log.weight_delta_norm = j.at("weight_delta_norm").get<double>();
        log.rates_hz = j.at("rates_hz").get<std::vector<double>>();
        if (log.iteration != r.logs.size()) fail("skips an iteration");
        r.logs.push_back(std::move(log));
        last_valid = "iteration " + std::to_string(r.logs.back().iteration);
      } else if (type == "final") {
        SynapseMatrix w(r.n_input, r.n_output, r.w_min, r.w_max, r.levels);
        const auto& rows = j.at("weights");
        if (rows.size() != r.n_input) fail("final weights have the wrong row count");
        for (std::size_t i = 0; i < r.n_input; ++i) {
          if (rows[i].size() != r.n_output) fail("final weights have the wrong column count");
          for (std::size_t k = 0; k < r.n_output; ++k) {
            if (w.continuous()) w.set(i, k, rows[i][k].get<double>());
            else w.set_raw(i, k, w.value_of_level(rows[i][k].get<std::int64_t>()));
          }
        }
        r.final_weights = std::move(w);
        have_final = true;
        last_valid = "final";
      } else {
        fail("has unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      fail(std::string("is malformed (") + e.what() + ")");
    }
    ++n_records;
  }
  if (n_records == 0) throw FormatError("log is empty");
  if (!have_final) fail("is truncated: no final record");
  if (r.logs.size() != r.n_iterations) fail("is truncated: iteration count mismatch");
  return r;
}

std::string render_catch_curve(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "iteration,catch_fraction\n";
  for (const auto& p : curve) out << p.iteration << ',' << format_double(p.value) << '\n';
  return out.str();
}

std::string render_mean_reward(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "iteration,mean_reward\n";
  for (const auto& p : curve) out << p.iteration << ',' << format_double(p.value) << '\n';
  return out.str();
}

std::string render_heatmap(const SynapseMatrix& w) {
  std::ostringstream out;
  out << "row,col,level\n";
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      out << i << ',' << j << ',';
      if (w.continuous()) out << format_double(w(i, j));
      else out << w.level_of(w(i, j));
      out << '\n';
    }
  }
  return out.str();
}

MetricsFiles render_metrics(const RunRecord& record) {
  if (!record.final_weights) throw FormatError("run record has no final weights");
  MetricsFiles files;
  files.catch_fraction_csv = render_catch_curve(record.catch_fraction_curve);
  files.mean_reward_csv =
      render_mean_reward(mean_reward_curve(record.logs, record.eval_every == 0 ? 1 : record.eval_every));
  files.heatmap_csv = render_heatmap(*record.final_weights);

  const SynapseMatrix& w = *record.final_weights;
  std::ostringstream s;
  s << "initial_catch_fraction="
    << (record.initial_catch_fraction ? format_double(*record.initial_catch_fraction) : "undefined") << '\n';
  s << "final_catch_fraction="
    << (record.catch_fraction_curve.empty() ? "undefined"
                                            : format_double(record.catch_fraction_curve.back().value))
    << '\n';
  s << "diagonal_dominance="
    << (w.rows() == w.cols() ? format_double(diagonal_dominance(w)) : "undefined") << '\n';
  std::string rho = "undefined", p = "undefined";
  if (w.rows() == w.cols() && record.excitability_gap_mv.size() == w.cols()) {
    std::vector<double> diag(w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) diag[j] = w(j, j);
    try {
      const auto perm = stats::spearman_permutation_test(record.excitability_gap_mv, diag,
                                                         record.permutation_shuffles,
                                                         record.permutation_seed);
      rho = format_double(perm.statistic);
      p = format_double(perm.p_value);
    } catch (const UndefinedCorrelationError&) {
    }
  }
  s << "weight_excitability_rho=" << rho << '\n';
  s << "weight_excitability_p=" << p << '\n';
  files.summary_txt = s.str();
  return files;
}

void write_metrics(const std::filesystem::path& dir, const RunRecord& record) {
  const MetricsFiles files = render_metrics(record);
  std::filesystem::create_directories(dir);
  write_file(dir / "catch_fraction.csv", files.catch_fraction_csv);
  write_file(dir / "mean_reward.csv", files.mean_reward_csv);
  write_file(dir / "summary.txt", files.summary_txt);
  write_file(dir / "weights_heatmap.csv", files.heatmap_csv);
}

void write_game_trace(std::ostream& out, const std::vector<GameState>& trace) {
  out << kGameTraceHeader << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& s = trace[k];
    out << k << ',' << format_double(s.ball_x) << ',' << format_double(s.ball_y) << ','
        << format_double(s.paddle_x) << ',' << format_double(s.paddle_target_x) << '\n';
  }
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace neuropong::io
