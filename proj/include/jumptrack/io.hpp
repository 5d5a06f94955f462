#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumptrack/metrics.hpp"
#include "jumptrack/simulator.hpp"
#include "jumptrack/types.hpp"

namespace jumptrack {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Small formatting / file helpers
// ---------------------------------------------------------------------------

/// Locale-independent shortest round-trip formatting.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Writes content to path atomically (temp file + rename).
inline void atomic_write(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline json vec2_to_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

inline Eigen::Vector2d vec2_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw IoError("expected a 2-element position");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json vecx_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Eigen::VectorXd vecx_from_json(const json& j) {
  if (!j.is_array()) throw IoError("expected an array feature");
  Eigen::VectorXd v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

inline json location_to_json(LocationId l) {
  if (is_unknown(l)) return "unknown";
  return l;
}

inline LocationId location_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "unknown") return kUnknownLocation;
    throw IoError("bad location value '" + j.get<std::string>() + "'");
  }
  return j.get<LocationId>();
}

inline std::vector<json> parse_json_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<json> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (records.empty()) throw IoError(path + ": empty file");
  return records;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset files (JSON lines: one header record, one record per round)
// ---------------------------------------------------------------------------

inline std::string dataset_to_jsonl(const Dataset& dataset) {
  std::ostringstream out;
  json header;
  header["type"] = "header";
  header["feature_dim"] = dataset.feature_dim;
  json locations = json::array();
  for (int l = 0; l < dataset.env.count(); ++l)
    locations.push_back({{"id", l}, {"area", dataset.env.areas[static_cast<std::size_t>(l)]}});
  header["locations"] = locations;
  json initial = json::array();
  for (const InitialTarget& t : dataset.initial_targets)
    initial.push_back({{"label", t.label},
                       {"location", t.location},
                       {"position", detail::vec2_to_json(t.position)},
                       {"feature", detail::vecx_to_json(t.feature)}});
  header["initial_targets"] = initial;
  out << header.dump() << '\n';

  for (const Round& r : dataset.rounds) {
    json rec;
    rec["type"] = "round";
    rec["time_step"] = r.time_step;
    rec["observed_location"] = r.observed;
    json ms = json::array();
    for (const Measurement& m : r.measurements) {
      json jm;
      jm["position"] = detail::vec2_to_json(m.position);
      jm["feature"] = detail::vecx_to_json(m.feature);
      if (m.label) jm["label"] = *m.label;
      ms.push_back(jm);
    }
    rec["measurements"] = ms;
    out << rec.dump() << '\n';
  }
  return out.str();
}

inline void write_dataset(const std::string& path, const Dataset& dataset) {
  atomic_write(path, dataset_to_jsonl(dataset));
}

inline Dataset read_dataset(const std::string& path) {
  const auto records = detail::parse_json_lines(path);
  if (records.front().value("type", "") != "header")
    throw IoError(path + ": first record must be the dataset header");

  Dataset dataset;
  const json& header = records.front();
  dataset.feature_dim = header.at("feature_dim").get<int>();
  for (const json& loc : header.at("locations"))
    dataset.env.areas.push_back(loc.at("area").get<double>());
  for (const json& jt : header.at("initial_targets")) {
    InitialTarget t;
    t.label = jt.at("label").get<int>();
    t.location = jt.at("location").get<LocationId>();
    t.position = detail::vec2_from_json(jt.at("position"));
    t.feature = detail::vecx_from_json(jt.at("feature"));
    dataset.initial_targets.push_back(std::move(t));
  }

  for (std::size_t i = 1; i < records.size(); ++i) {
    const json& rec = records[i];
    if (rec.value("type", "") != "round")
      throw IoError(path + ": unexpected record type '" + rec.value("type", "") + "'");
    Round r;
    r.time_step = rec.at("time_step").get<int>();
    r.observed = rec.at("observed_location").get<LocationId>();
    for (const json& jm : rec.at("measurements")) {
      Measurement m;
      m.position = detail::vec2_from_json(jm.at("position"));
      m.feature = detail::vecx_from_json(jm.at("feature"));
      m.location = r.observed;
      m.time_step = r.time_step;
      if (jm.contains("label")) m.label = jm.at("label").get<int>();
      r.measurements.push_back(std::move(m));
    }
    dataset.rounds.push_back(std::move(r));
  }
  try {
    dataset.validate();
  } catch (const ConfigError& e) {
    throw IoError(path + ": " + e.what());
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Ground truth files
// ---------------------------------------------------------------------------

inline std::string truth_to_jsonl(const GroundTruth& truth) {
  std::ostringstream out;
  json header;
  header["type"] = "truth_header";
  header["labels"] = truth.labels;
  out << header.dump() << '\n';
  for (std::size_t k = 0; k < truth.rounds.size(); ++k) {
    json rec;
    rec["type"] = "truth_round";
    rec["time_step"] = truth.time_steps[k];
    rec["observed_location"] = truth.observed[k];
    json ts = json::array();
    for (std::size_t j = 0; j < truth.rounds[k].size(); ++j) {
      const TruthEntry& e = truth.rounds[k][j];
      json jt;
      jt["label"] = truth.labels[j];
      jt["location"] = e.location;
      jt["position"] = detail::vec2_to_json(e.position);
      jt["detected"] = e.detected;
      if (e.detected) {
        jt["measurement"] = e.measurement;
        jt["measured_position"] = detail::vec2_to_json(e.measured_position);
      }
      ts.push_back(jt);
    }
    rec["targets"] = ts;
    out << rec.dump() << '\n';
  }
  return out.str();
}

inline void write_truth(const std::string& path, const GroundTruth& truth) {
  atomic_write(path, truth_to_jsonl(truth));
}

inline GroundTruth read_truth(const std::string& path) {
  const auto records = detail::parse_json_lines(path);
  if (records.front().value("type", "") != "truth_header")
    throw IoError(path + ": first record must be the truth header");
  GroundTruth truth;
  truth.labels = records.front().at("labels").get<std::vector<int>>();
  for (std::size_t i = 1; i < records.size(); ++i) {
    const json& rec = records[i];
    if (rec.value("type", "") != "truth_round")
      throw IoError(path + ": unexpected record type");
    truth.time_steps.push_back(rec.at("time_step").get<int>());
    truth.observed.push_back(rec.at("observed_location").get<LocationId>());
    std::vector<TruthEntry> entries;
    for (const json& jt : rec.at("targets")) {
      TruthEntry e;
      e.location = jt.at("location").get<LocationId>();
      e.position = detail::vec2_from_json(jt.at("position"));
      e.detected = jt.at("detected").get<bool>();
      if (e.detected) {
        e.measurement = jt.at("measurement").get<int>();
        e.measured_position = detail::vec2_from_json(jt.at("measured_position"));
      }
      entries.push_back(e);
    }
    truth.rounds.push_back(std::move(entries));
  }
  return truth;
}

// ---------------------------------------------------------------------------
// Track files
// ---------------------------------------------------------------------------

struct TrackTarget {
  int label = 0;
  LocationId map_location = kUnknownLocation;
  std::optional<Eigen::Vector2d> estimate;
  std::map<LocationId, double> location_marginal;
};

struct TrackRound {
  int time_step = 0;
  LocationId observed = 0;
  std::vector<TrackTarget> targets;
};

struct TrackFile {
  std::vector<int> labels;
  std::string sampler_mode;
  std::vector<TrackRound> rounds;
};

inline std::string track_to_jsonl(const TrackFile& track) {
  std::ostringstream out;
  json header;
  header["type"] = "track_header";
  header["labels"] = track.labels;
  header["sampler_mode"] = track.sampler_mode;
  out << header.dump() << '\n';
  for (const TrackRound& r : track.rounds) {
    json rec;
    rec["type"] = "track_round";
    rec["time_step"] = r.time_step;
    rec["observed_location"] = r.observed;
    json ts = json::array();
    for (const TrackTarget& t : r.targets) {
      json jt;
      jt["label"] = t.label;
      jt["map_location"] = detail::location_to_json(t.map_location);
      jt["estimate"] = t.estimate ? detail::vec2_to_json(*t.estimate) : json();
      json marg = json::object();
      for (const auto& [loc, p] : t.location_marginal)
        marg[is_unknown(loc) ? "unknown" : std::to_string(loc)] = p;
      jt["location_marginal"] = marg;
      ts.push_back(jt);
    }
    rec["targets"] = ts;
    out << rec.dump() << '\n';
  }
  return out.str();
}

inline void write_track(const std::string& path, const TrackFile& track) {
  atomic_write(path, track_to_jsonl(track));
}

inline TrackFile read_track(const std::string& path) {
  const auto records = detail::parse_json_lines(path);
  if (records.front().value("type", "") != "track_header")
    throw IoError(path + ": first record must be the track header");
  TrackFile track;
  track.labels = records.front().at("labels").get<std::vector<int>>();
  track.sampler_mode = records.front().value("sampler_mode", "");
  for (std::size_t i = 1; i < records.size(); ++i) {
    const json& rec = records[i];
    if (rec.value("type", "") != "track_round")
      throw IoError(path + ": unexpected record type");
    TrackRound r;
    r.time_step = rec.at("time_step").get<int>();
    r.observed = rec.at("observed_location").get<LocationId>();
    for (const json& jt : rec.at("targets")) {
      TrackTarget t;
      t.label = jt.at("label").get<int>();
      t.map_location = detail::location_from_json(jt.at("map_location"));
      if (!jt.at("estimate").is_null())
        t.estimate = detail::vec2_from_json(jt.at("estimate"));
      for (const auto& [key, val] : jt.at("location_marginal").items()) {
        const LocationId loc =
            key == "unknown" ? kUnknownLocation : static_cast<LocationId>(std::stoi(key));
        t.location_marginal[loc] = val.get<double>();
      }
      r.targets.push_back(std::move(t));
    }
    track.rounds.push_back(std::move(r));
  }
  return track;
}

/// Frames the evaluator scores: per round, the estimates of targets whose
/// MAP location is the observed one.
inline std::vector<Frame> track_frames(const TrackFile& track) {
  std::vector<Frame> frames;
  frames.reserve(track.rounds.size());
  for (const TrackRound& r : track.rounds) {
    Frame f;
    f.time_step = r.time_step;
    for (const TrackTarget& t : r.targets)
      if (t.map_location == r.observed && t.estimate)
        f.points.push_back({t.label, *t.estimate});
    frames.push_back(std::move(f));
  }
  return frames;
}

// ---------------------------------------------------------------------------
// MOT reports
// ---------------------------------------------------------------------------

inline std::string report_to_json(const MotReport& report) {
  json j;
  j["mota"] = report.mota;
  j["motp_m"] = report.motp_m;
  j["miss_rate"] = report.miss_rate;
  j["false_positive_rate"] = report.false_positive_rate;
  j["mismatch_rate"] = report.mismatch_rate;
  j["total_ground_truth"] = report.total_ground_truth;
  json frames = json::array();
  for (const FrameCounts& f : report.frames)
    frames.push_back({{"time_step", f.time_step},
                      {"matches", f.matches},
                      {"misses", f.misses},
                      {"false_positives", f.false_positives},
                      {"mismatches", f.mismatches},
                      {"distance_sum", f.distance_sum}});
  j["frames"] = frames;
  return j.dump(2) + "\n";
}

inline void write_report_json(const std::string& path, const MotReport& report) {
  atomic_write(path, report_to_json(report));
}

inline MotReport read_report_json(const std::string& path) {
  const json j = json::parse(read_file(path));
  MotReport r;
  r.mota = j.at("mota").get<double>();
  r.motp_m = j.at("motp_m").get<double>();
  r.miss_rate = j.at("miss_rate").get<double>();
  r.false_positive_rate = j.at("false_positive_rate").get<double>();
  r.mismatch_rate = j.at("mismatch_rate").get<double>();
  r.total_ground_truth = j.at("total_ground_truth").get<long>();
  for (const json& jf : j.at("frames")) {
    FrameCounts f;
    f.time_step = jf.at("time_step").get<int>();
    f.matches = jf.at("matches").get<int>();
    f.misses = jf.at("misses").get<int>();
    f.false_positives = jf.at("false_positives").get<int>();
    f.mismatches = jf.at("mismatches").get<int>();
    f.distance_sum = jf.at("distance_sum").get<double>();
    r.frames.push_back(f);
  }
  return r;
}

inline std::string report_to_csv(const MotReport& report) {
  std::ostringstream out;
  out << "mota,motp_m,miss_rate,false_positive_rate,mismatch_rate,total_ground_truth\n";
  out << format_double(report.mota) << ',' << format_double(report.motp_m) << ','
      << format_double(report.miss_rate) << ',' << format_double(report.false_positive_rate)
      << ',' << format_double(report.mismatch_rate) << ',' << report.total_ground_truth
      << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Plain key = value configuration files
// ---------------------------------------------------------------------------

namespace detail {

struct KeyValueLine {
  std::string key;
  std::string value;
  int line_no;
};

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<KeyValueLine> parse_key_values(const std::string& text,
                                                  const std::string& origin) {
  std::vector<KeyValueLine> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    entries.push_back({key, value, line_no});
  }
  return entries;
}

inline double parse_double(const KeyValueLine& kv, const std::string& origin) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin + ":" + std::to_string(kv.line_no) +
                      ": bad numeric value for '" + kv.key + "'");
  }
}

inline long long parse_int(const KeyValueLine& kv, const std::string& origin) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin + ":" + std::to_string(kv.line_no) +
                      ": bad integer value for '" + kv.key + "'");
  }
}

inline std::vector<double> parse_double_list(const KeyValueLine& kv,
                                             const std::string& origin) {
  std::vector<double> values;
  std::istringstream in(kv.value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(origin + ":" + std::to_string(kv.line_no) +
                        ": bad list value for '" + kv.key + "'");
    }
  }
  if (values.empty())
    throw ConfigError(origin + ":" + std::to_string(kv.line_no) +
                      ": empty list for '" + kv.key + "'");
  return values;
}

}  // namespace detail

/// Tracker run configuration: every filter parameter plus file paths. The
/// feature measurement covariance is given as a diagonal; a single value
/// means isotropic and is broadcast to the dataset's feature dimension.
struct RunConfig {
  std::string dataset;
  std::string track_out = "track.jsonl";
  std::string summary_out;
  double p_jump = 0.03;
  double p_meas = 0.98;
  double sigma_q = 0.35;
  double sigma_r = 0.15;
  std::vector<double> feature_meas_diag = {0.25};
  double feature_support = 5.0;
  int num_particles = 300;
  SamplerMode sampler_mode = SamplerMode::kRejection;
  int gibbs_burn_in = 100;
  int gibbs_z_samples = 100;
  double resample_ess_fraction = 0.5;
  std::uint64_t rng_seed = 1;

  FilterParams resolve(int feature_dim) const {
    FilterParams p;
    p.p_jump = p_jump;
    p.p_meas = p_meas;
    p.sigma_q = sigma_q;
    p.sigma_r = sigma_r;
    if (feature_meas_diag.size() == 1) {
      p.feature_meas_cov =
          feature_meas_diag[0] * Eigen::MatrixXd::Identity(feature_dim, feature_dim);
    } else {
      if (static_cast<int>(feature_meas_diag.size()) != feature_dim)
        throw ConfigError("feature_meas_diag length does not match dataset feature_dim");
      p.feature_meas_cov = Eigen::MatrixXd::Zero(feature_dim, feature_dim);
      for (int d = 0; d < feature_dim; ++d)
        p.feature_meas_cov(d, d) = feature_meas_diag[static_cast<std::size_t>(d)];
    }
    p.feature_support = feature_support;
    p.num_particles = num_particles;
    p.sampler_mode = sampler_mode;
    p.gibbs_burn_in = gibbs_burn_in;
    p.gibbs_z_samples = gibbs_z_samples;
    p.resample_ess_fraction = resample_ess_fraction;
    p.rng_seed = rng_seed;
    p.validate();
    return p;
  }
};

inline RunConfig parse_run_config(const std::string& text,
                                  const std::string& origin = "<config>") {
  RunConfig cfg;
  for (const auto& kv : detail::parse_key_values(text, origin)) {
    if (kv.key == "dataset") cfg.dataset = kv.value;
    else if (kv.key == "track_out") cfg.track_out = kv.value;
    else if (kv.key == "summary_out") cfg.summary_out = kv.value;
    else if (kv.key == "p_jump") cfg.p_jump = detail::parse_double(kv, origin);
    else if (kv.key == "p_meas") cfg.p_meas = detail::parse_double(kv, origin);
    else if (kv.key == "sigma_q") cfg.sigma_q = detail::parse_double(kv, origin);
    else if (kv.key == "sigma_r") cfg.sigma_r = detail::parse_double(kv, origin);
    else if (kv.key == "feature_meas_diag")
      cfg.feature_meas_diag = detail::parse_double_list(kv, origin);
    else if (kv.key == "feature_support")
      cfg.feature_support = detail::parse_double(kv, origin);
    else if (kv.key == "num_particles")
      cfg.num_particles = static_cast<int>(detail::parse_int(kv, origin));
    else if (kv.key == "sampler_mode") cfg.sampler_mode = sampler_mode_from_string(kv.value);
    else if (kv.key == "gibbs_burn_in")
      cfg.gibbs_burn_in = static_cast<int>(detail::parse_int(kv, origin));
    else if (kv.key == "gibbs_z_samples")
      cfg.gibbs_z_samples = static_cast<int>(detail::parse_int(kv, origin));
    else if (kv.key == "resample_ess_fraction")
      cfg.resample_ess_fraction = detail::parse_double(kv, origin);
    else if (kv.key == "rng_seed")
      cfg.rng_seed = static_cast<std::uint64_t>(detail::parse_int(kv, origin));
    else
      throw ConfigError(origin + ":" + std::to_string(kv.line_no) +
                        ": unknown key '" + kv.key + "'");
  }
  return cfg;
}

inline std::string write_run_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "dataset = " << cfg.dataset << '\n';
  out << "track_out = " << cfg.track_out << '\n';
  if (!cfg.summary_out.empty()) out << "summary_out = " << cfg.summary_out << '\n';
  out << "p_jump = " << format_double(cfg.p_jump) << '\n';
  out << "p_meas = " << format_double(cfg.p_meas) << '\n';
  out << "sigma_q = " << format_double(cfg.sigma_q) << '\n';
  out << "sigma_r = " << format_double(cfg.sigma_r) << '\n';
  out << "feature_meas_diag = ";
  for (std::size_t i = 0; i < cfg.feature_meas_diag.size(); ++i)
    out << (i ? "," : "") << format_double(cfg.feature_meas_diag[i]);
  out << '\n';
  out << "feature_support = " << format_double(cfg.feature_support) << '\n';
  out << "num_particles = " << cfg.num_particles << '\n';
  out << "sampler_mode = " << to_string(cfg.sampler_mode) << '\n';
  out << "gibbs_burn_in = " << cfg.gibbs_burn_in << '\n';
  out << "gibbs_z_samples = " << cfg.gibbs_z_samples << '\n';
  out << "resample_ess_fraction = " << format_double(cfg.resample_ess_fraction) << '\n';
  out << "rng_seed = " << cfg.rng_seed << '\n';
  return out.str();
}

/// Simulation configuration file: the scenario parameters plus output paths.
struct SimConfigFile {
  SimConfig sim;
  std::string dataset_out = "dataset.jsonl";
  std::string truth_out = "truth.jsonl";
};

inline SimConfigFile parse_sim_config(const std::string& text,
                                      const std::string& origin = "<config>") {
  SimConfigFile cfg;
  for (const auto& kv : detail::parse_key_values(text, origin)) {
    if (kv.key == "dataset_out") cfg.dataset_out = kv.value;
    else if (kv.key == "truth_out") cfg.truth_out = kv.value;
    else if (kv.key == "n_locations")
      cfg.sim.n_locations = static_cast<int>(detail::parse_int(kv, origin));
    else if (kv.key == "n_targets")
      cfg.sim.n_targets = static_cast<int>(detail::parse_int(kv, origin));
    else if (kv.key == "n_rounds")
      cfg.sim.n_rounds = static_cast<int>(detail::parse_int(kv, origin));
    else if (kv.key == "true_p_jump") cfg.sim.true_p_jump = detail::parse_double(kv, origin);
    else if (kv.key == "true_p_meas") cfg.sim.true_p_meas = detail::parse_double(kv, origin);
    else if (kv.key == "sigma_q_true") cfg.sim.sigma_q_true = detail::parse_double(kv, origin);
    else if (kv.key == "sigma_r_true") cfg.sim.sigma_r_true = detail::parse_double(kv, origin);
    else if (kv.key == "clutter_rate") cfg.sim.clutter_rate = detail::parse_double(kv, origin);
    else if (kv.key == "feature_dim")
      cfg.sim.feature_dim = static_cast<int>(detail::parse_int(kv, origin));
    else if (kv.key == "feature_cluster_spread")
      cfg.sim.feature_cluster_spread = detail::parse_double(kv, origin);
    else if (kv.key == "location_side_m")
      cfg.sim.location_side_m = detail::parse_double(kv, origin);
    else if (kv.key == "rng_seed")
      cfg.sim.rng_seed = static_cast<std::uint64_t>(detail::parse_int(kv, origin));
    else
      throw ConfigError(origin + ":" + std::to_string(kv.line_no) +
                        ": unknown key '" + kv.key + "'");
  }
  return cfg;
}

inline std::string write_sim_config(const SimConfigFile& cfg) {
  std::ostringstream out;
  out << "dataset_out = " << cfg.dataset_out << '\n';
  out << "truth_out = " << cfg.truth_out << '\n';
  out << "n_locations = " << cfg.sim.n_locations << '\n';
  out << "n_targets = " << cfg.sim.n_targets << '\n';
  out << "n_rounds = " << cfg.sim.n_rounds << '\n';
  out << "true_p_jump = " << format_double(cfg.sim.true_p_jump) << '\n';
  out << "true_p_meas = " << format_double(cfg.sim.true_p_meas) << '\n';
  out << "sigma_q_true = " << format_double(cfg.sim.sigma_q_true) << '\n';
  out << "sigma_r_true = " << format_double(cfg.sim.sigma_r_true) << '\n';
  out << "clutter_rate = " << format_double(cfg.sim.clutter_rate) << '\n';
  out << "feature_dim = " << cfg.sim.feature_dim << '\n';
  out << "feature_cluster_spread = " << format_double(cfg.sim.feature_cluster_spread) << '\n';
  out << "location_side_m = " << format_double(cfg.sim.location_side_m) << '\n';
  out << "rng_seed = " << cfg.sim.rng_seed << '\n';
  return out.str();
}

}  // namespace jumptrack
