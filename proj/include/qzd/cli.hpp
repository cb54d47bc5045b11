#pragma once

// Command implementations behind the qzd executable: configuration parsing,
// result serialization (CSV and JSON), and the parallel parameter sweep.

#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qzd/protocols.hpp"

namespace qzd::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// 12 significant digits, locale independent.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  if (ec != std::errc{}) throw NumericalFailure("format_number: conversion failed");
  return {buf, end};
}

inline double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
  return v;
}

struct Axis {
  std::string name;
  double start{0.0};
  double stop{0.0};
  int count{2};
  bool log{false};

  std::vector<double> values() const {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
      const double f = static_cast<double>(i) / (count - 1);
      out.push_back(log ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                        : start + f * (stop - start));
    }
    out.back() = stop;
    return out;
  }

  std::string to_text() const {
    return name + ":" + (log ? "log" : "lin") + ":" + format_number(start) + ":" + format_number(stop) + ":" +
           std::to_string(count);
  }

  friend bool operator==(const Axis&, const Axis&) = default;
};

inline const std::vector<std::string>& axis_names() {
  static const std::vector<std::string> names{"g", "lambda", "omega1", "omega2", "omega3", "drive", "g_over_lambda"};
  return names;
}

// name:lin|log:start:stop:count
inline Axis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 5) throw ConfigError("axis '" + text + "' must look like name:lin|log:start:stop:count");
  Axis a;
  a.name = parts[0];
  if (std::find(axis_names().begin(), axis_names().end(), a.name) == axis_names().end())
    throw ConfigError("unknown sweep axis '" + a.name + "'");
  if (parts[1] != "lin" && parts[1] != "log") throw ConfigError("axis scale must be lin or log");
  a.log = parts[1] == "log";
  a.start = parse_double("axis start", parts[2]);
  a.stop = parse_double("axis stop", parts[3]);
  a.count = parse_int("axis count", parts[4]);
  if (a.count < 2) throw ConfigError("axis '" + a.name + "' needs count >= 2");
  if (a.log && !(a.start > 0.0 && a.stop > 0.0)) throw ConfigError("log axis '" + a.name + "' needs positive endpoints");
  return a;
}

struct RunConfig {
  std::string command;
  UniformParams params{1.0, 0.01, 0.0, 0.0, 1.0};
  Branch branch{Branch::Left};
  ProtocolName protocol{ProtocolName::StateTransfer};
  Engine engine{Engine::Effective};
  int k{1};
  std::optional<Reduction> reduction;
  int outcome{0};
  std::vector<Axis> axes;
  std::vector<double> taus;
  std::string output;
  std::string format{"csv"};
  int workers{1};

  ProtocolSpec protocol_spec() const {
    return {protocol, branch, params, k, engine, reduction, outcome};
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

using KeyValues = std::map<std::string, std::string>;
// Section name -> keys; "" holds the keys before the first section header.
using ConfigSections = std::map<std::string, KeyValues>;

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Flat key = value text with optional [section] headers and # comments.
inline ConfigSections parse_config_text(const std::string& text) {
  ConfigSections out;
  std::string section;
  out[section];
  std::stringstream ss(text);
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline ConfigSections read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

template <typename E>
E parse_enum(const std::string& key, const std::string& text, const std::vector<std::pair<std::string, E>>& table) {
  for (const auto& [name, value] : table)
    if (name == text) return value;
  std::string options;
  for (const auto& [name, value] : table) options += (options.empty() ? "" : ", ") + name;
  throw ConfigError("'" + key + "' must be one of: " + options + " (got '" + text + "')");
}

inline ProtocolName parse_protocol(const std::string& text) {
  return parse_enum<ProtocolName>("protocol", text,
                                  {{"state_transfer", ProtocolName::StateTransfer},
                                   {"three_dim", ProtocolName::ThreeDimEntangle},
                                   {"bell", ProtocolName::BellState},
                                   {"swap", ProtocolName::Swap},
                                   {"ghz", ProtocolName::GHZ},
                                   {"six_dim", ProtocolName::SixDim}});
}

inline Branch parse_branch(const std::string& text) {
  return parse_enum<Branch>("branch", text,
                            {{"left", Branch::Left}, {"right", Branch::Right}, {"combined", Branch::Combined}});
}

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"g",     "lambda", "omega1",    "omega2",  "omega3", "branch",
                                             "protocol", "engine", "k",      "interpretation", "outcome", "axis1",
                                             "axis2", "taus",   "output",    "format",  "workers"};
  return keys;
}

// Applies keys in order: global section, the section named after the selected
// protocol, then `overrides` (command-line flags).
inline RunConfig resolve_config(const std::string& command, const ConfigSections& sections,
                                const KeyValues& overrides) {
  KeyValues kv;
  if (auto it = sections.find(""); it != sections.end()) kv = it->second;
  std::string protocol = kv.count("protocol") ? kv["protocol"] : "state_transfer";
  if (auto it = overrides.find("protocol"); it != overrides.end()) protocol = it->second;
  if (auto it = sections.find(protocol); it != sections.end())
    for (const auto& [k, v] : it->second) kv[k] = v;
  for (const auto& [k, v] : overrides) kv[k] = v;

  for (const auto& [k, v] : kv)
    if (std::find(config_keys().begin(), config_keys().end(), k) == config_keys().end())
      throw ConfigError("unknown config key '" + k + "'");

  RunConfig cfg;
  cfg.command = command;
  auto num = [&](const char* key, double& dst) {
    if (auto it = kv.find(key); it != kv.end()) dst = parse_double(key, it->second);
  };
  num("g", cfg.params.g);
  num("lambda", cfg.params.lambda);
  num("omega1", cfg.params.omega1);
  num("omega2", cfg.params.omega2);
  num("omega3", cfg.params.omega3);
  if (kv.count("branch")) cfg.branch = parse_branch(kv["branch"]);
  cfg.protocol = parse_protocol(protocol);
  if (kv.count("engine"))
    cfg.engine = parse_enum<Engine>("engine", kv["engine"], {{"effective", Engine::Effective}, {"full", Engine::FullRestricted}});
  if (kv.count("k")) cfg.k = parse_int("k", kv["k"]);
  if (kv.count("interpretation"))
    cfg.reduction = parse_enum<Reduction>("interpretation", kv["interpretation"],
                                          {{"trace", Reduction::Trace}, {"postselect", Reduction::PostSelect}});
  if (kv.count("outcome")) cfg.outcome = parse_int("outcome", kv["outcome"]);
  for (const char* key : {"axis1", "axis2"})
    if (auto it = kv.find(key); it != kv.end() && !it->second.empty()) cfg.axes.push_back(parse_axis(it->second));
  if (auto it = kv.find("taus"); it != kv.end()) {
    std::stringstream ss(it->second);
    for (std::string t; std::getline(ss, t, ',');) cfg.taus.push_back(parse_double("taus", trim(t)));
  }
  if (kv.count("output")) cfg.output = kv["output"];
  if (kv.count("format")) cfg.format = kv["format"];
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("'format' must be csv or json");
  if (kv.count("workers")) cfg.workers = parse_int("workers", kv["workers"]);
  if (cfg.workers < 1) throw ConfigError("'workers' must be >= 1");
  if (cfg.k < 1) throw ConfigError("'k' must be >= 1");
  if (cfg.outcome != 0 && cfg.outcome != 1) throw ConfigError("'outcome' must be 0 or 1");
  for (double r : {cfg.params.g, cfg.params.lambda, cfg.params.omega1, cfg.params.omega2, cfg.params.omega3})
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("rates must be finite and >= 0");
  if (!(cfg.params.g > 0.0) || !(cfg.params.lambda > 0.0)) throw ConfigError("g and lambda must be > 0");
  if (command == "sweep" && (cfg.axes.empty() || cfg.axes.size() > 2))
    throw ConfigError("sweep needs one or two axes (axis1, axis2)");
  return cfg;
}

// ---- serialization ----------------------------------------------------------

inline nlohmann::ordered_json params_to_json(const UniformParams& p) {
  return {{"g", p.g}, {"lambda", p.lambda}, {"omega1", p.omega1}, {"omega2", p.omega2}, {"omega3", p.omega3}};
}

// Output path and worker count are left out: they do not affect results, and
// leaving them out keeps output bytes independent of both.
inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["params"] = params_to_json(c.params);
  j["branch"] = to_string(c.branch);
  j["protocol"] = to_string(c.protocol);
  j["engine"] = to_string(c.engine);
  j["k"] = c.k;
  j["interpretation"] = c.reduction ? nlohmann::ordered_json(to_string(*c.reduction)) : nlohmann::ordered_json(nullptr);
  j["outcome"] = c.outcome;
  j["axes"] = nlohmann::ordered_json::array();
  for (const auto& a : c.axes)
    j["axes"].push_back({{"name", a.name}, {"scale", a.log ? "log" : "lin"}, {"start", a.start}, {"stop", a.stop},
                         {"count", a.count}});
  j["taus"] = c.taus;
  j["format"] = c.format;
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  const auto& p = j.at("params");
  c.params = {p.at("g").get<double>(), p.at("omega1").get<double>(), p.at("omega2").get<double>(),
              p.at("omega3").get<double>(), p.at("lambda").get<double>()};
  c.branch = parse_branch(j.at("branch").get<std::string>());
  c.protocol = parse_protocol(j.at("protocol").get<std::string>());
  c.engine = j.at("engine").get<std::string>() == "full" ? Engine::FullRestricted : Engine::Effective;
  c.k = j.at("k").get<int>();
  if (!j.at("interpretation").is_null())
    c.reduction = j.at("interpretation").get<std::string>() == "trace" ? Reduction::Trace : Reduction::PostSelect;
  c.outcome = j.at("outcome").get<int>();
  for (const auto& a : j.at("axes"))
    c.axes.push_back({a.at("name").get<std::string>(), a.at("start").get<double>(), a.at("stop").get<double>(),
                      a.at("count").get<int>(), a.at("scale").get<std::string>() == "log"});
  c.taus = j.at("taus").get<std::vector<double>>();
  c.format = j.at("format").get<std::string>();
  return c;
}

inline nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json result_to_json(const ProtocolResult& r, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["name"] = to_string(r.spec.name);
  j["branch"] = to_string(r.spec.branch);
  j["params"] = params_to_json(r.spec.params);
  j["tau"] = r.tau;
  j["engine"] = to_string(r.spec.engine);
  j["k"] = r.spec.k;
  j["fidelity"] = r.fidelity;
  j["negativity"] = optional_number(r.negativity);
  j["success_probability"] = optional_number(r.success_probability);
  j["zeno_ratio"] = r.zeno_ratio;
  j["flags"] = r.flags;
  j["config"] = config_to_json(cfg);
  return j;
}

// Writes to a sibling temporary file, then renames over the destination.
inline void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dst(path);
  fs::path tmp = dst;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out.flush()) throw ConfigError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, dst);
}

inline void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.output.empty() || cfg.output == "-") out << content;
  else write_atomically(cfg.output, content);
}

// ---- commands ---------------------------------------------------------------

struct SpectrumRow {
  double numeric{0.0};
  double predicted{0.0};
  double residual{0.0};
};

inline std::vector<SpectrumRow> spectrum_table(const UniformParams& p, Branch branch) {
  const auto space = branch_subspace(branch);
  const auto strong = build_hamiltonian(p, space).H_strong;
  Eigen::SelfAdjointEigenSolver<Matrix> es(strong.entries);
  if (es.info() != Eigen::Success) throw NumericalFailure("spectrum: eigensolver failed");
  auto predicted = analytic_dark_bright(p, branch).eigenvalues;
  std::sort(predicted.begin(), predicted.end());
  std::vector<SpectrumRow> rows;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double v = es.eigenvalues()(static_cast<Eigen::Index>(i));
    rows.push_back({v, predicted[i], std::abs(v - predicted[i])});
  }
  return rows;
}

inline std::string cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const auto rows = spectrum_table(cfg.params, cfg.branch);
  std::string text;
  if (cfg.format == "json") {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(cfg);
    j["chi"] = cfg.params.chi();
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"numeric", r.numeric}, {"predicted", r.predicted}, {"residual", r.residual}});
    text = j.dump(2) + "\n";
  } else {
    text = "index,numeric,predicted,residual\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
      text += std::to_string(i) + "," + format_number(rows[i].numeric) + "," + format_number(rows[i].predicted) + "," +
              format_number(rows[i].residual) + "\n";
  }
  emit(cfg, text, out);
  return text;
}

struct DarkStateRow {
  std::string label;
  double norm{0.0};
  double residual{0.0};  // ||H_strong D||
};

struct DarkStateReport {
  std::vector<DarkStateRow> dark;
  double span_angle_sine{0.0};
  std::vector<BrightComparison> bright;
};

inline DarkStateReport darkstate_report(const UniformParams& p, Branch branch) {
  const auto basis = analytic_dark_bright(p, branch);
  const auto strong = build_hamiltonian(p, basis.space).H_strong;
  DarkStateReport rep;
  const auto all = basis.all_dark();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::string label = i < 3 ? "D" + std::to_string(i) : "D" + std::to_string(i - 3) + "-";
    rep.dark.push_back({label, all[i].norm(), strong.apply(all[i]).norm()});
  }
  const auto dec = decompose(strong);
  rep.span_angle_sine = max_principal_angle_sine(orthonormalize(all), dec.nearest(0.0).vectors);
  if (branch != Branch::Combined) rep.bright = compare_bright_states(p, branch);
  return rep;
}

inline std::string cmd_darkstates(const RunConfig& cfg, std::ostream& out) {
  const auto rep = darkstate_report(cfg.params, cfg.branch);
  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["chi"] = cfg.params.chi();
  j["dark"] = nlohmann::ordered_json::array();
  for (const auto& d : rep.dark) j["dark"].push_back({{"label", d.label}, {"norm", d.norm}, {"residual", d.residual}});
  j["dark_span_angle_sine"] = rep.span_angle_sine;
  j["printed_bright"] = nlohmann::ordered_json::array();
  for (const auto& b : rep.bright)
    j["printed_bright"].push_back({{"label", b.label},
                                   {"eigenvalue", b.predicted_eigenvalue},
                                   {"printed_norm", b.printed_norm},
                                   {"printed_residual", b.printed_residual},
                                   {"overlap_with_numeric", b.overlap}});
  const std::string text = j.dump(2) + "\n";
  emit(cfg, text, out);
  return text;
}

inline std::string cmd_protocol(const RunConfig& cfg, std::ostream& out) {
  const auto res = run(cfg.protocol_spec());
  const std::string json = result_to_json(res, cfg).dump(2) + "\n";
  std::ostringstream summary;
  summary << to_string(res.spec.name) << " [" << to_string(res.spec.branch) << ", " << to_string(res.spec.engine)
          << "] tau=" << format_number(res.tau) << " fidelity=" << format_number(res.fidelity);
  if (res.negativity) summary << " negativity=" << format_number(*res.negativity);
  if (res.success_probability) summary << " p_success=" << format_number(*res.success_probability);
  for (const auto& f : res.flags) summary << "\n  flag: " << f;
  summary << "\n";
  if (cfg.output.empty() || cfg.output == "-") {
    out << json;
  } else {
    write_atomically(cfg.output, json);
    out << summary.str();
  }
  return json;
}

inline UniformParams apply_axis(UniformParams p, const std::string& name, double v) {
  if (name == "g") p.g = v;
  else if (name == "lambda") p.lambda = v;
  else if (name == "omega1") p.omega1 = v;
  else if (name == "omega2") p.omega2 = v;
  else if (name == "omega3") p.omega3 = v;
  else if (name == "g_over_lambda") p.g = v * p.lambda;
  else if (name == "drive") {
    // sets Omega_1 and rescales Omega_2, Omega_3 with it
    const double scale = p.omega1 > 0.0 ? v / p.omega1 : 1.0;
    p.omega1 = v;
    p.omega2 *= scale;
    p.omega3 *= scale;
  }
  return p;
}

struct SweepRow {
  std::vector<double> axis_values;
  double fidelity{0.0};
  std::optional<double> negativity;
  double tau{0.0};
  double engine_gap{0.0};
  std::optional<double> success_probability;
};

inline SweepRow sweep_point(const RunConfig& cfg, const std::vector<double>& values) {
  auto spec = cfg.protocol_spec();
  for (std::size_t a = 0; a < cfg.axes.size(); ++a) spec.params = apply_axis(spec.params, cfg.axes[a].name, values[a]);
  auto other = spec;
  other.engine = spec.engine == Engine::Effective ? Engine::FullRestricted : Engine::Effective;
  const auto main_res = run(spec);
  const auto other_res = run(other);
  return {values, main_res.fidelity, main_res.negativity, main_res.tau,
          std::abs(main_res.fidelity - other_res.fidelity), main_res.success_probability};
}

// Grid points in row-major order over the axes, evaluated by `workers`
// threads; rows are gathered by index so output does not depend on scheduling.
inline std::vector<SweepRow> sweep_rows(const RunConfig& cfg) {
  std::vector<std::vector<double>> grid{{}};
  for (const auto& axis : cfg.axes) {
    std::vector<std::vector<double>> next;
    for (const auto& prefix : grid)
      for (double v : axis.values()) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    grid = std::move(next);
  }
  std::vector<SweepRow> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        rows[i] = sweep_point(cfg, grid[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::min<int>(cfg.workers, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

inline std::string sweep_csv(const RunConfig& cfg, const std::vector<SweepRow>& rows) {
  std::string text;
  for (const auto& a : cfg.axes) text += a.name + ",";
  text += "fidelity,negativity,tau,engine_gap,success_probability\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows) {
    for (double v : r.axis_values) text += format_number(v) + ",";
    text += format_number(r.fidelity) + "," + opt(r.negativity) + "," + format_number(r.tau) + "," +
            format_number(r.engine_gap) + "," + opt(r.success_probability) + "\n";
  }
  return text;
}

inline std::string sweep_json(const RunConfig& cfg, const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"axes", r.axis_values},
                         {"fidelity", r.fidelity},
                         {"negativity", optional_number(r.negativity)},
                         {"tau", r.tau},
                         {"engine_gap", r.engine_gap},
                         {"success_probability", optional_number(r.success_probability)}});
  return j.dump(2) + "\n";
}

inline std::string cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto rows = sweep_rows(cfg);
  const std::string text = cfg.format == "json" ? sweep_json(cfg, rows) : sweep_csv(cfg, rows);
  emit(cfg, text, out);
  return text;
}

inline std::string cmd_compare(const RunConfig& cfg, std::ostream& out) {
  auto taus = cfg.taus;
  if (taus.empty()) {
    const double t_st = solve_timing(Timing::half_pi(1), cfg.params, cfg.branch);
    for (int i = 0; i <= 8; ++i) taus.push_back(t_st * i / 4.0);
  }
  const auto rep = compare_full_vs_effective(cfg.params, cfg.branch, taus);
  std::string text;
  if (cfg.format == "json") {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(cfg);
    j["zeno_ratio"] = rep.zeno_ratio;
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& p : rep.points) j["points"].push_back({{"tau", p.tau}, {"fidelity", p.fidelity}});
    text = j.dump(2) + "\n";
  } else {
    text = "tau,fidelity,zeno_ratio\n";
    for (const auto& p : rep.points)
      text += format_number(p.tau) + "," + format_number(p.fidelity) + "," + format_number(rep.zeno_ratio) + "\n";
  }
  emit(cfg, text, out);
  return text;
}

inline std::string dispatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.command == "spectrum") return cmd_spectrum(cfg, out);
  if (cfg.command == "darkstates") return cmd_darkstates(cfg, out);
  if (cfg.command == "protocol") return cmd_protocol(cfg, out);
  if (cfg.command == "sweep") return cmd_sweep(cfg, out);
  if (cfg.command == "compare") return cmd_compare(cfg, out);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace qzd::cli
