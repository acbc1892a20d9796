#pragma once

// Dataset files, experiment configuration, baselines, sensitivity sweeps and
// result tables. Every file format is versioned line-oriented text: a
// "# gms-<kind> v1" stamp, a tab-separated header naming the columns, then
// data rows. Numbers are written in shortest round-trip form so a reloaded
// dataset reproduces the in-memory model exactly and reruns are
// byte-identical.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gms/agent_opt.hpp"
#include "gms/domain.hpp"
#include "gms/negotiation.hpp"
#include "gms/scenarios.hpp"
#include "gms/tso_opt.hpp"

namespace gms {

struct SigmaRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct ExperimentConfig {
  std::string buses_path, lines_path, units_path, loads_path, events_path;
  int scenario_count = 50;
  uint64_t seed = 1;
  double epsilon = 0.5;
  int max_iterations = 50;
  double mva_base = 100.0;
  bool gamma_from_bound = true;  // false: honor the per-unit rates in the units file
  AcceptanceMode acceptance = AcceptanceMode::BlockAtomic;
  DeteriorationForm form = DeteriorationForm::PerScenarioSign;
  SampleMethod method = SampleMethod::MonteCarlo;
  std::vector<SigmaRange> sweep_sigma = {{1.0, 3.0}, {5.0, 7.0}, {10.0, 12.0}};
  std::vector<int> sweep_scenarios = {10, 50, 100};
};

struct Dataset {
  std::vector<AgentProfile> agents;
  NetworkModel net;
  TimeGrid grid;
};

namespace iodetail {

inline std::string num(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in output");
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string num(int v) { return std::to_string(v); }
inline std::string num(uint64_t v) { return std::to_string(v); }

inline std::vector<std::string> split_tabs(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  return out;
}

inline std::string join_tabs(const std::vector<std::string>& cols) {
  std::string out;
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i) out += '\t';
    out += cols[i];
  }
  return out;
}

class TsvReader {
 public:
  TsvReader(const std::string& path, const std::string& kind,
            const std::vector<std::string>& columns)
      : in_(path), path_(path), ncols_(columns.size()) {
    if (!in_) throw ParseError(path_, 0, "cannot open file");
    std::string stamp = "# gms-" + kind + " v1";
    std::string line;
    if (!read_line(line) || line != stamp)
      throw ParseError(path_, row_, "expected version line '" + stamp + "'");
    if (!read_line(line) || line != join_tabs(columns))
      throw ParseError(path_, row_, "expected header '" + join_tabs(columns) + "'");
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (read_line(line)) {
      if (line.empty()) continue;
      fields = split_tabs(line);
      if (fields.size() != ncols_)
        fail("expected " + std::to_string(ncols_) + " columns, got " +
             std::to_string(fields.size()));
      return true;
    }
    return false;
  }

  int row() const { return row_; }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_, row_, what); }

 private:
  bool read_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++row_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::ifstream in_;
  std::string path_;
  int row_ = 0;
  size_t ncols_ = 0;
};

inline int to_int(const TsvReader& r, const std::string& s, const char* col) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    r.fail(std::string("column ") + col + ": not an integer: '" + s + "'");
  return v;
}

inline double to_double(const TsvReader& r, const std::string& s, const char* col) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
    r.fail(std::string("column ") + col + ": not a number: '" + s + "'");
  return v;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

inline void stamp(std::ofstream& out, const std::string& kind,
                  const std::vector<std::string>& columns) {
  out << "# gms-" << kind << " v1\n" << join_tabs(columns) << '\n';
}

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace iodetail

// ---------------------------------------------------------------------------
// Experiment configuration: "key = value" lines, '#' comments, paths resolved
// against the config file's directory.

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open config");
  ExperimentConfig cfg;
  const auto dir = std::filesystem::path(path).parent_path();
  auto resolve = [&dir](const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() ? p.string() : (dir / p).string();
  };

  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = iodetail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, row, "expected key = value");
    const std::string key = iodetail::trim(line.substr(0, eq));
    const std::string value = iodetail::trim(line.substr(eq + 1));
    auto bad = [&](const std::string& what) -> ParseError {
      return ParseError(path, row, "key '" + key + "': " + what + ": '" + value + "'");
    };
    auto as_int = [&](int lo) {
      int v = 0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || v < lo)
        throw bad("expected an integer >= " + std::to_string(lo));
      return v;
    };
    auto as_double = [&]() {
      double v = 0.0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || !std::isfinite(v))
        throw bad("expected a number");
      return v;
    };

    if (key == "buses") cfg.buses_path = resolve(value);
    else if (key == "lines") cfg.lines_path = resolve(value);
    else if (key == "units") cfg.units_path = resolve(value);
    else if (key == "loads") cfg.loads_path = resolve(value);
    else if (key == "events") cfg.events_path = resolve(value);
    else if (key == "scenario_count") cfg.scenario_count = as_int(1);
    else if (key == "seed") {
      uint64_t v = 0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw bad("expected an unsigned integer");
      cfg.seed = v;
    } else if (key == "epsilon") {
      cfg.epsilon = as_double();
      if (!(cfg.epsilon > 0.0)) throw bad("must be > 0");
    } else if (key == "max_iterations") cfg.max_iterations = as_int(1);
    else if (key == "mva_base") {
      cfg.mva_base = as_double();
      if (!(cfg.mva_base > 0.0)) throw bad("must be > 0");
    } else if (key == "gamma") {
      if (value == "auto") cfg.gamma_from_bound = true;
      else if (value == "file") cfg.gamma_from_bound = false;
      else throw bad("expected auto or file");
    } else if (key == "acceptance") {
      if (value == "block_atomic") cfg.acceptance = AcceptanceMode::BlockAtomic;
      else if (value == "per_timestep") cfg.acceptance = AcceptanceMode::PerTimestep;
      else throw bad("expected block_atomic or per_timestep");
    } else if (key == "deterioration") {
      if (value == "per_scenario_sign") cfg.form = DeteriorationForm::PerScenarioSign;
      else if (value == "expected_bracket") cfg.form = DeteriorationForm::ExpectedBracket;
      else throw bad("expected per_scenario_sign or expected_bracket");
    } else if (key == "sampling") {
      if (value == "monte_carlo") cfg.method = SampleMethod::MonteCarlo;
      else if (value == "stratified") cfg.method = SampleMethod::Stratified;
      else throw bad("expected monte_carlo or stratified");
    } else if (key == "sweep_sigma") {
      cfg.sweep_sigma.clear();
      size_t pos = 0;
      while (pos <= value.size()) {
        size_t comma = value.find(',', pos);
        std::string tok = iodetail::trim(value.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos));
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw bad("expected lo:hi ranges");
        SigmaRange rg;
        auto lo = tok.substr(0, colon), hi = tok.substr(colon + 1);
        auto r1 = std::from_chars(lo.data(), lo.data() + lo.size(), rg.lo);
        auto r2 = std::from_chars(hi.data(), hi.data() + hi.size(), rg.hi);
        if (r1.ec != std::errc{} || r1.ptr != lo.data() + lo.size() ||
            r2.ec != std::errc{} || r2.ptr != hi.data() + hi.size() ||
            rg.lo < 0.0 || rg.hi < rg.lo)
          throw bad("expected lo:hi ranges with 0 <= lo <= hi");
        cfg.sweep_sigma.push_back(rg);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (cfg.sweep_sigma.empty()) throw bad("expected at least one range");
    } else if (key == "sweep_scenarios") {
      cfg.sweep_scenarios.clear();
      size_t pos = 0;
      while (pos <= value.size()) {
        size_t comma = value.find(',', pos);
        std::string tok = iodetail::trim(value.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos));
        int v = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() || v < 1)
          throw bad("expected positive integers");
        cfg.sweep_scenarios.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (cfg.sweep_scenarios.empty()) throw bad("expected at least one count");
    } else {
      throw ParseError(path, row, "unknown key '" + key + "'");
    }
  }

  auto need = [&](const std::string& p, const char* key) {
    if (p.empty()) throw ParseError(path, 0, std::string("missing key '") + key + "'");
  };
  need(cfg.buses_path, "buses");
  need(cfg.lines_path, "lines");
  need(cfg.units_path, "units");
  need(cfg.loads_path, "loads");
  need(cfg.events_path, "events");
  return cfg;
}

// Config whose dataset paths point at the fixed file names under `dir`.
inline ExperimentConfig dataset_config(const std::string& dir) {
  ExperimentConfig cfg;
  cfg.buses_path = dir + "/buses.tsv";
  cfg.lines_path = dir + "/lines.tsv";
  cfg.units_path = dir + "/units.tsv";
  cfg.loads_path = dir + "/loads.tsv";
  cfg.events_path = dir + "/events.tsv";
  return cfg;
}

inline NegotiationOptions make_negotiation_options(const ExperimentConfig& cfg) {
  NegotiationOptions o;
  o.master_seed = cfg.seed;
  o.scenario_count = cfg.scenario_count;
  o.method = cfg.method;
  o.form = cfg.form;
  o.max_iterations = cfg.max_iterations;
  o.tso.eps = cfg.epsilon;
  o.tso.mode = cfg.acceptance;
  return o;
}

// ---------------------------------------------------------------------------
// Dataset loading. Five files, fixed schemas, row/column diagnostics.

inline Dataset load_dataset(const ExperimentConfig& cfg) {
  Dataset d;
  d.net.mva_base = cfg.mva_base;
  std::vector<std::string> f;

  {
    iodetail::TsvReader r(cfg.buses_path, "buses", {"bus", "load_share"});
    while (r.next(f)) {
      int bus = iodetail::to_int(r, f[0], "bus");
      double share = iodetail::to_double(r, f[1], "load_share");
      if (share < 0.0) r.fail("column load_share: must be >= 0");
      if (d.net.load_share.count(bus)) r.fail("duplicate bus " + std::to_string(bus));
      d.net.buses.push_back(bus);
      d.net.load_share[bus] = share;
    }
    if (d.net.buses.empty()) throw ParseError(cfg.buses_path, 0, "no bus rows");
    std::sort(d.net.buses.begin(), d.net.buses.end());
  }

  auto known_bus = [&](int bus) {
    return std::binary_search(d.net.buses.begin(), d.net.buses.end(), bus);
  };

  {
    iodetail::TsvReader r(cfg.lines_path, "lines",
                          {"from", "to", "susceptance", "capacity_mw"});
    while (r.next(f)) {
      Line ln;
      ln.from = iodetail::to_int(r, f[0], "from");
      ln.to = iodetail::to_int(r, f[1], "to");
      ln.susceptance = iodetail::to_double(r, f[2], "susceptance");
      ln.capacity = iodetail::to_double(r, f[3], "capacity_mw");
      if (!known_bus(ln.from)) r.fail("unknown bus " + std::to_string(ln.from));
      if (!known_bus(ln.to)) r.fail("unknown bus " + std::to_string(ln.to));
      if (ln.from == ln.to) r.fail("line endpoints must differ");
      if (!(ln.susceptance > 0.0)) r.fail("column susceptance: must be > 0");
      if (!(ln.capacity > 0.0)) r.fail("column capacity_mw: must be > 0");
      d.net.lines.push_back(ln);
    }
  }

  {
    iodetail::TsvReader r(cfg.units_path, "units",
                          {"unit", "bus", "q_min", "q_max", "marginal_cost",
                           "repair_days", "alpha", "gamma"});
    int last_id = 0;
    while (r.next(f)) {
      AgentProfile ag;
      ag.id = iodetail::to_int(r, f[0], "unit");
      ag.bus = iodetail::to_int(r, f[1], "bus");
      ag.q_min = iodetail::to_double(r, f[2], "q_min");
      ag.q_max = iodetail::to_double(r, f[3], "q_max");
      ag.marginal_cost = iodetail::to_double(r, f[4], "marginal_cost");
      ag.repair_time = iodetail::to_int(r, f[5], "repair_days");
      ag.alpha = iodetail::to_double(r, f[6], "alpha");
      if (f[7] == "auto") {
        ag.gamma_auto = true;
      } else {
        ag.gamma = iodetail::to_double(r, f[7], "gamma");
        ag.gamma_auto = false;
        if (ag.gamma < 0.0) r.fail("column gamma: must be >= 0 or auto");
      }
      if (ag.id <= last_id) r.fail("unit ids must be positive and ascending");
      if (!known_bus(ag.bus)) r.fail("unknown bus " + std::to_string(ag.bus));
      if (ag.q_min < 0.0) r.fail("column q_min: must be >= 0");
      if (!(ag.q_max >= ag.q_min) || !(ag.q_max > 0.0))
        r.fail("column q_max: must be > 0 and >= q_min");
      if (ag.repair_time < 1) r.fail("column repair_days: must be >= 1");
      if (ag.alpha < 0.0) r.fail("column alpha: must be >= 0");
      last_id = ag.id;
      d.net.unit_bus[ag.id] = ag.bus;
      d.agents.push_back(ag);
    }
    if (d.agents.empty()) throw ParseError(cfg.units_path, 0, "no unit rows");
  }

  {
    iodetail::TsvReader r(cfg.loads_path, "loads", {"day", "load_mw", "price"});
    int expected = 0;
    while (r.next(f)) {
      int day = iodetail::to_int(r, f[0], "day");
      if (day != ++expected) r.fail("days must be consecutive from 1");
      double load = iodetail::to_double(r, f[1], "load_mw");
      if (!(load > 0.0)) r.fail("column load_mw: must be > 0");
      d.net.total_load.push_back(load);
      d.net.price.push_back(iodetail::to_double(r, f[2], "price"));
    }
    if (expected == 0) throw ParseError(cfg.loads_path, 0, "no load rows");
    d.grid.horizon_length = expected;
  }

  {
    iodetail::TsvReader r(cfg.events_path, "events",
                          {"unit", "detect_day", "fail_mean", "fail_std",
                           "window_start", "window_end"});
    std::map<int, size_t> by_id;
    for (size_t i = 0; i < d.agents.size(); ++i) by_id[d.agents[i].id] = i;
    while (r.next(f)) {
      int unit = iodetail::to_int(r, f[0], "unit");
      auto it = by_id.find(unit);
      if (it == by_id.end()) r.fail("unknown unit " + std::to_string(unit));
      FaultEvent ev;
      ev.detect_time = iodetail::to_int(r, f[1], "detect_day");
      ev.rul_mean = iodetail::to_double(r, f[2], "fail_mean");
      ev.rul_std = iodetail::to_double(r, f[3], "fail_std");
      ev.window_start = iodetail::to_int(r, f[4], "window_start");
      ev.window_end = iodetail::to_int(r, f[5], "window_end");
      if (ev.rul_std < 0.0) r.fail("column fail_std: must be >= 0");
      if (ev.window_start < 1 || ev.window_end < ev.window_start)
        r.fail("window must satisfy 1 <= window_start <= window_end");
      if (ev.window_end > d.grid.horizon_length)
        r.fail("window_end past the last load day");
      d.agents[it->second].events.push_back(ev);
    }
  }

  if (cfg.gamma_from_bound)
    for (auto& ag : d.agents) ag.gamma_auto = true;
  return d;
}

// Writes the five dataset files into `dir` (created if absent) under the
// fixed names that dataset_config() expects. Numbers round-trip exactly.
inline void write_dataset(const std::vector<AgentProfile>& agents, const NetworkModel& net,
                          const TimeGrid& grid, const std::string& dir) {
  namespace fs = std::filesystem;
  using iodetail::num;
  detail::require(static_cast<int>(net.total_load.size()) == grid.horizon_length &&
                      static_cast<int>(net.price.size()) == grid.horizon_length,
                  "load and price series must cover the horizon");
  fs::create_directories(dir);

  {
    auto out = iodetail::open_out(fs::path(dir) / "buses.tsv");
    iodetail::stamp(out, "buses", {"bus", "load_share"});
    for (int bus : net.buses) {
      auto it = net.load_share.find(bus);
      out << bus << '\t' << num(it == net.load_share.end() ? 0.0 : it->second) << '\n';
    }
  }
  {
    auto out = iodetail::open_out(fs::path(dir) / "lines.tsv");
    iodetail::stamp(out, "lines", {"from", "to", "susceptance", "capacity_mw"});
    for (const auto& ln : net.lines)
      out << ln.from << '\t' << ln.to << '\t' << num(ln.susceptance) << '\t'
          << num(ln.capacity) << '\n';
  }
  {
    auto out = iodetail::open_out(fs::path(dir) / "units.tsv");
    iodetail::stamp(out, "units", {"unit", "bus", "q_min", "q_max", "marginal_cost",
                                   "repair_days", "alpha", "gamma"});
    for (const auto& ag : agents)
      out << ag.id << '\t' << ag.bus << '\t' << num(ag.q_min) << '\t' << num(ag.q_max)
          << '\t' << num(ag.marginal_cost) << '\t' << ag.repair_time << '\t'
          << num(ag.alpha) << '\t' << (ag.gamma_auto ? std::string("auto") : num(ag.gamma))
          << '\n';
  }
  {
    auto out = iodetail::open_out(fs::path(dir) / "loads.tsv");
    iodetail::stamp(out, "loads", {"day", "load_mw", "price"});
    for (int t = 1; t <= grid.horizon_length; ++t)
      out << t << '\t' << num(net.total_load[static_cast<size_t>(t - 1)]) << '\t'
          << num(net.price[static_cast<size_t>(t - 1)]) << '\n';
  }
  {
    auto out = iodetail::open_out(fs::path(dir) / "events.tsv");
    iodetail::stamp(out, "events", {"unit", "detect_day", "fail_mean", "fail_std",
                                    "window_start", "window_end"});
    for (const auto& ag : agents)
      for (const auto& ev : ag.events)
        out << ag.id << '\t' << ev.detect_time << '\t' << num(ev.rul_mean) << '\t'
            << num(ev.rul_std) << '\t' << ev.window_start << '\t' << ev.window_end << '\n';
  }
}

// ---------------------------------------------------------------------------
// Reference policies: repair immediately at detection (condition-based) or
// right at the predicted failure day (corrective), each checked once against
// the grid operator.

struct BaselineEntry {
  int agent_id = 0;
  double cond_reward = 0.0, cond_deterioration = 0.0;
  double corr_reward = 0.0, corr_deterioration = 0.0;
  bool cond_rejected = false, corr_rejected = false;
};

namespace iodetail {

inline std::vector<std::vector<uint8_t>> baseline_requests(
    const std::vector<AgentProfile>& agents, const TimeGrid& grid, bool at_failure) {
  std::vector<std::vector<uint8_t>> x(
      agents.size(), std::vector<uint8_t>(static_cast<size_t>(grid.horizon_length), 0));
  for (size_t i = 0; i < agents.size(); ++i) {
    for (const auto& ev : agents[i].events) {
      int start = at_failure ? static_cast<int>(std::llround(ev.rul_mean)) : ev.detect_time;
      start = std::clamp(start, ev.window_start, ev.window_end);
      int len = std::min(agents[i].repair_time, ev.window_end - start + 1);
      for (int t = start; t < start + len; ++t) x[i][static_cast<size_t>(t - 1)] = 1;
    }
  }
  return x;
}

}  // namespace iodetail

inline std::vector<BaselineEntry> run_baselines(
    const std::vector<AgentProfile>& agents, const std::vector<std::vector<ScenarioSet>>& scens,
    const NetworkModel& net, const TimeGrid& grid,
    DeteriorationForm form = DeteriorationForm::PerScenarioSign, const TsoOptions& tso = {}) {
  auto xc = iodetail::baseline_requests(agents, grid, false);
  auto xf = iodetail::baseline_requests(agents, grid, true);
  auto rc = solve_tso(agents, scens, xc, net, grid, tso);
  auto rf = solve_tso(agents, scens, xf, net, grid, tso);

  std::vector<BaselineEntry> out;
  for (size_t i = 0; i < agents.size(); ++i) {
    BaselineEntry e;
    e.agent_id = agents[i].id;
    e.cond_reward = expected_reward(agents[i], scens[i], xc[i], net.price, grid);
    e.cond_deterioration = deterioration_cost(agents[i], scens[i], xc[i], grid, form);
    e.corr_reward = expected_reward(agents[i], scens[i], xf[i], net.price, grid);
    e.corr_deterioration = deterioration_cost(agents[i], scens[i], xf[i], grid, form);
    for (int t = 0; t < grid.horizon_length; ++t) {
      if (rc.schedule.y[i][static_cast<size_t>(t)] < xc[i][static_cast<size_t>(t)])
        e.cond_rejected = true;
      if (rf.schedule.y[i][static_cast<size_t>(t)] < xf[i][static_cast<size_t>(t)])
        e.corr_rejected = true;
    }
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sensitivity sweep: every (sigma range, scenario count) cell runs the full
// negotiation on a copy of the fleet whose failure-time spreads are mapped
// affinely onto the cell's range. All cells share the master seed, so the
// underlying draws are common random numbers.

struct SweepCell {
  double sigma_lo = 0.0, sigma_hi = 0.0;
  int scenario_count = 0;
  bool converged = false;
  int iterations = 0;
  double total_reward = 0.0;  // summed final-round expected rewards
  double wall_seconds = 0.0;  // measured; never written into report files
};

inline std::vector<AgentProfile> remap_sigma(std::vector<AgentProfile> agents, double lo,
                                             double hi) {
  double lo_d = std::numeric_limits<double>::infinity();
  double hi_d = -std::numeric_limits<double>::infinity();
  for (const auto& ag : agents)
    for (const auto& ev : ag.events) {
      lo_d = std::min(lo_d, ev.rul_std);
      hi_d = std::max(hi_d, ev.rul_std);
    }
  if (!(hi_d >= lo_d)) return agents;  // no events anywhere
  for (auto& ag : agents)
    for (auto& ev : ag.events) {
      double s = (hi_d > lo_d) ? lo + (ev.rul_std - lo_d) * (hi - lo) / (hi_d - lo_d)
                               : 0.5 * (lo + hi);
      ev.rul_std = std::max(0.0, s);
    }
  return agents;
}

inline std::vector<SweepCell> run_sweep(const std::vector<AgentProfile>& agents,
                                        const NetworkModel& net, const TimeGrid& grid,
                                        const NegotiationOptions& base,
                                        const std::vector<SigmaRange>& ranges,
                                        const std::vector<int>& counts) {
  std::vector<std::future<SweepCell>> jobs;
  for (const auto& range : ranges) {
    for (int count : counts) {
      jobs.push_back(std::async(std::launch::async, [agents, &net, &grid, base, range,
                                                     count]() {
        SweepCell cell;
        cell.sigma_lo = range.lo;
        cell.sigma_hi = range.hi;
        cell.scenario_count = count;
        auto tuned = remap_sigma(agents, range.lo, range.hi);
        NegotiationOptions o = base;
        o.scenario_count = count;
        const auto t0 = std::chrono::steady_clock::now();
        auto res = run_negotiation(tuned, net, grid, o);
        cell.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cell.converged = res.converged;
        cell.iterations = res.iterations;
        for (double r : res.history.back().reward) cell.total_reward += r;
        return cell;
      }));
    }
  }
  std::vector<SweepCell> out;
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

// ---------------------------------------------------------------------------
// Result emission. Fixed file names, fixed headers, shortest round-trip
// numbers; wall-clock measurements are deliberately left out so identical
// (config, seed) runs emit byte-identical files.

struct ReportInputs {
  const std::vector<AgentProfile>* agents = nullptr;
  const NetworkModel* net = nullptr;
  const TimeGrid* grid = nullptr;
  const NegotiationResult* run = nullptr;
  const std::vector<BaselineEntry>* baselines = nullptr;  // optional
  const std::vector<SweepCell>* sweep = nullptr;          // optional
  DeteriorationForm form = DeteriorationForm::PerScenarioSign;
};

inline std::vector<std::string> emit_report(const ReportInputs& in, const std::string& out_dir) {
  namespace fs = std::filesystem;
  using iodetail::num;
  detail::require(in.agents && in.net && in.grid && in.run,
                  "emit_report needs agents, network, grid and a finished run");
  const auto& agents = *in.agents;
  const auto& run = *in.run;
  const int days = in.grid->horizon_length;
  const int iters = static_cast<int>(run.history.size());
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  auto add = [&](const fs::path& p) {
    written.push_back(p.string());
    return iodetail::open_out(p);
  };

  {
    auto out = add(fs::path(out_dir) / "requests.tsv");
    iodetail::stamp(out, "requests", {"iteration", "unit", "day", "requested", "accepted"});
    for (int it = 0; it < iters; ++it)
      for (size_t a = 0; a < agents.size(); ++a)
        for (int t = 0; t < days; ++t) {
          const int x = run.history[static_cast<size_t>(it)].x[a][static_cast<size_t>(t)];
          const int y = run.history[static_cast<size_t>(it)].y[a][static_cast<size_t>(t)];
          if (x || y)
            out << (it + 1) << '\t' << agents[a].id << '\t' << (t + 1) << '\t' << x << '\t'
                << y << '\n';
        }
  }

  auto per_iteration_table = [&](const char* kind, auto value) {
    auto out = add(fs::path(out_dir) / (std::string(kind) + ".tsv"));
    std::vector<std::string> cols = {"unit"};
    for (int it = 1; it <= iters; ++it) cols.push_back("iter_" + std::to_string(it));
    iodetail::stamp(out, kind, cols);
    for (size_t a = 0; a < agents.size(); ++a) {
      out << agents[a].id;
      for (int it = 0; it < iters; ++it) out << '\t' << num(value(it, a));
      out << '\n';
    }
  };
  per_iteration_table("incentives", [&](int it, size_t a) {
    return run.history[static_cast<size_t>(it)].incentive[a];
  });
  per_iteration_table("rewards", [&](int it, size_t a) {
    return run.history[static_cast<size_t>(it)].reward[a];
  });

  {
    auto rat = audit_individual_rationality(agents, run, *in.net, *in.grid, in.form);
    auto out = add(fs::path(out_dir) / "rationality.tsv");
    std::vector<std::string> cols{"unit"};
    for (int it = 0; it < iters; ++it) cols.push_back("iter_" + std::to_string(it + 1));
    cols.push_back("settled_net");
    cols.push_back("rational");
    iodetail::stamp(out, "rationality", cols);
    for (const auto& e : rat) {
      out << e.agent_id;
      for (double v : e.round_net) out << '\t' << num(v);
      out << '\t' << num(e.net) << '\t' << (e.rational ? 1 : 0) << '\n';
    }
  }

  {
    auto out = add(fs::path(out_dir) / "capacity.tsv");
    iodetail::stamp(out, "capacity", {"iteration", "day", "requested_capacity_mw",
                                      "accepted_capacity_mw", "load_mw"});
    for (int it = 0; it < iters; ++it)
      for (int t = 0; t < days; ++t) {
        double req = 0.0, acc = 0.0;
        for (size_t a = 0; a < agents.size(); ++a) {
          const auto& rec = run.history[static_cast<size_t>(it)];
          if (!rec.x[a][static_cast<size_t>(t)]) req += agents[a].q_max;
          if (!rec.y[a][static_cast<size_t>(t)]) acc += agents[a].q_max;
        }
        out << (it + 1) << '\t' << (t + 1) << '\t' << num(req) << '\t' << num(acc) << '\t'
            << num(in.net->total_load[static_cast<size_t>(t)]) << '\n';
      }
  }

  if (in.baselines) {
    auto out = add(fs::path(out_dir) / "baselines.tsv");
    iodetail::stamp(out, "baselines",
                    {"unit", "reward_negotiated", "reward_condition", "reward_corrective",
                     "rejected_condition", "rejected_corrective"});
    for (size_t a = 0; a < in.baselines->size(); ++a) {
      const auto& e = (*in.baselines)[a];
      out << e.agent_id << '\t' << num(run.history.back().reward[a]) << '\t'
          << num(e.cond_reward) << '\t' << num(e.corr_reward) << '\t' << e.cond_rejected
          << '\t' << e.corr_rejected << '\n';
    }
  }

  if (in.sweep) {
    auto out = add(fs::path(out_dir) / "sweep.tsv");
    iodetail::stamp(out, "sweep", {"sigma_lo", "sigma_hi", "scenarios", "converged",
                                   "iterations", "total_reward"});
    for (const auto& c : *in.sweep)
      out << num(c.sigma_lo) << '\t' << num(c.sigma_hi) << '\t' << c.scenario_count << '\t'
          << (c.converged ? 1 : 0) << '\t' << c.iterations << '\t' << num(c.total_reward)
          << '\n';
  }

  {
    auto out = add(fs::path(out_dir) / "summary.txt");
    out << "# gms-summary v1\n";
    auto flag = [](bool b) { return b ? "true" : "false"; };
    out << "converged\t" << flag(run.converged) << '\n';
    out << "iterations\t" << run.iterations << '\n';
    out << "units\t" << agents.size() << '\n';
    out << "days\t" << days << '\n';
    auto budget = audit_budget_balance(run);
    out << "weak_budget_ok\t" << flag(budget.weak_ok) << '\n';
    out << "exact_budget_ok\t" << flag(budget.exact_ok) << '\n';
    for (size_t i = 0; i < budget.per_iteration.size(); ++i)
      out << "ledger_" << (i + 1) << '\t' << num(budget.per_iteration[i]) << '\n';
    for (size_t a = 0; a < agents.size(); ++a)
      out << "gamma_" << agents[a].id << '\t' << num(run.gamma[a]) << '\n';
    double clamped = 0.0;
    for (const auto& per_agent : run.scens)
      for (const auto& set : per_agent) clamped += set.clamped_mass;
    out << "clamped_mass\t" << num(clamped) << '\n';
    out << "spacing_ok\t" << flag(run.validation.assumption_spacing_ok) << '\n';
    out << "adequacy_ok\t" << flag(run.validation.assumption_adequacy_ok) << '\n';
    out << "structural_ok\t" << flag(run.validation.structural_ok) << '\n';
    for (const auto& e : audit_individual_rationality(agents, run, *in.net, *in.grid, in.form)) {
      out << "net_value_" << e.agent_id << '\t' << num(e.net) << '\n';
      out << "rational_" << e.agent_id << '\t' << flag(e.rational) << '\n';
    }
  }

  return written;
}

}  // namespace gms
