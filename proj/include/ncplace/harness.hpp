#pragma once

// Experiment driver: corpus generation, placement sweeps over the NC budget,
// baseline comparison tables and plot-ready CSV files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncplace/selection.hpp"
#include "ncplace/simulator.hpp"
#include "ncplace/topology.hpp"

namespace ncplace::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // topology source: a file, or a generated corpus
  std::string topology_file;
  int graphs = 1;
  std::uint64_t topology_seed = 1;
  int nodes = 40;
  int sources = 1;
  int clients = 3;
  int parents = 4;
  double loss = 0.05;
  double link_probability = 1.0;
  double bandwidth_min = 8.0;
  double bandwidth_max = 64.0;
  int buffer = kDefaultBufferCapacity;
  int min_nodes = 0;
  int max_nodes = 0;  // 0: no upper limit

  int generation_size = 32;
  std::size_t packet_size = rnc::kDefaultPacketSize;
  std::vector<int> budgets{0, 1, 2, 3};
  std::vector<selection::Strategy> strategies{selection::Strategy::Centralized, selection::Strategy::Local,
                                              selection::Strategy::Random};
  std::vector<int> radii{3};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};  // random placement
  std::uint64_t sim_seed = 1;
  int runs = 100;
  unsigned workers = 0;
  std::string output_dir = "results";

  GenerateParams generate_params() const {
    GenerateParams p;
    p.n_nodes = nodes;
    p.n_sources = sources;
    p.n_clients = clients;
    p.parents_per_node = parents;
    p.loss_rate = loss;
    p.link_probability = link_probability;
    p.buffer_capacity = buffer;
    p.bandwidth = log_uniform_bandwidth(bandwidth_min, bandwidth_max);
    return p;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  in >> out;
  if (in.fail() || !(in >> std::ws).eof()) throw ConfigError("config: bad value for '" + key + "': '" + v + "'");
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_number<T>(key, item));
  return out;
}

}  // namespace detail

/// Apply one `key = value` setting. Unknown keys are an error.
inline void set_option(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  using detail::parse_list;
  using detail::parse_number;
  const std::string key = detail::trim(raw_key);
  const std::string v = detail::trim(raw_value);
  if (key == "topology") c.topology_file = v;
  else if (key == "graphs") c.graphs = parse_number<int>(key, v);
  else if (key == "topology_seed") c.topology_seed = parse_number<std::uint64_t>(key, v);
  else if (key == "nodes") c.nodes = parse_number<int>(key, v);
  else if (key == "sources") c.sources = parse_number<int>(key, v);
  else if (key == "clients") c.clients = parse_number<int>(key, v);
  else if (key == "parents") c.parents = parse_number<int>(key, v);
  else if (key == "loss") c.loss = parse_number<double>(key, v);
  else if (key == "link_probability") c.link_probability = parse_number<double>(key, v);
  else if (key == "bandwidth_min") c.bandwidth_min = parse_number<double>(key, v);
  else if (key == "bandwidth_max") c.bandwidth_max = parse_number<double>(key, v);
  else if (key == "buffer") c.buffer = parse_number<int>(key, v);
  else if (key == "min_nodes") c.min_nodes = parse_number<int>(key, v);
  else if (key == "max_nodes") c.max_nodes = parse_number<int>(key, v);
  else if (key == "generation_size") c.generation_size = parse_number<int>(key, v);
  else if (key == "packet_size") c.packet_size = parse_number<std::size_t>(key, v);
  else if (key == "budgets") c.budgets = parse_list<int>(key, v);
  else if (key == "radii") c.radii = parse_list<int>(key, v);
  else if (key == "seeds") c.seeds = parse_list<std::uint64_t>(key, v);
  else if (key == "sim_seed") c.sim_seed = parse_number<std::uint64_t>(key, v);
  else if (key == "runs") c.runs = parse_number<int>(key, v);
  else if (key == "workers") c.workers = parse_number<unsigned>(key, v);
  else if (key == "output_dir") c.output_dir = v;
  else if (key == "strategies") {
    c.strategies.clear();
    for (const auto& name : detail::split(v, ',')) {
      const auto s = selection::parse_strategy(name);
      if (!s) throw ConfigError("config: unknown strategy '" + name + "'");
      c.strategies.push_back(*s);
    }
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

inline void validate(const ExperimentConfig& c) {
  if (c.graphs < 1) throw ConfigError("config: graphs must be >= 1");
  if (c.generation_size < 1) throw ConfigError("config: generation_size must be >= 1");
  if (c.runs < 1) throw ConfigError("config: runs must be >= 1");
  if (c.budgets.empty()) throw ConfigError("config: budgets must not be empty");
  for (int a : c.budgets)
    if (a < 0) throw ConfigError("config: budgets must be >= 0");
  for (int r : c.radii)
    if (r < 1) throw ConfigError("config: radii must be >= 1");
  const bool random = std::find(c.strategies.begin(), c.strategies.end(), selection::Strategy::Random) !=
                      c.strategies.end();
  if (random && c.seeds.empty()) throw ConfigError("config: random strategy needs explicit seeds");
  const bool local = std::find(c.strategies.begin(), c.strategies.end(), selection::Strategy::Local) !=
                     c.strategies.end();
  if (local && c.radii.empty()) throw ConfigError("config: local strategy needs radii");
}

/// Reads `key = value` lines; `#` starts a comment.
inline ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      set_option(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in, std::move(base));
}

inline std::vector<OverlayGraph> load_graphs(const ExperimentConfig& c) {
  if (!c.topology_file.empty()) return {load(c.topology_file)};
  const auto max_nodes = c.max_nodes > 0 ? static_cast<std::size_t>(c.max_nodes) : std::numeric_limits<std::size_t>::max();
  return generate_corpus(c.generate_params(), static_cast<std::size_t>(c.graphs), c.topology_seed,
                         static_cast<std::size_t>(std::max(0, c.min_nodes)), max_nodes);
}

// ---------------------------------------------------------------------------
// Results

/// One row per (graph, series, budget). Series are strategy labels
/// ("centralized", "local-d3", "random") or references ("all-sf", "all-nc",
/// "maxflow-nc", "maxflow-routing").
struct ResultRow {
  int graph = 0;
  std::string series;
  int budget = 0;
  std::size_t nodes = 0;
  std::size_t samples = 0;  // random: placement seeds averaged; others 1
  double delay = std::numeric_limits<double>::quiet_NaN();
  double throughput = std::numeric_limits<double>::quiet_NaN();
  double norm_delay = std::numeric_limits<double>::quiet_NaN();
  double norm_throughput = std::numeric_limits<double>::quiet_NaN();
  double est_delay = std::numeric_limits<double>::quiet_NaN();
  std::vector<NodeId> picks;
  std::string error;
};

struct Results {
  std::vector<ResultRow> rows;
};

inline bool is_reference(const std::string& series) {
  return series == "all-sf" || series == "all-nc" || series == "maxflow-nc" || series == "maxflow-routing";
}

inline std::string series_name(selection::Strategy s, int radius) {
  if (s == selection::Strategy::Local) return "local-d" + std::to_string(radius);
  return std::string(selection::to_string(s));
}

namespace detail {

inline std::string fmt(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

inline double parse_field(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

inline std::string join_picks(const std::vector<NodeId>& picks) {
  std::string out;
  for (std::size_t i = 0; i < picks.size(); ++i) out += (i ? ";" : "") + std::to_string(picks[i]);
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch == '\n' ? ' ' : ch);
  return out + "\"";
}

inline std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline constexpr const char* kResultsHeader =
    "graph,series,budget,nodes,samples,delay_seconds,throughput_pps,norm_delay,norm_throughput,est_delay_seconds,"
    "picks,error";

inline void write_csv(std::ostream& os, const Results& r) {
  using detail::fmt;
  os << kResultsHeader << '\n';
  for (const auto& row : r.rows)
    os << row.graph << ',' << row.series << ',' << row.budget << ',' << row.nodes << ',' << row.samples << ','
       << fmt(row.delay) << ',' << fmt(row.throughput) << ',' << fmt(row.norm_delay) << ','
       << fmt(row.norm_throughput) << ',' << fmt(row.est_delay) << ',' << detail::join_picks(row.picks) << ','
       << detail::csv_escape(row.error) << '\n';
}

inline Results read_csv(std::istream& in) {
  Results r;
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kResultsHeader)
    throw std::runtime_error("results: unexpected header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::csv_fields(line);
    if (f.size() != 12) throw std::runtime_error("results line " + std::to_string(lineno) + ": expected 12 fields");
    ResultRow row;
    try {
      row.graph = std::stoi(f[0]);
      row.series = f[1];
      row.budget = std::stoi(f[2]);
      row.nodes = std::stoul(f[3]);
      row.samples = std::stoul(f[4]);
      row.delay = detail::parse_field(f[5]);
      row.throughput = detail::parse_field(f[6]);
      row.norm_delay = detail::parse_field(f[7]);
      row.norm_throughput = detail::parse_field(f[8]);
      row.est_delay = detail::parse_field(f[9]);
      for (const auto& p : detail::split(f[10], ';')) row.picks.push_back(std::stoi(p));
      row.error = f[11];
    } catch (const std::logic_error&) {
      throw std::runtime_error("results line " + std::to_string(lineno) + ": malformed number");
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sweep

struct Measurement {
  double delay = std::numeric_limits<double>::quiet_NaN();
  double throughput = std::numeric_limits<double>::quiet_NaN();
};

inline Measurement measure(const OverlayGraph& g, const ExperimentConfig& c) {
  sim::SimOptions o;
  o.generation_size = c.generation_size;
  o.packet_size = c.packet_size;
  o.seed = c.sim_seed;
  const auto mc = sim::monte_carlo(g, o, static_cast<std::size_t>(c.runs), c.workers);
  return {mc.mean_delay(), mc.aggregate_useful_rate()};
}

inline OverlayGraph all_nc(OverlayGraph g) {
  for (NodeId u : g.sf_nodes()) g.set_role(u, Role::NC);
  return g;
}

/// Reference rows for one graph: all-SF, all-NC and both max-flow bounds.
/// Max-flow delays are G over the mean per-client rate of the bound.
inline std::vector<ResultRow> reference_rows(int gi, const OverlayGraph& g, const ExperimentConfig& c) {
  std::vector<ResultRow> rows;
  auto cell = [&](const std::string& series, auto&& body) {
    ResultRow row;
    row.graph = gi;
    row.series = series;
    row.nodes = g.node_count();
    row.samples = 1;
    try {
      body(row);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  };
  const double n_clients = static_cast<double>(g.clients().size());
  cell("all-sf", [&](ResultRow& row) {
    const auto m = measure(g, c);
    row.delay = m.delay;
    row.throughput = m.throughput;
    row.est_delay = delay::estimate(g, c.generation_size).mean_delay();
  });
  const auto nc = all_nc(g);
  cell("all-nc", [&](ResultRow& row) {
    const auto m = measure(nc, c);
    row.delay = m.delay;
    row.throughput = m.throughput;
    row.est_delay = delay::estimate(nc, c.generation_size).mean_delay();
    row.budget = static_cast<int>(g.sf_nodes().size());
  });
  cell("maxflow-nc", [&](ResultRow& row) {
    row.throughput = max_flow_bound(g, FlowMode::NetworkCoding);
    row.delay = c.generation_size / (row.throughput / n_clients);
  });
  cell("maxflow-routing", [&](ResultRow& row) {
    row.throughput = max_flow_bound(g, FlowMode::Routing);
    row.delay = c.generation_size / (row.throughput / n_clients);
  });
  return rows;
}

inline void normalize(std::vector<ResultRow>& rows) {
  std::map<int, std::pair<double, double>> ref;
  for (const auto& r : rows)
    if (r.series == "all-nc" && r.error.empty()) ref[r.graph] = {r.delay, r.throughput};
  for (auto& r : rows) {
    const auto it = ref.find(r.graph);
    if (it == ref.end() || !r.error.empty()) continue;
    r.norm_delay = r.delay / it->second.first;
    r.norm_throughput = r.throughput / it->second.second;
  }
}

/// Every (strategy, budget) cell of every graph: select, promote, simulate.
/// Greedy plans are computed once for the largest budget; a budget A uses
/// the first A picks. Failures are recorded in the row's error column.
inline Results run_sweep(const ExperimentConfig& c, const std::vector<OverlayGraph>& graphs) {
  validate(c);
  Results out;
  const int max_budget = *std::max_element(c.budgets.begin(), c.budgets.end());
  selection::SelectionOptions so;
  so.generation_size = c.generation_size;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const auto& g = graphs[gi];
    std::vector<ResultRow> rows = reference_rows(static_cast<int>(gi), g, c);

    auto cell = [&](const std::string& series, int budget, auto&& body) {
      ResultRow row;
      row.graph = static_cast<int>(gi);
      row.series = series;
      row.budget = budget;
      row.nodes = g.node_count();
      row.samples = 1;
      try {
        body(row);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    };
    auto run_plan = [&](const std::string& series, const std::function<selection::SelectionPlan()>& make) {
      std::optional<selection::SelectionPlan> plan;
      std::string plan_error;
      try {
        plan = make();
      } catch (const std::exception& e) {
        plan_error = e.what();
      }
      for (int a : c.budgets)
        cell(series, a, [&](ResultRow& row) {
          if (!plan) throw std::runtime_error(plan_error);
          const auto k = std::min<std::size_t>(static_cast<std::size_t>(a), plan->picks.size());
          const auto m = measure(selection::apply(g, *plan, k), c);
          row.delay = m.delay;
          row.throughput = m.throughput;
          row.est_delay = k == 0 ? plan->baseline_delay : plan->picks[k - 1].est_delay;
          row.picks.resize(k);
          std::transform(plan->picks.begin(), plan->picks.begin() + static_cast<std::ptrdiff_t>(k), row.picks.begin(),
                         [](const selection::Pick& p) { return p.node; });
        });
    };

    for (auto s : c.strategies) {
      switch (s) {
        case selection::Strategy::Centralized:
          run_plan("centralized", [&] { return selection::select_centralized(g, max_budget, so); });
          break;
        case selection::Strategy::Local:
          for (int d : c.radii)
            run_plan(series_name(s, d), [&] { return selection::select_local(g, max_budget, d, so); });
          break;
        case selection::Strategy::Random:
          for (int a : c.budgets)
            cell("random", a, [&](ResultRow& row) {
              double d = 0.0;
              double t = 0.0;
              double e = 0.0;
              for (auto seed : c.seeds) {
                const auto plan = selection::select_random(g, a, seed, so);
                const auto m = measure(selection::apply(g, plan, plan.picks.size()), c);
                d += m.delay;
                t += m.throughput;
                e += plan.picks.empty() ? plan.baseline_delay : plan.picks.back().est_delay;
              }
              const double n = static_cast<double>(c.seeds.size());
              row.samples = c.seeds.size();
              row.delay = d / n;
              row.throughput = t / n;
              row.est_delay = e / n;
            });
          break;
      }
    }
    normalize(rows);
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  return out;
}

inline Results run_sweep(const ExperimentConfig& c) { return run_sweep(c, load_graphs(c)); }

// ---------------------------------------------------------------------------
// Comparison

struct VersusRandom {
  std::string series;
  int budget = 0;
  int wins = 0;
  int losses = 0;
  int ties = 0;
};

struct Agreement {
  std::string series;  // a local series compared with centralized
  int graphs = 0;
  int first_pick_matches = 0;
  int plan_matches = 0;  // identical pick sequence at the largest budget
};

struct Comparison {
  std::vector<VersusRandom> versus_random;
  std::vector<Agreement> agreement;
};

/// Per-budget win/loss/tie counts of each strategy against the random
/// baseline (lower simulated delay wins), and pick agreement between
/// centralized and local plans.
inline Comparison compare(const Results& r, const std::string& baseline = "random") {
  Comparison out;
  std::map<std::pair<int, int>, double> base;  // (graph, budget) -> delay
  std::set<std::string> series;
  for (const auto& row : r.rows) {
    if (!row.error.empty() || is_reference(row.series)) continue;
    if (row.series == baseline) base[{row.graph, row.budget}] = row.delay;
    series.insert(row.series);
  }
  std::map<std::pair<std::string, int>, VersusRandom> tally;
  for (const auto& row : r.rows) {
    if (!row.error.empty() || is_reference(row.series) || !series.count(row.series)) continue;
    const auto it = base.find({row.graph, row.budget});
    if (it == base.end()) continue;
    auto& t = tally[{row.series, row.budget}];
    t.series = row.series;
    t.budget = row.budget;
    const double a = row.delay;
    const double b = it->second;
    if (std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b))) ++t.ties;
    else if (a < b) ++t.wins;
    else ++t.losses;
  }
  for (auto& [k, v] : tally) out.versus_random.push_back(v);

  // picks of the largest budget row per (series, graph)
  std::map<std::pair<std::string, int>, std::pair<int, std::vector<NodeId>>> plans;
  for (const auto& row : r.rows) {
    if (!row.error.empty() || (row.series != "centralized" && row.series.rfind("local-", 0) != 0)) continue;
    auto& p = plans[{row.series, row.graph}];
    if (p.second.empty() || row.budget >= p.first) p = {row.budget, row.picks};
  }
  std::map<std::string, Agreement> agree;
  for (const auto& [key, local] : plans) {
    if (key.first == "centralized") continue;
    const auto c = plans.find({"centralized", key.second});
    if (c == plans.end()) continue;
    auto& a = agree[key.first];
    a.series = key.first;
    ++a.graphs;
    const auto& lp = local.second;
    const auto& cp = c->second.second;
    if (!lp.empty() && !cp.empty() && lp.front() == cp.front()) ++a.first_pick_matches;
    if (lp == cp) ++a.plan_matches;
  }
  for (auto& [k, v] : agree) out.agreement.push_back(v);
  return out;
}

inline void write_csv(std::ostream& os, const Comparison& c) {
  os << "kind,series,budget,wins,losses,ties,graphs,first_pick_matches,plan_matches\n";
  for (const auto& v : c.versus_random)
    os << "versus_random," << v.series << ',' << v.budget << ',' << v.wins << ',' << v.losses << ',' << v.ties << ','
       << v.wins + v.losses + v.ties << ",,\n";
  for (const auto& a : c.agreement)
    os << "agreement," << a.series << ",,,,," << a.graphs << ',' << a.first_pick_matches << ',' << a.plan_matches
       << '\n';
}

// ---------------------------------------------------------------------------
// Plot data

/// One CSV per metric: a row per budget, a column per series, each value the
/// mean over graphs of the normalized metric. Empty results give header-only
/// files. Returns the paths written.
inline std::vector<std::filesystem::path> emit_plots_data(const Results& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> series;
  std::set<int> budgets;
  for (const auto& row : r.rows) {
    if (is_reference(row.series)) continue;
    if (std::find(series.begin(), series.end(), row.series) == series.end()) series.push_back(row.series);
    budgets.insert(row.budget);
  }
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, auto metric) {
    std::map<std::pair<int, std::string>, std::pair<double, int>> acc;
    for (const auto& row : r.rows) {
      if (is_reference(row.series) || !row.error.empty()) continue;
      const double v = metric(row);
      if (!std::isfinite(v)) continue;
      auto& a = acc[{row.budget, row.series}];
      a.first += v;
      ++a.second;
    }
    const auto path = dir / (name + ".csv");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "budget";
    for (const auto& s : series) os << ',' << s;
    os << '\n';
    for (int b : budgets) {
      os << b;
      for (const auto& s : series) {
        const auto it = acc.find({b, s});
        os << ',' << (it == acc.end() ? std::string() : detail::fmt(it->second.first / it->second.second));
      }
      os << '\n';
    }
    if (!os) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  };
  emit("delay", [](const ResultRow& row) { return row.norm_delay; });
  emit("throughput", [](const ResultRow& row) { return row.norm_throughput; });
  return written;
}

}  // namespace ncplace::harness
