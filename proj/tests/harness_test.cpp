#include "ncplace/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ncplace;
using namespace ncplace::harness;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.graphs = 2;
  c.nodes = 14;
  c.generation_size = 8;
  c.packet_size = 0;
  c.budgets = {0, 1, 2};
  c.radii = {1, 8};
  c.seeds = {1, 2};
  c.runs = 4;
  c.workers = 1;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ncplace_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

const ResultRow& row(const Results& r, int graph, const std::string& series, int budget) {
  for (const auto& x : r.rows)
    if (x.graph == graph && x.series == series && x.budget == budget) return x;
  throw std::out_of_range("no row " + series);
}

const ResultRow& reference(const Results& r, int graph, const std::string& series) {
  for (const auto& x : r.rows)
    if (x.graph == graph && x.series == series) return x;
  throw std::out_of_range("no row " + series);
}

}  // namespace

TEST(Config, ParsesKeysCommentsAndLists) {
  std::istringstream in(
      "# sweep\n"
      "nodes = 30\n"
      "\n"
      "budgets = 0, 2,4   # inline comment\n"
      "strategies = centralized,randsel\n"
      "radii=2\n"
      "loss = 0.1\n"
      "output_dir = out/x\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.nodes, 30);
  EXPECT_EQ(c.budgets, (std::vector<int>{0, 2, 4}));
  ASSERT_EQ(c.strategies.size(), 2u);
  EXPECT_EQ(c.strategies[1], selection::Strategy::Random);
  EXPECT_EQ(c.radii, std::vector<int>{2});
  EXPECT_DOUBLE_EQ(c.loss, 0.1);
  EXPECT_EQ(c.output_dir, "out/x");
  EXPECT_EQ(c.generation_size, 32);
}

TEST(Config, ErrorsCarryLineNumbers) {
  std::istringstream unknown("nodes = 3\ncolour = red\n");
  try {
    parse_config(unknown);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
  std::istringstream no_eq("nodes 3\n");
  EXPECT_THROW(parse_config(no_eq), ConfigError);
  std::istringstream bad_number("nodes = many\n");
  EXPECT_THROW(parse_config(bad_number), ConfigError);
  std::istringstream bad_strategy("strategies = best\n");
  EXPECT_THROW(parse_config(bad_strategy), ConfigError);
}

TEST(Config, OverridesApplyAfterFile) {
  std::istringstream in("nodes = 30\nruns = 7\n");
  auto c = parse_config(in);
  set_option(c, "runs", "9");
  EXPECT_EQ(c.nodes, 30);
  EXPECT_EQ(c.runs, 9);
  EXPECT_THROW(set_option(c, "speed", "1"), ConfigError);
}

TEST(Config, Validation) {
  auto c = small_config();
  EXPECT_NO_THROW(validate(c));
  c.seeds.clear();
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config();
  c.budgets = {-1};
  EXPECT_THROW(validate(c), ConfigError);
  c = small_config();
  c.radii = {0};
  EXPECT_THROW(validate(c), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/sweep.conf"), ConfigError);
}

TEST(Sweep, ZeroBudgetMatchesAllSf) {
  auto c = small_config();
  c.graphs = 1;
  c.budgets = {0};
  const auto r = run_sweep(c);
  const auto& sf = reference(r, 0, "all-sf");
  for (const auto* s : {"centralized", "local-d1", "random"}) {
    const auto& x = row(r, 0, s, 0);
    EXPECT_TRUE(x.error.empty()) << x.error;
    EXPECT_EQ(x.delay, sf.delay) << s;
    EXPECT_EQ(x.throughput, sf.throughput) << s;
  }
}

TEST(Sweep, FullCentralizedBudgetNormalizesToOne) {
  auto c = small_config();
  c.graphs = 1;
  const auto g = load_graphs(c).front();
  const int n_sf = static_cast<int>(g.sf_nodes().size());
  c.budgets = {n_sf};
  c.strategies = {selection::Strategy::Centralized};
  const auto r = run_sweep(c);
  const auto& x = row(r, 0, "centralized", n_sf);
  EXPECT_DOUBLE_EQ(x.norm_delay, 1.0);
  EXPECT_DOUBLE_EQ(x.norm_throughput, 1.0);
  EXPECT_EQ(static_cast<int>(x.picks.size()), n_sf);
}

TEST(Sweep, ReferenceRowsAndRanges) {
  const auto r = run_sweep(small_config());
  for (int gi = 0; gi < 2; ++gi) {
    EXPECT_LE(reference(r, gi, "maxflow-routing").throughput, reference(r, gi, "maxflow-nc").throughput + 1e-9);
    EXPECT_DOUBLE_EQ(reference(r, gi, "all-nc").norm_delay, 1.0);
  }
  for (const auto& x : r.rows) {
    EXPECT_TRUE(x.error.empty()) << x.series << ": " << x.error;
    if (x.series == "all-nc" || x.series.rfind("maxflow", 0) == 0) continue;
    EXPECT_GE(x.norm_delay, 0.9) << x.series << ' ' << x.budget;
  }
}

TEST(Sweep, FailedCellsAreRecorded) {
  auto c = small_config();
  c.graphs = 1;
  c.budgets = {1};
  c.strategies = {selection::Strategy::Centralized};
  c.generation_size = 8;
  c.runs = 1;
  // a graph whose only client cannot be reached leaves every delay infinite
  OverlayGraph g;
  g.add_node({0, Role::Source, 4});
  g.add_node({1, Role::SF, 4});
  g.add_node({2, Role::Client, 4});
  g.add_edge({0, 1, 4, 0.0});
  const auto r = run_sweep(c, {g});
  EXPECT_FALSE(r.rows.empty());
  EXPECT_TRUE(std::isnan(row(r, 0, "centralized", 1).delay) || !row(r, 0, "centralized", 1).error.empty());
}

TEST(Sweep, Reproducible) {
  const auto c = small_config();
  std::ostringstream a, b;
  write_csv(a, run_sweep(c));
  write_csv(b, run_sweep(c));
  EXPECT_EQ(a.str(), b.str());
}

TEST(ResultsCsv, RoundTrip) {
  Results r;
  ResultRow x;
  x.graph = 3;
  x.series = "local-d2";
  x.budget = 2;
  x.nodes = 40;
  x.samples = 1;
  x.delay = 1.25;
  x.throughput = 80.5;
  x.norm_delay = 1.1;
  x.norm_throughput = 0.9;
  x.est_delay = 1.2;
  x.picks = {7, 12};
  r.rows.push_back(x);
  ResultRow y;
  y.graph = 3;
  y.series = "all-sf";
  y.error = "boom, with a comma";
  y.delay = std::numeric_limits<double>::infinity();
  r.rows.push_back(y);

  std::stringstream ss;
  write_csv(ss, r);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kResultsHeader);
  const auto back = read_csv(ss);
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].series, "local-d2");
  EXPECT_EQ(back.rows[0].picks, (std::vector<NodeId>{7, 12}));
  EXPECT_DOUBLE_EQ(back.rows[0].delay, 1.25);
  EXPECT_TRUE(std::isnan(back.rows[1].est_delay));
  EXPECT_TRUE(std::isinf(back.rows[1].delay));
  EXPECT_EQ(back.rows[1].error, "boom, with a comma");
}

TEST(ResultsCsv, RejectsWrongHeader) {
  std::istringstream in("graph,series\n0,x\n");
  EXPECT_THROW(read_csv(in), std::runtime_error);
}

TEST(Compare, IdenticalSeriesTie) {
  Results r;
  for (int g = 0; g < 3; ++g)
    for (int a = 1; a <= 2; ++a)
      for (const auto* s : {"centralized", "random"}) {
        ResultRow x;
        x.graph = g;
        x.series = s;
        x.budget = a;
        x.delay = 1.0 + g;
        r.rows.push_back(x);
      }
  const auto c = compare(r);
  for (const auto& v : c.versus_random) {
    EXPECT_EQ(v.ties, 3) << v.series;
    EXPECT_EQ(v.wins + v.losses, 0);
  }
}

TEST(Compare, CountsWinsAndAgreement) {
  Results r;
  auto add = [&](int g, const std::string& s, int a, double d, std::vector<NodeId> picks) {
    ResultRow x;
    x.graph = g;
    x.series = s;
    x.budget = a;
    x.delay = d;
    x.picks = std::move(picks);
    r.rows.push_back(x);
  };
  add(0, "random", 1, 2.0, {});
  add(0, "centralized", 1, 1.0, {5});
  add(0, "local-d3", 1, 3.0, {5});
  add(1, "random", 1, 2.0, {});
  add(1, "centralized", 1, 1.5, {4});
  add(1, "local-d3", 1, 1.5, {6});
  const auto c = compare(r);
  bool seen = false;
  for (const auto& v : c.versus_random)
    if (v.series == "centralized") {
      EXPECT_EQ(v.wins, 2);
      seen = true;
    } else if (v.series == "local-d3") {
      EXPECT_EQ(v.wins, 1);
      EXPECT_EQ(v.losses, 1);
    }
  EXPECT_TRUE(seen);
  ASSERT_EQ(c.agreement.size(), 1u);
  EXPECT_EQ(c.agreement[0].graphs, 2);
  EXPECT_EQ(c.agreement[0].first_pick_matches, 1);
  EXPECT_EQ(c.agreement[0].plan_matches, 1);

  std::ostringstream os;
  write_csv(os, c);
  EXPECT_EQ(os.str().rfind("kind,series,budget,wins,losses,ties,graphs,first_pick_matches,plan_matches\n", 0), 0u);
}

TEST(PlotData, EmptyResultsGiveHeaderOnlyFiles) {
  const auto dir = temp_dir("empty");
  const auto files = emit_plots_data(Results{}, dir);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(slurp(dir / "delay.csv"), "budget\n");
  EXPECT_EQ(slurp(dir / "throughput.csv"), "budget\n");
}

TEST(PlotData, OneRowPerBudget) {
  Results r;
  for (int a = 1; a <= 3; ++a) {
    ResultRow x;
    x.series = "centralized";
    x.budget = a;
    x.norm_delay = 1.0 + 0.1 * a;
    x.norm_throughput = 1.0 / x.norm_delay;
    r.rows.push_back(x);
  }
  ResultRow ref;
  ref.series = "all-nc";
  ref.norm_delay = 1.0;
  r.rows.push_back(ref);
  const auto dir = temp_dir("series");
  emit_plots_data(r, dir);
  EXPECT_EQ(slurp(dir / "delay.csv"), "budget,centralized\n1,1.1\n2,1.2\n3,1.3\n");
}
