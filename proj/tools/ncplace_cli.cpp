// ncplace: topology generation, delay estimation, NC placement, simulation
// and experiment sweeps from the command line.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncplace/harness.hpp"

using namespace ncplace;

namespace {

/// Writes to the named file, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<NodeId> parse_ids(const std::string& s) {
  std::vector<NodeId> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

const std::vector<std::string> kConfigKeys = {
    "topology", "graphs",          "topology_seed", "nodes",      "sources", "clients",  "parents",
    "loss",     "link_probability", "bandwidth_min", "bandwidth_max", "buffer", "min_nodes", "max_nodes",
    "generation_size", "packet_size", "budgets", "strategies", "radii", "seeds", "sim_seed",
    "runs",     "workers",         "output_dir"};

std::string flag_name(std::string key) {
  for (auto& ch : key)
    if (ch == '_') ch = '-';
  return "--" + key;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network coding node placement for overlay streaming"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random overlay topology");
  GenerateParams gp;
  std::uint64_t gen_seed = 1;
  double bw_min = 8.0, bw_max = 64.0, trace_scale = 1.0 / 200.0;
  std::string trace_file, gen_out;
  gen->add_option("-n,--nodes", gp.n_nodes, "Nodes before pruning")->capture_default_str();
  gen->add_option("--sources", gp.n_sources)->capture_default_str();
  gen->add_option("--clients", gp.n_clients)->capture_default_str();
  gen->add_option("--parents", gp.parents_per_node, "Parents drawn per node")->capture_default_str();
  gen->add_option("--loss", gp.loss_rate, "Per-link loss probability")->capture_default_str();
  gen->add_option("--link-probability", gp.link_probability, "Host pair connectivity")->capture_default_str();
  gen->add_option("--bandwidth-min", bw_min, "Packets/s")->capture_default_str();
  gen->add_option("--bandwidth-max", bw_max, "Packets/s")->capture_default_str();
  gen->add_option("--buffer", gp.buffer_capacity, "SF buffer capacity h")->capture_default_str();
  gen->add_option("--trace", trace_file, "Pairwise bandwidth matrix for adjacency and capacities");
  gen->add_option("--trace-scale", trace_scale, "Scale applied to trace bandwidths")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("-o,--output", gen_out, "Topology file (default stdout)");

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate per-client decoding delay");
  std::string est_topo, est_out;
  int est_g = 32;
  delay::EstimatorOptions est_opts;
  est->add_option("-t,--topology", est_topo)->required()->check(CLI::ExistingFile);
  est->add_option("-G,--generation-size", est_g)->capture_default_str();
  est->add_option("--max-iterations", est_opts.max_iterations)->capture_default_str();
  est->add_option("--tolerance", est_opts.tolerance)->capture_default_str();
  est->add_option("-o,--output", est_out, "CSV (default stdout)");

  // select
  auto* sel = app.add_subcommand("select", "Choose NC nodes");
  std::string sel_topo, sel_out, sel_strategy = "centralized";
  int sel_budget = 3, sel_radius = 3;
  std::uint64_t sel_seed = 1;
  selection::SelectionOptions sel_opts;
  sel->add_option("-t,--topology", sel_topo)->required()->check(CLI::ExistingFile);
  sel->add_option("-s,--strategy", sel_strategy, "centralized, local or random")
      ->check(CLI::IsMember({"centralized", "local", "random", "randsel"}))
      ->capture_default_str();
  sel->add_option("-A,--budget", sel_budget)->capture_default_str();
  sel->add_option("-d,--radius", sel_radius, "Neighborhood radius (local)")->capture_default_str();
  sel->add_option("--seed", sel_seed, "Seed (random)")->capture_default_str();
  sel->add_option("-G,--generation-size", sel_opts.generation_size)->capture_default_str();
  sel->add_flag("--early-stop", sel_opts.early_stop, "Stop when no candidate improves the estimate");
  sel->add_option("-o,--output", sel_out, "Plan CSV (default stdout)");

  // simulate
  auto* simc = app.add_subcommand("simulate", "Monte Carlo packet-level simulation");
  std::string sim_topo, sim_out, sim_nc, sim_trace;
  sim::SimOptions sim_opts;
  int sim_runs = 100;
  unsigned sim_workers = 0;
  simc->add_option("-t,--topology", sim_topo)->required()->check(CLI::ExistingFile);
  simc->add_option("-G,--generation-size", sim_opts.generation_size)->capture_default_str();
  simc->add_option("--packet-size", sim_opts.packet_size, "Payload bytes, 0 for coefficients only")
      ->capture_default_str();
  simc->add_option("--deadline", sim_opts.deadline, "Seconds, 0 for 50x the estimate")->capture_default_str();
  simc->add_option("--latency", sim_opts.latency, "Per-edge propagation delay")->capture_default_str();
  simc->add_option("--runs", sim_runs)->capture_default_str();
  simc->add_option("--seed", sim_opts.seed)->capture_default_str();
  simc->add_option("--workers", sim_workers, "0 uses every core")->capture_default_str();
  simc->add_option("--nc", sim_nc, "Comma-separated SF nodes to promote to NC first");
  simc->add_option("--trace-out", sim_trace, "Per-delivery trace of the first run (CSV)");
  simc->add_option("-o,--output", sim_out, "Summary CSV (default stdout)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a placement sweep from a config file");
  std::string sweep_config;
  std::map<std::string, std::string> overrides;
  sweep->add_option("-c,--config", sweep_config, "key = value file")->check(CLI::ExistingFile);
  for (const auto& key : kConfigKeys) sweep->add_option(flag_name(key), overrides[key], "Overrides '" + key + "'");

  // compare
  auto* cmp = app.add_subcommand("compare", "Summarize a sweep against the random baseline");
  std::string cmp_results, cmp_out, cmp_baseline = "random";
  cmp->add_option("-r,--results", cmp_results, "results.csv from sweep")->required()->check(CLI::ExistingFile);
  cmp->add_option("--baseline", cmp_baseline)->capture_default_str();
  cmp->add_option("-o,--output", cmp_out, "CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      gp.bandwidth = log_uniform_bandwidth(bw_min, bw_max);
      if (!trace_file.empty()) use_trace(gp, load_trace(trace_file), trace_scale);
      const auto g = generate(gp, gen_seed);
      Output out(gen_out);
      write_topology(out.stream(), g);
    } else if (*est) {
      const auto g = load(est_topo);
      const auto report = delay::estimate(g, est_g, est_opts);
      Output out(est_out);
      delay::write_csv(out.stream(), report);
      if (!report.converged) std::cerr << "warning: estimator stopped before converging\n";
    } else if (*sel) {
      const auto g = load(sel_topo);
      const auto strategy = *selection::parse_strategy(sel_strategy);
      selection::SelectionPlan plan;
      switch (strategy) {
        case selection::Strategy::Centralized: plan = selection::select_centralized(g, sel_budget, sel_opts); break;
        case selection::Strategy::Local: plan = selection::select_local(g, sel_budget, sel_radius, sel_opts); break;
        case selection::Strategy::Random: plan = selection::select_random(g, sel_budget, sel_seed, sel_opts); break;
      }
      Output out(sel_out);
      selection::write_csv(out.stream(), plan);
    } else if (*simc) {
      auto g = load(sim_topo);
      for (NodeId u : parse_ids(sim_nc)) g = selection::promote(g, u);
      if (!sim_trace.empty()) {
        auto o = sim_opts;
        o.record_trace = true;
        const auto r = sim::simulate(g, o);
        Output t(sim_trace);
        t.stream() << "time_seconds,from,to,wire_hex\n" << std::setprecision(10);
        for (const auto& rec : r.trace) {
          t.stream() << rec.time << ',' << rec.from << ',' << rec.to << ',';
          for (auto b : rec.wire) {
            char hex[3];
            std::snprintf(hex, sizeof hex, "%02x", b);
            t.stream() << hex;
          }
          t.stream() << '\n';
        }
      }
      const auto mc = sim::monte_carlo(g, sim_opts, static_cast<std::size_t>(sim_runs), sim_workers);
      Output out(sim_out);
      sim::write_csv(out.stream(), mc);
    } else if (*sweep) {
      harness::ExperimentConfig cfg;
      if (!sweep_config.empty()) cfg = harness::load_config(sweep_config);
      for (const auto& key : kConfigKeys)
        if (sweep->count(flag_name(key)) > 0) harness::set_option(cfg, key, overrides[key]);
      const auto results = harness::run_sweep(cfg);
      std::filesystem::create_directories(cfg.output_dir);
      const std::filesystem::path dir = cfg.output_dir;
      {
        std::ofstream os(dir / "results.csv");
        harness::write_csv(os, results);
      }
      {
        std::ofstream os(dir / "compare.csv");
        harness::write_csv(os, harness::compare(results));
      }
      harness::emit_plots_data(results, dir);
      int failed = 0;
      for (const auto& r : results.rows)
        if (!r.error.empty()) ++failed;
      std::cerr << "wrote " << results.rows.size() << " rows to " << dir.string();
      if (failed > 0) std::cerr << " (" << failed << " failed cells)";
      std::cerr << '\n';
    } else if (*cmp) {
      std::ifstream in(cmp_results);
      const auto results = harness::read_csv(in);
      Output out(cmp_out);
      harness::write_csv(out.stream(), harness::compare(results, cmp_baseline));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
