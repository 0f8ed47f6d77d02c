// unlshare: reproduce the capacity tables, run sweeps and simulations.

#include "unlshare/error.hpp"
#include "unlshare/mac_sim.hpp"
#include "unlshare/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace unlshare;

namespace {

// Writes to `path`, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush())
    throw Error("write to '" + path + "' failed");
}

std::string render(const Table& t, const std::string& format)
{
  std::ostringstream os;
  write_table(os, t, parse_output_format(format));
  return os.str();
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Wi-Fi / LAA spectrum sharing calculator and MAC simulator"};
  app.require_subcommand(1);

  std::string out;
  std::string format = "csv";
  auto add_output = [&](CLI::App* cmd) {
    cmd->add_option("--out,-o", out, "output file (default stdout)");
    cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  // table
  auto* table = app.add_subcommand("table", "reproduce one of the capacity tables");
  int table_id = 0;
  std::vector<std::uint64_t> table_seeds;
  double table_measure = 10e6;
  table->add_option("id", table_id, "table id: 1, 6, 7, 8, 9 or 10")->required();
  table->add_option("--seed", table_seeds, "simulation seed(s) for tables 9 and 10; results are averaged");
  table->add_option("--measure", table_measure, "simulated measurement time in us");
  add_output(table);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "evaluate a parameter grid");
  std::string sweep_kind = "capacity";
  SweepSpec spec;
  std::vector<std::string> regimes{"dtm", "dfm", "coex"};
  double t_wifi = 0.0;
  std::vector<double> windows;
  sweep->add_option("kind", sweep_kind, "capacity, usage or windowing")
      ->check(CLI::IsMember({"capacity", "usage", "windowing"}));
  sweep->add_option("--bandwidth", spec.bandwidths, "channel bandwidths in MHz")->delimiter(',');
  sweep->add_option("--ratio", spec.ratios, "Wi-Fi sharing ratios")->delimiter(',');
  sweep->add_option("--class", spec.classes, "LAA priority classes (1, 4)")->delimiter(',');
  sweep->add_option("--payload", spec.payloads, "MPDU payloads in bytes")->delimiter(',');
  sweep->add_option("--regime", regimes, "coex, dtm, dfm, nc")->delimiter(',');
  sweep->add_option("--period", spec.dtm_period, "DTM period T_wifi + T_laa in us");
  sweep->add_option("--t-wifi", t_wifi, "fixed Wi-Fi window in us (overrides --period)");
  sweep->add_option("--alpha", spec.alpha, "Wi-Fi weight of the aggregate");
  sweep->add_option("--window", windows, "window lengths in us (usage: combined window, windowing: T_wifi)")
      ->delimiter(',');
  add_output(sweep);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run the MAC simulator");
  std::string sim_config_path;
  std::string trace_path;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--config,-c", sim_config_path, "simulation config (YAML)")->required();
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "override the config seed");
  simulate->add_option("--trace", trace_path, "write the frame trace to this file");
  add_output(simulate);

  // optimize
  auto* optimize = app.add_subcommand("optimize", "pick DTM or DFM for one configuration");
  int opt_bw = 80;
  double opt_ratio = 0.5;
  int opt_class = 1;
  double opt_alpha = 0.5;
  int opt_payload = 1500;
  double opt_period = 10000.0;
  optimize->add_option("--bandwidth", opt_bw, "channel bandwidth in MHz");
  optimize->add_option("--ratio", opt_ratio, "Wi-Fi sharing ratio");
  optimize->add_option("--class", opt_class, "LAA priority class (1, 4)");
  optimize->add_option("--alpha", opt_alpha, "Wi-Fi weight of the aggregate");
  optimize->add_option("--payload", opt_payload, "MPDU payload in bytes");
  optimize->add_option("--period", opt_period, "DTM period in us");
  add_output(optimize);

  CLI11_PARSE(app, argc, argv);

  try {
    if (table->parsed()) {
      TableOptions opts;
      if (!table_seeds.empty())
        opts.seeds = table_seeds;
      else
        opts.seeds = {default_seed()};
      opts.measure_duration = table_measure;
      emit(out, render(make_table(table_id, opts), format));
    } else if (sweep->parsed()) {
      Table t;
      if (sweep_kind == "capacity") {
        spec.regimes.clear();
        for (const auto& r : regimes)
          spec.regimes.push_back(parse_regime(r));
        if (t_wifi > 0.0)
          spec.fixed_t_wifi = t_wifi;
        t = capacity_sweep(spec);
      } else if (sweep_kind == "usage") {
        if (windows.empty())
          for (double w = 500.0; w <= 20000.0; w += 500.0)
            windows.push_back(w);
        t = usage_sweep(windows);
      } else {
        if (windows.empty())
          windows = {1000, 2000, 5000, 10000, 20000};
        t = windowing_sweep(spec.bandwidths.front(), spec.classes.front(), spec.ratios.front(), windows,
                            spec.payloads.front());
      }
      emit(out, render(t, format));
    } else if (simulate->parsed()) {
      SimConfig cfg = parse_sim_config(read_file(sim_config_path));
      if (*seed_opt)
        cfg.seed = sim_seed;
      if (!trace_path.empty())
        cfg.record_trace = true;
      const SimResult res = run_simulation(cfg);
      emit(out, render(sim_result_table(cfg, res), format));
      if (!trace_path.empty()) {
        std::ostringstream os;
        write_trace(os, res.trace);
        emit(trace_path, os.str());
      }
    } else if (optimize->parsed()) {
      emit(out, render(optimize_table(opt_bw, opt_ratio, opt_class, opt_alpha, opt_payload, opt_period), format));
    }
  } catch (const std::exception& e) {
    std::cerr << "unlshare: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
