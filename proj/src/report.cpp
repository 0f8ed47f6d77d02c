#include "unlshare/report.hpp"

#include "unlshare/coex_model.hpp"
#include "unlshare/error.hpp"
#include "unlshare/share_calc.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace unlshare {

namespace {

constexpr int kWifiBandwidths[] = {20, 40, 80, 160};
constexpr int kDmaBandwidths[] = {40, 80, 160};
constexpr double kRatios[] = {0.25, 0.5, 0.75};
constexpr Micros kFixedWifiWindow = 5000.0;

LaaClassProfile laa_for_class(int laa_class)
{
  if (laa_class == 1)
    return laa_preset("table4-class1");
  if (laa_class == 4)
    return laa_preset("table5-class4");
  throw InvalidArgument("LAA class must be 1 or 4, got " + std::to_string(laa_class));
}

WifiMacProfile wifi_with_payload(int payload_bytes)
{
  WifiMacProfile w = wifi_preset("table2-wifi");
  w.payload_bytes = payload_bytes;
  w.validate();
  return w;
}

Mbps nc_wifi(int bandwidth, const WifiMacProfile& wifi)
{
  const auto s = CoexScenario::for_channel(wifi, laa_preset("table3-laa"), bandwidth, Regime::NoCoex);
  return capacity_no_coex(Rat::WiFi, s, s.wifi_duration_cap).value;
}

std::string csv_cell(const Cell& cell)
{
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos)
            return v;
          std::string quoted = "\"";
          for (char c : v) {
            if (c == '"')
              quoted += '"';
            quoted += c;
          }
          return quoted + '"';
        } else if constexpr (std::is_same_v<T, double>) {
          return fmt::format("{:.6f}", v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

nlohmann::json json_cell(const Cell& cell)
{
  return std::visit([](const auto& v) { return nlohmann::json(v); }, cell);
}

std::string ratio_label(double r)
{
  return fmt::format("{}", static_cast<int>(std::lround(r * 100)));
}

template <typename Run>
Mbps mean_over_seeds(const TableOptions& options, Run run)
{
  double sum = 0.0;
  for (auto seed : options.seeds)
    sum += run(seed);
  return sum / static_cast<double>(options.seeds.size());
}

std::string seed_comment(const TableOptions& options)
{
  std::string s = "simulation seeds:";
  for (auto seed : options.seeds)
    s += " " + std::to_string(seed);
  return s + fmt::format("; measured {} us after a 100000 us warm-up", options.measure_duration);
}

void check_seeds(const TableOptions& options)
{
  if (options.seeds.empty())
    throw InvalidArgument("at least one seed is needed");
  if (!(options.measure_duration > 0.0))
    throw InvalidArgument("measure duration must be positive");
}

} // namespace

std::size_t Table::column(const std::string& name) const
{
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end())
    throw InvalidArgument("no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

OutputFormat parse_output_format(const std::string& name)
{
  if (name == "csv")
    return OutputFormat::Csv;
  if (name == "json")
    return OutputFormat::Json;
  throw InvalidArgument("format must be csv or json, got '" + name + "'");
}

void write_csv(std::ostream& out, const Table& table)
{
  for (const auto& c : table.comments)
    out << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

void write_json(std::ostream& out, const Table& table)
{
  nlohmann::ordered_json doc;
  doc["comments"] = table.comments;
  doc["columns"] = table.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json rec;
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i)
      rec[table.columns[i]] = json_cell(row[i]);
    doc["rows"].push_back(rec);
  }
  out << doc.dump(2) << '\n';
}

void write_table(std::ostream& out, const Table& table, OutputFormat format)
{
  if (format == OutputFormat::Csv)
    write_csv(out, table);
  else
    write_json(out, table);
}

Table phy_rate_table()
{
  Table t;
  t.columns = {"technology", "bw20_mbps", "bw40_mbps", "bw60_mbps", "bw80_mbps", "bw100_mbps", "bw160_mbps"};
  const auto& rates = PhyRateTable::standard();
  for (const auto& [name, map] : {std::pair{"802.11ac", &rates.wifi_rates}, std::pair{"LTE LAA", &rates.laa_rates}}) {
    std::vector<Cell> row{std::string(name)};
    for (int bw : {20, 40, 60, 80, 100, 160}) {
      auto it = map->find(bw);
      row.emplace_back(it == map->end() ? Cell{std::string("-")} : Cell{it->second});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table nc_capacity_table(int payload_bytes)
{
  const auto wifi = wifi_with_payload(payload_bytes);
  Table t;
  t.comments = {fmt::format("no coexistence, AMPDU_exp = {}, payload = {} B", wifi.ampdu_exp, payload_bytes)};
  t.columns = {"bw20_mbps", "bw40_mbps", "bw80_mbps", "bw160_mbps"};
  std::vector<Cell> row;
  for (int bw : kWifiBandwidths)
    row.emplace_back(nc_wifi(bw, wifi));
  t.rows.push_back(std::move(row));
  return t;
}

Table best_dma_table()
{
  Table t;
  t.comments = {"T_wifi + T_laa = 10000 us, alpha = 0.5, payload = 1500 B",
                "c_w/c_l columns: recommended approach per class; dtm_/dfm_ columns: each approach"};
  t.columns = {"bw_mhz",          "wifi_ratio",          "c_w_class1_mbps",     "c_l_class1_mbps",
               "best_dma_class1", "c_w_class4_mbps",     "c_l_class4_mbps",     "best_dma_class4",
               "dtm_c_w_mbps",    "dtm_c_l_class1_mbps", "dtm_c_l_class4_mbps", "dfm_feasible",
               "dfm_c_w_mbps",    "dfm_c_l_class1_mbps", "dfm_c_l_class4_mbps"};
  const auto wifi = wifi_preset("table2-wifi");
  for (int bw : kDmaBandwidths) {
    for (double ratio : kRatios) {
      std::vector<Cell> row{std::int64_t{bw}, ratio};
      std::vector<BestDma> per_class;
      for (int cls : {1, 4}) {
        const auto s = CoexScenario::for_channel(wifi, laa_for_class(cls), bw);
        const auto best = best_dma(bw, ratio, 0.5, s);
        const CapacityReport& chosen = best.recommendation == Regime::Dfm ? *best.dfm : best.dtm;
        row.emplace_back(chosen.c_w);
        row.emplace_back(chosen.c_l);
        row.emplace_back(std::string(best.recommendation == Regime::Dfm ? "DFM" : "DTM"));
        per_class.push_back(best);
      }
      const BestDma& c1 = per_class[0];
      const BestDma& c4 = per_class[1];
      row.emplace_back(c1.dtm.c_w);
      row.emplace_back(c1.dtm.c_l);
      row.emplace_back(c4.dtm.c_l);
      row.emplace_back(!c1.dfm_infeasible);
      row.emplace_back(c1.dfm ? c1.dfm->c_w : 0.0);
      row.emplace_back(c1.dfm ? c1.dfm->c_l : 0.0);
      row.emplace_back(c4.dfm ? c4.dfm->c_l : 0.0);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table dfm_validation_table(const TableOptions& options)
{
  check_seeds(options);
  Table t;
  t.comments = {"DFM, AMPDU_exp = 7, payload = 1500 B", seed_comment(options)};
  t.columns = {"source", "bw20_mbps", "bw40_mbps", "bw80_mbps", "bw160_mbps"};
  std::vector<Cell> analytical{std::string("analytical")};
  std::vector<Cell> simulated{std::string("simulation")};
  const auto wifi = wifi_preset("table2-wifi");
  for (int bw : kWifiBandwidths) {
    analytical.emplace_back(nc_wifi(bw, wifi));
    simulated.emplace_back(mean_over_seeds(options, [&](std::uint64_t seed) {
      SimConfig c;
      c.seed = seed;
      c.bandwidth_mhz = bw;
      c.measure_duration = options.measure_duration;
      return run_dfm_simulation(c).wifi_throughput;
    }));
  }
  t.rows.push_back(std::move(analytical));
  t.rows.push_back(std::move(simulated));
  return t;
}

Table dtm_validation_table(const TableOptions& options)
{
  check_seeds(options);
  Table t;
  t.comments = {"DTM, T_wifi = 5000 us, AMPDU_exp = 7, payload = 1500 B", seed_comment(options)};
  t.columns = {"source", "bw_mhz"};
  for (double r : kRatios)
    t.columns.push_back("ratio" + ratio_label(r) + "_mbps");
  const auto wifi = wifi_preset("table2-wifi");
  for (int bw : kWifiBandwidths) {
    std::vector<Cell> analytical{std::string("analytical"), std::int64_t{bw}};
    std::vector<Cell> simulated{std::string("simulation"), std::int64_t{bw}};
    const auto s = CoexScenario::for_channel(wifi, laa_preset("table4-class1"), bw);
    for (double r : kRatios) {
      const auto schedule = DtmSchedule::from_wifi_window(kFixedWifiWindow, r);
      analytical.emplace_back(dtm_capacities(schedule, s).c_w);
      simulated.emplace_back(mean_over_seeds(options, [&](std::uint64_t seed) {
        SimConfig c;
        c.seed = seed;
        c.mode = SimMode::Dtm;
        c.bandwidth_mhz = bw;
        c.t_wifi = schedule.t_wifi;
        c.t_laa = schedule.t_laa;
        c.measure_duration = options.measure_duration;
        return run_dtm_simulation(c).wifi_throughput;
      }));
    }
    t.rows.push_back(std::move(analytical));
    t.rows.push_back(std::move(simulated));
  }
  return t;
}

Table make_table(int id, const TableOptions& options)
{
  switch (id) {
  case 1: return phy_rate_table();
  case 6: return nc_capacity_table(1500);
  case 7: return nc_capacity_table(15000);
  case 8: return best_dma_table();
  case 9: return dfm_validation_table(options);
  case 10: return dtm_validation_table(options);
  default: throw InvalidArgument("unsupported table " + std::to_string(id) + " (supported: 1, 6, 7, 8, 9, 10)");
  }
}

void SweepSpec::validate() const
{
  if (bandwidths.empty() || ratios.empty() || classes.empty() || payloads.empty() || regimes.empty())
    throw InvalidArgument("sweep axes must be non-empty");
  for (double r : ratios)
    if (r < 0.0 || r > 1.0)
      throw InvalidArgument("ratios must lie in [0, 1]");
  for (int c : classes)
    laa_for_class(c);
  for (int p : payloads)
    if (p <= 0)
      throw InvalidArgument("payloads must be positive");
  for (int bw : bandwidths)
    if (bw <= 0 || bw % 20 != 0)
      throw InvalidArgument("bandwidths must be positive multiples of 20 MHz");
  if (!(dtm_period > 0.0))
    throw InvalidArgument("DTM period must be positive");
  if (fixed_t_wifi && !(*fixed_t_wifi > 0.0))
    throw InvalidArgument("fixed Wi-Fi window must be positive");
  if (alpha < 0.0 || alpha > 1.0)
    throw InvalidArgument("alpha must be in [0, 1]");
}

Regime parse_regime(const std::string& name)
{
  if (name == "coex")
    return Regime::Coexistence;
  if (name == "dtm")
    return Regime::Dtm;
  if (name == "dfm")
    return Regime::Dfm;
  if (name == "nc")
    return Regime::NoCoex;
  throw InvalidArgument("regime must be one of coex, dtm, dfm, nc; got '" + name + "'");
}

Table capacity_sweep(const SweepSpec& spec)
{
  spec.validate();
  Table t;
  t.comments = {spec.fixed_t_wifi ? fmt::format("DTM with T_wifi = {} us", *spec.fixed_t_wifi)
                                  : fmt::format("DTM period T_wifi + T_laa = {} us", spec.dtm_period),
                fmt::format("alpha = {}", spec.alpha)};
  t.columns = {"bw_mhz", "wifi_ratio", "laa_class", "payload_bytes", "regime", "feasible",
               "c_w_mbps", "c_l_mbps", "aggregate_mbps", "note"};
  for (int bw : spec.bandwidths) {
    for (double ratio : spec.ratios) {
      for (int cls : spec.classes) {
        for (int payload : spec.payloads) {
          const auto wifi = wifi_with_payload(payload);
          const auto laa = laa_for_class(cls);
          for (Regime regime : spec.regimes) {
            CapacityReport rep;
            rep.alpha = spec.alpha;
            std::string note;
            bool feasible = true;
            try {
              const auto s = CoexScenario::for_channel(wifi, laa, bw, regime);
              switch (regime) {
              case Regime::Dtm: {
                const auto sched = spec.fixed_t_wifi ? DtmSchedule::from_wifi_window(*spec.fixed_t_wifi, ratio)
                                                     : DtmSchedule::from_period(spec.dtm_period, ratio);
                rep = dtm_capacities(sched, s);
                break;
              }
              case Regime::Dfm: rep = dfm_capacities(dfm_partition(bw, ratio), s); break;
              case Regime::Coexistence: rep = coexistence_capacities(s); break;
              case Regime::NoCoex: {
                const auto w = capacity_no_coex(Rat::WiFi, s, s.wifi_duration_cap);
                const auto l = capacity_no_coex(Rat::Laa, s, s.laa_txop);
                rep.c_w = w.value;
                rep.c_l = l.value;
                note = "each network alone on the full channel";
                break;
              }
              }
              rep.alpha = spec.alpha;
            } catch (const Error& e) {
              feasible = false;
              rep = CapacityReport{};
              rep.alpha = spec.alpha;
              note = e.what();
            }
            t.rows.push_back({std::int64_t{bw}, ratio, std::int64_t{cls}, std::int64_t{payload}, to_string(regime),
                              feasible, rep.c_w, rep.c_l, rep.aggregated(), note});
          }
        }
      }
    }
  }
  return t;
}

Table usage_sweep(const std::vector<Micros>& combined_windows, Micros downtime)
{
  Table t;
  t.comments = {fmt::format("downtime = {} us", downtime)};
  t.columns = {"combined_window_us", "usage"};
  for (Micros w : combined_windows)
    t.rows.push_back({w, effective_channel_usage(w, downtime)});
  return t;
}

Table windowing_sweep(int bandwidth_mhz, int laa_class, double wifi_ratio, const std::vector<Micros>& t_wifi_values,
                      int payload_bytes)
{
  const auto s = CoexScenario::for_channel(wifi_with_payload(payload_bytes), laa_for_class(laa_class), bandwidth_mhz,
                                           Regime::Dtm);
  Table t;
  t.comments = {fmt::format("{} MHz, LAA class {}, Wi-Fi ratio {}", bandwidth_mhz, laa_class, wifi_ratio)};
  t.columns = {"t_wifi_us", "t_laa_us", "wifi_windowing_ratio", "laa_windowing_ratio"};
  const Mbps nc_w = capacity_no_coex(Rat::WiFi, s, s.wifi_duration_cap).value;
  const Mbps nc_l = capacity_no_coex(Rat::Laa, s, s.laa_txop).value;
  for (Micros tw : t_wifi_values) {
    const auto sched = DtmSchedule::from_wifi_window(tw, wifi_ratio);
    const auto rep = dtm_capacities(sched, s);
    const Micros total = sched.t_wifi + sched.t_laa + sched.t_downtime * std::max(1, sched.reservations());
    const double w = nc_w > 0 ? rep.c_w / (nc_w * sched.t_wifi / total) : 0.0;
    const double l = (nc_l > 0 && sched.t_laa > 0) ? rep.c_l / (nc_l * sched.t_laa / total) : 0.0;
    t.rows.push_back({tw, sched.t_laa, w, l});
  }
  return t;
}

Table optimize_table(int bandwidth_mhz, double wifi_ratio, int laa_class, double alpha, int payload_bytes,
                     Micros dtm_period)
{
  const auto s = CoexScenario::for_channel(wifi_with_payload(payload_bytes), laa_for_class(laa_class), bandwidth_mhz);
  const auto best = best_dma(bandwidth_mhz, wifi_ratio, alpha, s, dtm_period);
  Table t;
  t.comments = {fmt::format("DTM period = {} us, payload = {} B", dtm_period, payload_bytes)};
  t.columns = {"bw_mhz", "wifi_ratio", "laa_class", "alpha", "best_dma", "tie",
               "dtm_c_w_mbps", "dtm_c_l_mbps", "dtm_aggregate_mbps", "dfm_feasible",
               "dfm_c_w_mbps", "dfm_c_l_mbps", "dfm_aggregate_mbps"};
  const CapacityReport dfm = best.dfm.value_or(CapacityReport{});
  t.rows.push_back({std::int64_t{bandwidth_mhz}, wifi_ratio, std::int64_t{laa_class}, alpha,
                    std::string(best.recommendation == Regime::Dfm ? "DFM" : "DTM"), best.tie, best.dtm.c_w,
                    best.dtm.c_l, best.dtm.aggregated(), !best.dfm_infeasible, dfm.c_w, dfm.c_l,
                    best.dfm ? dfm.aggregated() : 0.0});
  return t;
}

Table sim_result_table(const SimConfig& config, const SimResult& result)
{
  Table t;
  t.comments = {fmt::format("seed = {}", config.seed),
                fmt::format("mode = {}, bandwidth = {} MHz, payload = {} B", to_string(config.mode),
                            config.bandwidth_mhz, config.wifi.payload_bytes)};
  if (config.mode == SimMode::Dtm)
    t.comments.push_back(fmt::format("t_wifi = {} us, t_laa = {} us", config.t_wifi, config.t_laa));
  t.columns = {"seed",          "mode",         "bw_mhz",         "wifi_throughput_mbps", "laa_throughput_mbps",
               "data_bursts",   "mpdus",        "cts_sent",       "beacons",              "window_overruns",
               "wifi_windows",  "nav_silenced_us", "wifi_window_time_us", "wifi_airtime_us"};
  t.rows.push_back({static_cast<std::int64_t>(config.seed), to_string(config.mode),
                    std::int64_t{config.bandwidth_mhz}, result.wifi_throughput, result.laa_airtime_throughput,
                    result.data_bursts, result.mpdus_delivered, result.cts_sent, result.beacons,
                    result.window_overruns, result.wifi_windows, result.nav_silenced, result.wifi_window_time,
                    result.wifi_airtime});
  return t;
}

} // namespace unlshare
