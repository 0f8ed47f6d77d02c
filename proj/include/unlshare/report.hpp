/*
 * Tabular reproductions of the capacity tables, sweep grids for the figure
 * data, and CSV/JSON writers. Every table is a flat list of records with
 * unit-suffixed column names; CSV and JSON carry the same records.
 */

#ifndef UNLSHARE_REPORT_HPP
#define UNLSHARE_REPORT_HPP

#include "unlshare/mac_sim.hpp"
#include "unlshare/params.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace unlshare {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
  std::vector<std::string> comments; ///< written as leading "# " lines in CSV
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Index of a column; throws InvalidArgument when absent.
  std::size_t column(const std::string& name) const;
};

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(const std::string& name);

/// Doubles are printed with six decimals so reruns are byte-identical.
void write_csv(std::ostream& out, const Table& table);

/// {"comments": [...], "columns": [...], "rows": [{column: value, ...}]}
void write_json(std::ostream& out, const Table& table);

void write_table(std::ostream& out, const Table& table, OutputFormat format);

struct TableOptions {
  std::vector<std::uint64_t> seeds{kDefaultSeed};
  Micros measure_duration = 10e6;
};

inline constexpr int kSupportedTables[] = {1, 6, 7, 8, 9, 10};

/// Peak PHY rates per technology and bandwidth.
Table phy_rate_table();

/// Stand-alone Wi-Fi capacity at 20/40/80/160 MHz for one payload size.
Table nc_capacity_table(int payload_bytes);

/// best_dma over the 40/80/160 MHz x {25, 50, 75}% Wi-Fi grid, 10 ms DTM
/// period, for both LAA classes.
Table best_dma_table();

/// DFM Wi-Fi capacity: analytical row and simulated row (mean over seeds).
Table dfm_validation_table(const TableOptions& options);

/// DTM Wi-Fi capacity with a 5 ms Wi-Fi window: analytical and simulated
/// rows per bandwidth, columns for 25/50/75% Wi-Fi.
Table dtm_validation_table(const TableOptions& options);

/// Dispatch by table id; throws InvalidArgument for unsupported ids.
Table make_table(int id, const TableOptions& options);

struct SweepSpec {
  std::vector<int> bandwidths{80};
  std::vector<double> ratios{0.25, 0.5, 0.75};
  std::vector<int> classes{1};
  std::vector<int> payloads{1500};
  std::vector<Regime> regimes{Regime::Dtm, Regime::Dfm, Regime::Coexistence};
  Micros dtm_period = 10000.0;
  std::optional<Micros> fixed_t_wifi; ///< overrides dtm_period when set
  double alpha = 0.5;

  void validate() const;
};

Regime parse_regime(const std::string& name);

/// One row per (bandwidth, ratio, class, payload, regime). Grid points a
/// regime cannot serve are kept with feasible = false and zero capacities.
Table capacity_sweep(const SweepSpec& spec);

/// Effective channel usage versus the combined DTM window.
Table usage_sweep(const std::vector<Micros>& combined_windows, Micros downtime = 60.0);

/// Fraction of the stand-alone capacity each technology keeps under DTM
/// relative to its time share: C_x^DTM / (C_x^NC(TXOP_x) T_x / (T_w + T_l + downtime)).
Table windowing_sweep(int bandwidth_mhz, int laa_class, double wifi_ratio, const std::vector<Micros>& t_wifi_values,
                      int payload_bytes = 1500);

/// best_dma for one configuration, as a one-row table.
Table optimize_table(int bandwidth_mhz, double wifi_ratio, int laa_class, double alpha, int payload_bytes = 1500,
                     Micros dtm_period = 10000.0);

/// SimResult counters and throughputs as a one-row table; the seed is
/// echoed in a comment.
Table sim_result_table(const SimConfig& config, const SimResult& result);

} // namespace unlshare

#endif /* UNLSHARE_REPORT_HPP */
