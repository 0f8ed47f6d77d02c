/*
 * Dynamic time multiplexing (DTM: CTS-to-self reservations alternate Wi-Fi
 * and LAA windows) and dynamic frequency multiplexing (DFM: the channel is
 * split into a Wi-Fi sub-band and LAA carriers) arithmetic, plus the
 * selection of the better of the two for a bandwidth and sharing ratio.
 */

#ifndef UNLSHARE_SHARE_CALC_HPP
#define UNLSHARE_SHARE_CALC_HPP

#include "unlshare/coex_model.hpp"
#include "unlshare/params.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace unlshare {

/// Longest reservation a single CTS duration field can carry.
inline constexpr Micros kMaxCtsReservation = 32767.0;

/// Allowed LAA partial-subframe lengths.
inline constexpr double kPartialSubframes[] = {0.0,    214.29, 428.57, 500.0, 642.86,
                                               714.29, 785.71, 857.14, 1000.0};

/// SIFS + non-HT CTS at `basic_rate` (preamble, header, PSDU+tail in whole
/// 4 us symbols). 60 us at 6 Mbps.
Micros cts_downtime(Mbps basic_rate, Micros sifs = 16.0);

/// CTS airtime alone, i.e. cts_downtime() without the SIFS wait.
Micros cts_airtime(Mbps basic_rate);

/// combined / (combined + downtime). Throws for non-positive windows.
double effective_channel_usage(Micros combined_window, Micros downtime = 60.0);

struct WindowBounds {
  Micros t_min = 0.0;
  Micros t_max = 0.0;
};

/// Minimum Wi-Fi window (DIFS + CW * sigma) and the longest extension an
/// A-MPDU started at the last instant can produce. `mpdu_length` defaults
/// to the profile's MAC+LLC+payload.
WindowBounds wifi_window_bounds(const WifiMacProfile& profile, Micros t_wifi, Mbps data_rate,
                                std::optional<int> mpdu_length = std::nullopt);

/// Gamma' + n_slots * T_LAAslot + partial_k.
Micros laa_window_length(Micros gamma_prime, int n_slots, Micros partial_k, Micros laa_slot = 500.0);

/// Mean uncontended channel access time: DIFS + sigma (CW_min - 1) / 2.
Micros wifi_access_time(const WifiMacProfile& profile);

/// T_d + sigma (CW_min - 1) / 2 + Gamma.
Micros laa_access_time(const LaaClassProfile& profile);

/// TXOP used to pack Wi-Fi bursts into a window: airtime of one maximal
/// A-MPDU at the scenario rate.
Micros wifi_window_txop(const CoexScenario& scenario);

/// Capacity inside a window of length `window`, packing bursts of
/// `txop + access` back to back and a shortened burst in the remainder.
/// `nc` maps a burst duration cap to the stand-alone capacity.
Mbps windowed_capacity(Micros window, Micros txop, Micros access,
                       const std::function<Mbps(Micros)>& nc);

Mbps windowed_capacity(Rat rat, Micros window, const CoexScenario& scenario);

struct DtmSchedule {
  Micros t_wifi = 0.0;
  Micros t_laa = 0.0;
  Micros t_downtime = 60.0;

  double sharing_ratio() const { return t_wifi / (t_wifi + t_laa); }

  /// Number of CTS reservations needed to cover the LAA window.
  int reservations() const;

  void validate() const;

  /// Windows that split `period` (excluding downtime) by `wifi_ratio`.
  static DtmSchedule from_period(Micros period, double wifi_ratio, Micros downtime = 60.0);

  /// Fixed Wi-Fi window; the LAA window follows from the ratio.
  static DtmSchedule from_wifi_window(Micros t_wifi, double wifi_ratio, Micros downtime = 60.0);
};

struct DfmPartition {
  std::vector<int> wifi_subchannels;
  int laa_carriers = 0;

  int wifi_bandwidth() const;
  int laa_bandwidth() const { return 20 * laa_carriers; }
};

struct CapacityReport {
  Regime regime = Regime::NoCoex;
  Mbps c_w = 0.0;
  Mbps c_l = 0.0;
  double alpha = 0.5;
  int bandwidth_mhz = 0;
  double wifi_ratio = 0.0;
  int laa_class = 0;

  /// 2 (alpha C_w + (1 - alpha) C_l), i.e. C_w + C_l at alpha = 0.5.
  Mbps aggregated() const { return 2.0 * (alpha * c_w + (1.0 - alpha) * c_l); }
};

/// Base scenario with the given regime's LAA TXOP applied.
CoexScenario scenario_for_regime(const CoexScenario& base, Regime regime);

CapacityReport dtm_capacities(const DtmSchedule& schedule, const CoexScenario& scenario);

/// Greedy largest-first split of the Wi-Fi share into 160/80/40/20 MHz
/// channels; the rest becomes 20 MHz LAA carriers.
DfmPartition dfm_partition(int channel_bw, double wifi_ratio);

CapacityReport dfm_capacities(const DfmPartition& partition, const CoexScenario& scenario);

/// Direct coexistence on the whole channel, for comparison.
CapacityReport coexistence_capacities(const CoexScenario& scenario);

struct BestDma {
  Regime recommendation = Regime::Dtm;
  CapacityReport dtm;
  std::optional<CapacityReport> dfm;
  bool dfm_infeasible = false;
  bool tie = false;
};

/// argmax over {DTM, DFM} of the aggregated capacity; DTM windows split
/// `dtm_period` by `wifi_ratio`. Ties go to DFM.
BestDma best_dma(int channel_bw, double wifi_ratio, double alpha, const CoexScenario& scenario,
                 Micros dtm_period = 10000.0);

} // namespace unlshare

#endif /* UNLSHARE_SHARE_CALC_HPP */
