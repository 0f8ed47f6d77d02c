/*
 * PHY/MAC constants for 802.11ac (A-MPDU) and LTE-LAA, peak rate tables and
 * the burst-size arithmetic shared by the analytical model and the simulator.
 *
 * Durations are microseconds stored as double, rates are Mbps (numerically
 * bits per microsecond), sizes are bytes.
 */

#ifndef UNLSHARE_PARAMS_HPP
#define UNLSHARE_PARAMS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace unlshare {

using Micros = double;
using Mbps = double;

enum class Rat { WiFi, Laa };

enum class Regime { Coexistence, Dtm, Dfm, NoCoex };

/// How the PHY tail and pad bits of a PSDU are accounted for.
enum class TailPad {
  None,          ///< PSDU airtime taken as bits / rate
  SymbolAligned, ///< PSDU airtime rounded up to the next 4 us OFDM symbol
};

enum class MultichannelCca { TypeA1, TypeA2, TypeB };

std::string to_string(Rat rat);
std::string to_string(Regime regime);
std::string to_string(TailPad policy);
std::string to_string(MultichannelCca cca);

/// Contention window progression of one technology.
struct BackoffParams {
  int cw_min = 16;
  int cw_max = 1024;
  int max_retries = 7;
};

struct WifiMacProfile {
  Micros slot_time = 9.0;
  int aifsn = 2;
  Micros sifs = 16.0;
  Micros difs = 34.0;
  int cw_min = 16;
  int cw_max = 1024;
  int max_retries = 7;
  Mbps basic_rate = 6.0;
  Micros max_ppdu_duration = 5484.0;
  int ampdu_exp = 7;
  int max_mpdus = 64;
  Micros phy_header_time = 40.0;
  /// PHY preamble+header in front of the block ACK. The analytical preset
  /// leaves it at zero; the simulator preset uses the non-HT 20 us preamble.
  Micros response_phy_header_time = 0.0;
  int delimiter_bytes = 4;
  int mac_header_bytes = 34;
  int llc_header_bytes = 8;
  int payload_bytes = 1500;
  int block_ack_bytes = 32;
  Micros ack_timeout = 50.0;
  Micros beacon_interval = 102400.0;
  TailPad tail_pad = TailPad::SymbolAligned;

  BackoffParams backoff() const { return {cw_min, cw_max, max_retries}; }

  /// MAC header + LLC header + payload; the MPDU length of the A-MPDU limit.
  int mpdu_length() const { return mac_header_bytes + llc_header_bytes + payload_bytes; }

  /// One A-MPDU subframe on air: delimiter + MPDU.
  int subframe_bytes() const { return delimiter_bytes + mpdu_length(); }

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;
};

struct LaaClassProfile {
  int priority_class = 1;
  Micros slot_time = 9.0;
  Micros defer_base = 16.0; // T_f
  int defer_slots = 1;      // m_l
  int cw_min = 4;
  int cw_max = 16;
  int max_retries = 6;
  Micros txop_coexistence = 2000.0;
  Micros txop_exclusive = 2000.0;
  Micros laa_slot = 500.0;
  Micros gamma = 250.0;
  MultichannelCca multichannel_cca = MultichannelCca::TypeA2;

  BackoffParams backoff() const { return {cw_min, cw_max, max_retries}; }

  /// T_d = T_f + m_l * sigma.
  Micros defer_total() const { return defer_base + defer_slots * slot_time; }

  /// Class 4 may use the long TXOP only when it has the channel to itself.
  Micros txop(Regime regime) const
  {
    return regime == Regime::Coexistence ? txop_coexistence : txop_exclusive;
  }

  void validate() const;
};

/// Named presets: "table2-wifi" (analytical timing) and "sim-wifi" (same
/// parameters with a physical block-ACK preamble) for Wi-Fi.
WifiMacProfile wifi_preset(std::string_view name);

/// "table3-laa" (shared LAA parameters, class 1 backoff), "table4-class1",
/// "table5-class4".
LaaClassProfile laa_preset(std::string_view name);

std::vector<std::string> wifi_preset_names();
std::vector<std::string> laa_preset_names();

struct PhyRateTable {
  std::map<int, Mbps> wifi_rates;
  std::map<int, Mbps> laa_rates;

  static const PhyRateTable& standard();

  /// Least-squares slope (through the origin) of LAA rate vs carrier count.
  Mbps laa_per_carrier_rate() const;
};

/// Peak PHY rate of one technology over a channel of the given width.
/// Wi-Fi accepts 20/40/80/160 MHz; LAA accepts any positive multiple of
/// 20 MHz and extrapolates linearly past the table.
Mbps peak_phy_rate(Rat rat, int bandwidth_mhz);

/// Window size at retransmission stage `stage`: min(cw_min * 2^stage, cw_max).
/// Backoff counters are drawn uniformly from [0, window - 1].
int contention_window(const BackoffParams& backoff, int stage);

/// min(2^(13+exp) - 1, 64 * (mpdu_length + 4)) bytes.
std::int64_t ampdu_limit_bytes(int ampdu_exp, int mpdu_length);

/// Airtime of a raw bit payload after the tail/pad policy is applied.
Micros psdu_airtime(const WifiMacProfile& profile, double bits, Mbps rate);

/// PHY header + PSDU of an A-MPDU with `n_mpdus` subframes.
Micros data_ppdu_airtime(const WifiMacProfile& profile, int n_mpdus, Mbps rate);

/// Non-HT (legacy OFDM) PPDU: 20 us preamble+header, then SERVICE + PSDU +
/// tail bits in whole 4 us symbols. Used for control and management frames.
Micros non_ht_ppdu_airtime(int psdu_bytes, Mbps rate);

/// Block ACK response at the basic rate, including its PHY header.
Micros block_ack_airtime(const WifiMacProfile& profile);

/// Largest MPDU count whose A-MPDU respects the byte limit, the subframe
/// limit and min(max_ppdu_duration, duration_cap). Zero if none fits.
int max_mpdus_per_burst(const WifiMacProfile& profile, Mbps data_rate, Micros duration_cap);

} // namespace unlshare

#endif /* UNLSHARE_PARAMS_HPP */
