#include "unlshare/params.hpp"

#include "unlshare/error.hpp"

#include <algorithm>
#include <cmath>

namespace unlshare {

namespace {

constexpr Micros kOfdmSymbol = 4.0;

bool is_power_of_two(int v)
{
  return v > 0 && (v & (v - 1)) == 0;
}

void require(bool ok, const std::string& what)
{
  if (!ok)
    throw InvalidArgument(what);
}

} // namespace

std::string to_string(Rat rat)
{
  return rat == Rat::WiFi ? "wifi" : "laa";
}

std::string to_string(Regime regime)
{
  switch (regime) {
  case Regime::Coexistence: return "coex";
  case Regime::Dtm: return "dtm";
  case Regime::Dfm: return "dfm";
  case Regime::NoCoex: return "nc";
  }
  return "?";
}

std::string to_string(TailPad policy)
{
  return policy == TailPad::None ? "none" : "symbol";
}

std::string to_string(MultichannelCca cca)
{
  switch (cca) {
  case MultichannelCca::TypeA1: return "A1";
  case MultichannelCca::TypeA2: return "A2";
  case MultichannelCca::TypeB: return "B";
  }
  return "?";
}

void WifiMacProfile::validate() const
{
  require(slot_time > 0 && sifs > 0 && difs > 0, "wifi: timing values must be positive");
  require(aifsn > 0, "wifi: AIFSN must be positive");
  require(std::abs(difs - (sifs + aifsn * slot_time)) < 1e-9, "wifi: DIFS must equal SIFS + AIFSN * sigma");
  require(is_power_of_two(cw_min) && is_power_of_two(cw_max), "wifi: CW bounds must be powers of two");
  require(cw_min <= cw_max, "wifi: CW_min must not exceed CW_max");
  require(max_retries >= 0, "wifi: M_w must be non-negative");
  require(basic_rate > 0, "wifi: BR must be positive");
  require(max_ppdu_duration > 0, "wifi: max PPDU duration must be positive");
  require(ampdu_exp >= 0 && ampdu_exp <= 7, "wifi: AMPDU_exp must be in [0, 7]");
  require(max_mpdus > 0 && max_mpdus <= 64, "wifi: N_w must be in [1, 64]");
  require(phy_header_time > 0, "wifi: T_PHY must be positive");
  require(response_phy_header_time >= 0, "wifi: response PHY header must be non-negative");
  require(delimiter_bytes > 0 && mac_header_bytes > 0 && llc_header_bytes > 0 && payload_bytes > 0
              && block_ack_bytes > 0,
          "wifi: frame sizes must be positive");
  require(ack_timeout > 0, "wifi: ACK_Tout must be positive");
  require(beacon_interval > 0, "wifi: beacon interval must be positive");
}

void LaaClassProfile::validate() const
{
  require(slot_time > 0 && defer_base > 0, "laa: timing values must be positive");
  require(defer_slots >= 0, "laa: m_l must be non-negative");
  require(cw_min > 0 && cw_min <= cw_max, "laa: need 0 < CW_min <= CW_max");
  require(max_retries >= 0, "laa: M_l must be non-negative");
  require(txop_coexistence > 0 && txop_exclusive > 0, "laa: TXOP must be positive");
  require(laa_slot > 0, "laa: slot length must be positive");
  require(std::abs(gamma - laa_slot / 2.0) < 1e-9, "laa: Gamma must equal T_LAAslot / 2");
}

WifiMacProfile wifi_preset(std::string_view name)
{
  WifiMacProfile p;
  if (name == "table2-wifi")
    return p;
  if (name == "sim-wifi") {
    p.response_phy_header_time = 20.0;
    return p;
  }
  throw InvalidArgument("unknown Wi-Fi preset '" + std::string(name) + "'");
}

LaaClassProfile laa_preset(std::string_view name)
{
  LaaClassProfile p;
  if (name == "table3-laa" || name == "table4-class1")
    return p;
  if (name == "table5-class4") {
    p.priority_class = 4;
    p.defer_slots = 7;
    p.cw_min = 16;
    p.cw_max = 1024;
    p.max_retries = 10;
    p.txop_coexistence = 8000.0;
    p.txop_exclusive = 10000.0;
    return p;
  }
  throw InvalidArgument("unknown LAA preset '" + std::string(name) + "'");
}

std::vector<std::string> wifi_preset_names()
{
  return {"table2-wifi", "sim-wifi"};
}

std::vector<std::string> laa_preset_names()
{
  return {"table3-laa", "table4-class1", "table5-class4"};
}

const PhyRateTable& PhyRateTable::standard()
{
  static const PhyRateTable table{
      {{20, 86.7}, {40, 200.0}, {80, 433.3}, {160, 866.7}},
      {{20, 75.4}, {40, 150.8}, {60, 226.1}, {80, 301.5}, {100, 376.9}},
  };
  return table;
}

Mbps PhyRateTable::laa_per_carrier_rate() const
{
  double num = 0.0;
  double den = 0.0;
  for (const auto& [bw, rate] : laa_rates) {
    const double carriers = bw / 20.0;
    num += carriers * rate;
    den += carriers * carriers;
  }
  return num / den;
}

Mbps peak_phy_rate(Rat rat, int bandwidth_mhz)
{
  const auto& table = PhyRateTable::standard();
  if (rat == Rat::WiFi) {
    auto it = table.wifi_rates.find(bandwidth_mhz);
    if (it == table.wifi_rates.end())
      throw InvalidArgument("unsupported Wi-Fi bandwidth " + std::to_string(bandwidth_mhz) + " MHz");
    return it->second;
  }
  if (bandwidth_mhz <= 0 || bandwidth_mhz % 20 != 0)
    throw InvalidArgument("LAA bandwidth must be a positive multiple of 20 MHz, got "
                          + std::to_string(bandwidth_mhz));
  auto it = table.laa_rates.find(bandwidth_mhz);
  if (it != table.laa_rates.end())
    return it->second;
  return (bandwidth_mhz / 20) * table.laa_per_carrier_rate();
}

int contention_window(const BackoffParams& backoff, int stage)
{
  if (stage < 0)
    throw InvalidArgument("retransmission stage must be non-negative");
  std::int64_t cw = backoff.cw_min;
  for (int r = 0; r < stage && cw < backoff.cw_max; ++r)
    cw *= 2;
  return static_cast<int>(std::min<std::int64_t>(cw, backoff.cw_max));
}

std::int64_t ampdu_limit_bytes(int ampdu_exp, int mpdu_length)
{
  if (ampdu_exp < 0 || ampdu_exp > 7)
    throw InvalidArgument("AMPDU_exp must be in [0, 7]");
  if (mpdu_length <= 0)
    throw InvalidArgument("MPDU length must be positive");
  const std::int64_t exp_limit = (std::int64_t{1} << (13 + ampdu_exp)) - 1;
  const std::int64_t block_limit = 64 * (std::int64_t{mpdu_length} + 4);
  return std::min(exp_limit, block_limit);
}

Micros psdu_airtime(const WifiMacProfile& profile, double bits, Mbps rate)
{
  const Micros raw = bits / rate;
  if (profile.tail_pad == TailPad::None)
    return raw;
  // Small slack so exact symbol multiples are not bumped by rounding noise.
  return std::ceil(raw / kOfdmSymbol - 1e-9) * kOfdmSymbol;
}

Micros data_ppdu_airtime(const WifiMacProfile& profile, int n_mpdus, Mbps rate)
{
  const double bits = 8.0 * n_mpdus * profile.subframe_bytes();
  return profile.phy_header_time + psdu_airtime(profile, bits, rate);
}

Micros non_ht_ppdu_airtime(int psdu_bytes, Mbps rate)
{
  if (rate <= 0)
    throw InvalidArgument("rate must be positive");
  const double bits = 16.0 + 8.0 * psdu_bytes + 6.0;
  const double symbols = std::ceil(bits / (rate * kOfdmSymbol) - 1e-12);
  return 20.0 + symbols * kOfdmSymbol;
}

Micros block_ack_airtime(const WifiMacProfile& profile)
{
  return profile.response_phy_header_time
         + psdu_airtime(profile, 8.0 * profile.block_ack_bytes, profile.basic_rate);
}

int max_mpdus_per_burst(const WifiMacProfile& profile, Mbps data_rate, Micros duration_cap)
{
  if (data_rate <= 0)
    throw InvalidArgument("data rate must be positive");
  const Micros limit = std::min(profile.max_ppdu_duration, duration_cap);
  const std::int64_t byte_limit = ampdu_limit_bytes(profile.ampdu_exp, profile.mpdu_length());

  // Airtime is monotone in N, so the count can be bounded from above
  // analytically and then settled against the exact (padded) airtime.
  int n = std::min<std::int64_t>(profile.max_mpdus, byte_limit / profile.subframe_bytes());
  const double per_mpdu = 8.0 * profile.subframe_bytes() / data_rate;
  const double by_time = std::floor((limit - profile.phy_header_time) / per_mpdu + 1e-9);
  if (by_time < n)
    n = by_time < 0 ? 0 : static_cast<int>(by_time);
  while (n > 0 && data_ppdu_airtime(profile, n, data_rate) > limit + 1e-9)
    --n;
  return n;
}

} // namespace unlshare
