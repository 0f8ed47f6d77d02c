#include "unlshare/share_calc.hpp"

#include "unlshare/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace unlshare {

namespace {

// Non-HT PHY: L-STF (10 x 0.8 us) + L-LTF (2 x 4 us), L-SIG one symbol.
constexpr Micros kNonHtPreamble = 10 * 0.8 + 2 * 4.0;
constexpr Micros kNonHtHeader = 4.0;
constexpr Micros kSymbol = 4.0;
constexpr int kServiceBits = 16;
constexpr int kCtsBits = 112;
constexpr int kTailBits = 6;

} // namespace

Micros cts_airtime(Mbps basic_rate)
{
  if (basic_rate <= 0)
    throw InvalidArgument("basic rate must be positive");
  const double bits_per_symbol = basic_rate * kSymbol;
  const double symbols = std::ceil((kServiceBits + kCtsBits + kTailBits) / bits_per_symbol - 1e-12);
  return kNonHtPreamble + kNonHtHeader + symbols * kSymbol;
}

Micros cts_downtime(Mbps basic_rate, Micros sifs)
{
  return sifs + cts_airtime(basic_rate);
}

double effective_channel_usage(Micros combined_window, Micros downtime)
{
  if (!(combined_window > 0.0))
    throw InvalidArgument("combined window must be positive");
  return combined_window / (combined_window + downtime);
}

WindowBounds wifi_window_bounds(const WifiMacProfile& profile, Micros t_wifi, Mbps data_rate,
                                std::optional<int> mpdu_length)
{
  if (data_rate <= 0)
    throw InvalidArgument("data rate must be positive");
  WindowBounds b;
  b.t_min = profile.difs + profile.cw_min * profile.slot_time;
  if (t_wifi < b.t_min)
    throw InvalidArgument("Wi-Fi window " + std::to_string(t_wifi) + " us is below the minimum "
                          + std::to_string(b.t_min) + " us");
  const auto ampdu_max = ampdu_limit_bytes(profile.ampdu_exp, mpdu_length.value_or(profile.mpdu_length()));
  const Micros burst = std::min(profile.max_ppdu_duration,
                                profile.phy_header_time + 8.0 * static_cast<double>(ampdu_max) / data_rate);
  b.t_max = t_wifi + burst + profile.sifs + block_ack_airtime(profile);
  return b;
}

Micros laa_window_length(Micros gamma_prime, int n_slots, Micros partial_k, Micros laa_slot)
{
  if (n_slots < 0)
    throw InvalidArgument("slot count must be non-negative");
  if (gamma_prime < 0.0 || gamma_prime > laa_slot)
    throw InvalidArgument("Gamma' must lie within one LAA slot");
  const bool allowed = std::any_of(std::begin(kPartialSubframes), std::end(kPartialSubframes),
                                   [&](double k) { return std::abs(k - partial_k) < 0.01; });
  if (!allowed)
    throw InvalidArgument("invalid partial subframe length " + std::to_string(partial_k) + " us");
  return gamma_prime + n_slots * laa_slot + partial_k;
}

Micros wifi_access_time(const WifiMacProfile& profile)
{
  return profile.difs + profile.slot_time * (profile.cw_min - 1) / 2.0;
}

Micros laa_access_time(const LaaClassProfile& profile)
{
  return profile.defer_total() + profile.slot_time * (profile.cw_min - 1) / 2.0 + profile.gamma;
}

Micros wifi_window_txop(const CoexScenario& scenario)
{
  const int n = wifi_burst_mpdus(scenario);
  if (n == 0)
    throw EmptyBurst("no MPDU fits within the Wi-Fi duration cap");
  return data_ppdu_airtime(scenario.wifi, n, scenario.wifi_rate);
}

Mbps windowed_capacity(Micros window, Micros txop, Micros access, const std::function<Mbps(Micros)>& nc)
{
  if (!(window > 0.0))
    return 0.0;
  const Micros period = txop + access;
  const double full = std::floor(window / period);
  const Micros rest = window - full * period;
  Mbps c = 0.0;
  if (full > 0)
    c += full * period / window * nc(txop);
  const Micros tail = std::max(0.0, rest - access);
  if (tail > 0.0)
    c += rest / window * nc(tail);
  return c;
}

Mbps windowed_capacity(Rat rat, Micros window, const CoexScenario& scenario)
{
  if (rat == Rat::WiFi) {
    return windowed_capacity(window, wifi_window_txop(scenario), wifi_access_time(scenario.wifi),
                             [&](Micros cap) { return capacity_no_coex(Rat::WiFi, scenario, cap).value; });
  }
  return windowed_capacity(window, scenario.laa_txop, laa_access_time(scenario.laa),
                           [&](Micros cap) { return capacity_no_coex(Rat::Laa, scenario, cap).value; });
}

int DtmSchedule::reservations() const
{
  if (t_laa <= 0.0)
    return 0;
  return static_cast<int>(std::ceil(t_laa / kMaxCtsReservation - 1e-12));
}

void DtmSchedule::validate() const
{
  if (t_wifi < 0.0 || t_laa < 0.0)
    throw InvalidArgument("DTM windows must be non-negative");
  if (t_wifi + t_laa <= 0.0)
    throw InvalidArgument("DTM windows cannot both be zero");
  if (t_downtime < 0.0)
    throw InvalidArgument("downtime must be non-negative");
}

DtmSchedule DtmSchedule::from_period(Micros period, double wifi_ratio, Micros downtime)
{
  if (!(period > 0.0) || wifi_ratio < 0.0 || wifi_ratio > 1.0)
    throw InvalidArgument("need period > 0 and ratio in [0, 1]");
  return {period * wifi_ratio, period * (1.0 - wifi_ratio), downtime};
}

DtmSchedule DtmSchedule::from_wifi_window(Micros t_wifi, double wifi_ratio, Micros downtime)
{
  if (!(t_wifi > 0.0) || !(wifi_ratio > 0.0) || wifi_ratio > 1.0)
    throw InvalidArgument("need t_wifi > 0 and ratio in (0, 1]");
  return {t_wifi, t_wifi * (1.0 - wifi_ratio) / wifi_ratio, downtime};
}

int DfmPartition::wifi_bandwidth() const
{
  return std::accumulate(wifi_subchannels.begin(), wifi_subchannels.end(), 0);
}

CoexScenario scenario_for_regime(const CoexScenario& base, Regime regime)
{
  CoexScenario s = base;
  s.laa_txop = base.laa.txop(regime);
  return s;
}

CapacityReport dtm_capacities(const DtmSchedule& schedule, const CoexScenario& scenario)
{
  schedule.validate();
  const CoexScenario s = scenario_for_regime(scenario, Regime::Dtm);
  const Micros total = schedule.t_wifi + schedule.t_laa + schedule.t_downtime * std::max(1, schedule.reservations());

  CapacityReport r;
  r.regime = Regime::Dtm;
  r.bandwidth_mhz = s.bandwidth_mhz;
  r.wifi_ratio = schedule.sharing_ratio();
  r.laa_class = s.laa.priority_class;
  if (schedule.t_wifi > 0.0)
    r.c_w = windowed_capacity(Rat::WiFi, schedule.t_wifi, s) * schedule.t_wifi / total;
  if (schedule.t_laa > 0.0)
    r.c_l = windowed_capacity(Rat::Laa, schedule.t_laa, s) * schedule.t_laa / total;
  return r;
}

DfmPartition dfm_partition(int channel_bw, double wifi_ratio)
{
  if (channel_bw != 40 && channel_bw != 80 && channel_bw != 160)
    throw InvalidArgument("DFM channel must be 40, 80 or 160 MHz");
  if (wifi_ratio < 0.0 || wifi_ratio > 1.0)
    throw InvalidArgument("sharing ratio must be in [0, 1]");
  const double share = wifi_ratio * channel_bw;
  const double units = share / 20.0;
  if (std::abs(units - std::round(units)) > 1e-9)
    throw InfeasiblePartition("Wi-Fi share of " + std::to_string(share) + " MHz is not a multiple of 20 MHz");
  int remaining = static_cast<int>(std::lround(share));
  if (remaining < 20)
    throw InfeasiblePartition("Wi-Fi share below 20 MHz");

  DfmPartition p;
  for (int width : {160, 80, 40, 20}) {
    while (remaining >= width) {
      p.wifi_subchannels.push_back(width);
      remaining -= width;
    }
  }
  p.laa_carriers = (channel_bw - p.wifi_bandwidth()) / 20;
  return p;
}

CapacityReport dfm_capacities(const DfmPartition& partition, const CoexScenario& scenario)
{
  const CoexScenario base = scenario_for_regime(scenario, Regime::Dfm);
  CapacityReport r;
  r.regime = Regime::Dfm;
  r.bandwidth_mhz = partition.wifi_bandwidth() + partition.laa_bandwidth();
  r.wifi_ratio = r.bandwidth_mhz > 0 ? double(partition.wifi_bandwidth()) / r.bandwidth_mhz : 0.0;
  r.laa_class = base.laa.priority_class;
  for (int width : partition.wifi_subchannels) {
    CoexScenario s = base;
    s.bandwidth_mhz = width;
    s.wifi_rate = peak_phy_rate(Rat::WiFi, width);
    r.c_w += capacity_no_coex(Rat::WiFi, s, s.wifi_duration_cap).value;
  }
  if (partition.laa_carriers > 0) {
    CoexScenario s = base;
    s.bandwidth_mhz = partition.laa_bandwidth();
    s.laa_rate = peak_phy_rate(Rat::Laa, partition.laa_bandwidth());
    r.c_l = capacity_no_coex(Rat::Laa, s, s.laa_txop).value;
  }
  return r;
}

CapacityReport coexistence_capacities(const CoexScenario& scenario)
{
  const CoexScenario s = scenario_for_regime(scenario, Regime::Coexistence);
  const CoexResult res = evaluate_coexistence(s);
  CapacityReport r;
  r.regime = Regime::Coexistence;
  r.c_w = res.th_w;
  r.c_l = res.th_l;
  r.bandwidth_mhz = s.bandwidth_mhz;
  r.laa_class = s.laa.priority_class;
  return r;
}

BestDma best_dma(int channel_bw, double wifi_ratio, double alpha, const CoexScenario& scenario,
                 Micros dtm_period)
{
  if (alpha < 0.0 || alpha > 1.0)
    throw InvalidArgument("alpha must be in [0, 1]");
  CoexScenario channel = CoexScenario::for_channel(scenario.wifi, scenario.laa, channel_bw);
  channel.n_w = scenario.n_w;
  channel.n_l = scenario.n_l;
  channel.p_fc = scenario.p_fc;

  BestDma best;
  best.dtm = dtm_capacities(DtmSchedule::from_period(dtm_period, wifi_ratio), channel);
  best.dtm.alpha = alpha;
  best.dtm.wifi_ratio = wifi_ratio;
  try {
    auto dfm = dfm_capacities(dfm_partition(channel_bw, wifi_ratio), channel);
    dfm.alpha = alpha;
    best.dfm = dfm;
  } catch (const InfeasiblePartition&) {
    best.dfm_infeasible = true;
    best.recommendation = Regime::Dtm;
    return best;
  }
  const double a = best.dtm.aggregated();
  const double b = best.dfm->aggregated();
  best.tie = std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
  best.recommendation = (best.tie || b > a) ? Regime::Dfm : Regime::Dtm;
  return best;
}

} // namespace unlshare
