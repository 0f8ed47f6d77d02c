#include "unlshare/coex_model.hpp"

#include "unlshare/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace unlshare {

namespace {

// (1 - tau)^n with the n <= 0 convention of an empty product.
double idle_pow(double tau, int n)
{
  return n <= 0 ? 1.0 : std::pow(1.0 - tau, n);
}

bool finite_probability(double p)
{
  return std::isfinite(p) && p >= 0.0 && p <= 1.0;
}

} // namespace

int CoexScenario::cca_min() const
{
  return std::min(aifs_n(), laa.defer_slots);
}

CoexScenario CoexScenario::for_channel(const WifiMacProfile& wifi, const LaaClassProfile& laa,
                                       int bandwidth_mhz, Regime regime)
{
  CoexScenario s;
  s.wifi = wifi;
  s.laa = laa;
  s.bandwidth_mhz = bandwidth_mhz;
  s.wifi_rate = peak_phy_rate(Rat::WiFi, bandwidth_mhz);
  s.laa_rate = peak_phy_rate(Rat::Laa, bandwidth_mhz);
  s.wifi_duration_cap = wifi.max_ppdu_duration;
  s.laa_txop = laa.txop(regime);
  return s;
}

void CoexScenario::validate() const
{
  wifi.validate();
  laa.validate();
  if (n_w < 0 || n_l < 0 || n_w + n_l < 1)
    throw InvalidArgument("scenario needs n_w >= 0, n_l >= 0 and at least one transmitter");
  if (!(p_fc >= 0.0 && p_fc <= 1.0))
    throw InvalidArgument("P_fc must be in [0, 1]");
  if (n_w > 0 && wifi_rate <= 0)
    throw InvalidArgument("Wi-Fi rate must be positive");
  if (n_l > 0 && laa_rate <= 0)
    throw InvalidArgument("LAA rate must be positive");
  if (laa_txop <= 0)
    throw InvalidArgument("LAA TXOP must be positive");
}

int wifi_burst_mpdus(const CoexScenario& scenario)
{
  if (scenario.wifi_rate <= 0)
    throw InvalidArgument("Wi-Fi rate must be positive");
  return max_mpdus_per_burst(scenario.wifi, scenario.wifi_rate, scenario.wifi_duration_cap);
}

namespace {

struct WifiBurstParts {
  int n_mpdus;
  Micros data;     // PHY header + PSDU incl. tail/pad
  Micros pad_data; // tail/pad part of `data`
  Micros ba;       // block ACK PPDU incl. tail/pad
  Micros pad_ba;
};

WifiBurstParts wifi_burst_parts(const CoexScenario& s)
{
  const int n = wifi_burst_mpdus(s);
  if (n == 0)
    throw EmptyBurst("no MPDU fits within the Wi-Fi duration cap");
  const auto& w = s.wifi;
  const double data_bits = 8.0 * n * w.subframe_bytes();
  const double ba_bits = 8.0 * w.block_ack_bytes;
  WifiBurstParts parts{};
  parts.n_mpdus = n;
  parts.data = data_ppdu_airtime(w, n, s.wifi_rate);
  parts.pad_data = parts.data - w.phy_header_time - data_bits / s.wifi_rate;
  parts.ba = block_ack_airtime(w);
  parts.pad_ba = parts.ba - w.response_phy_header_time - ba_bits / w.basic_rate;
  return parts;
}

} // namespace

Micros wifi_success_duration(const CoexScenario& s)
{
  const auto parts = wifi_burst_parts(s);
  return s.wifi.difs + parts.data + s.wifi.sifs + parts.ba;
}

Micros wifi_collision_duration(const CoexScenario& s)
{
  const auto parts = wifi_burst_parts(s);
  return s.wifi.difs + parts.data + s.wifi.ack_timeout;
}

Micros laa_burst_duration(const LaaClassProfile& profile, Micros txop)
{
  return profile.gamma + txop;
}

BurstDurations burst_durations(const CoexScenario& s)
{
  BurstDurations d;
  if (s.n_w > 0) {
    const auto parts = wifi_burst_parts(s);
    d.n_mpdus = parts.n_mpdus;
    d.ts_w = s.wifi.difs + parts.data + s.wifi.sifs + parts.ba;
    d.tc_w = s.wifi.difs + parts.data + s.wifi.ack_timeout;
    d.t_tail_pad_data = parts.pad_data;
    d.t_tail_pad_ba = parts.pad_ba;
  }
  d.ts_l = d.tc_l = laa_burst_duration(s.laa, s.laa_txop);
  return d;
}

double backoff_root_probability(const BackoffParams& backoff, double pc, double pb)
{
  if (!(pc >= 0.0 && pc < 1.0))
    throw InvalidArgument("collision probability must be in [0, 1)");
  if (!(pb >= 0.0 && pb <= 1.0))
    throw InvalidArgument("blocking probability must be in [0, 1]");
  if (pb >= 1.0)
    throw DegenerateBlocking("blocking probability 1: backoff never resumes");
  double sum = 0.0;
  double pc_pow = 1.0;
  for (int r = 0; r <= backoff.max_retries; ++r) {
    const double cw = contention_window(backoff, r);
    sum += pc_pow * (1.0 + (2.0 + (1.0 - pb) * (cw - 1.0)) / (2.0 * (1.0 - pb)));
    pc_pow *= pc;
  }
  return 1.0 / sum;
}

double transmission_probability(double b00, double pc, int max_retries)
{
  double sum = 0.0;
  double pc_pow = 1.0;
  for (int r = 0; r <= max_retries; ++r) {
    sum += pc_pow;
    pc_pow *= pc;
  }
  return std::clamp(b00 * sum, 0.0, 1.0);
}

Coupling coupling_step(double tau_w, double tau_l, const CoexScenario& s)
{
  const int nw = s.n_w;
  const int nl = s.n_l;
  Coupling c;
  if (nw > 0) {
    const double others_idle = idle_pow(tau_l, nl) * idle_pow(tau_w, nw - 1);
    c.pc_w = 1.0 - others_idle;
    c.pb_w = 1.0 - std::pow(others_idle, s.aifs_n() - s.cca_min() + 1);
  }
  if (nl > 0) {
    const double wifi_harm = (1.0 - s.p_fc) + s.p_fc * idle_pow(tau_w, nw);
    c.pc_l = 1.0 - wifi_harm * idle_pow(tau_l, nl - 1);
    const double others_idle = idle_pow(tau_w, nw) * idle_pow(tau_l, nl - 1);
    c.pb_l = 1.0 - std::pow(others_idle, s.laa.defer_slots - s.cca_min() + 1);
  }
  return c;
}

namespace {

struct TauMap {
  double tau_w;
  double tau_l;
  Coupling coupling;
};

// One application of the coupled equations: tau -> (PC, PB) -> tau'.
TauMap apply_map(double tau_w, double tau_l, const CoexScenario& s)
{
  TauMap m{0.0, 0.0, coupling_step(tau_w, tau_l, s)};
  if (s.n_w > 0) {
    const auto bw = s.wifi.backoff();
    const double b00 = backoff_root_probability(bw, m.coupling.pc_w, m.coupling.pb_w);
    m.tau_w = transmission_probability(b00, m.coupling.pc_w, bw.max_retries);
  }
  if (s.n_l > 0) {
    const auto bl = s.laa.backoff();
    const double b00 = backoff_root_probability(bl, m.coupling.pc_l, m.coupling.pb_l);
    m.tau_l = transmission_probability(b00, m.coupling.pc_l, bl.max_retries);
  }
  return m;
}

} // namespace

Equilibrium solve_equilibrium(const CoexScenario& s, const SolverOptions& options)
{
  s.validate();
  double tau_w = s.n_w > 0 ? options.initial_tau : 0.0;
  double tau_l = s.n_l > 0 ? options.initial_tau : 0.0;
  double residual = 0.0;
  for (int it = 0; it <= options.max_iterations; ++it) {
    const TauMap next = apply_map(tau_w, tau_l, s);
    residual = std::max(std::abs(next.tau_w - tau_w), std::abs(next.tau_l - tau_l));
    if (residual <= options.tolerance) {
      Equilibrium eq;
      eq.tau_w = tau_w;
      eq.tau_l = tau_l;
      eq.pc_w = next.coupling.pc_w;
      eq.pc_l = next.coupling.pc_l;
      eq.pb_w = next.coupling.pb_w;
      eq.pb_l = next.coupling.pb_l;
      eq.residual = residual;
      eq.iterations = it;
      return eq;
    }
    if (it == options.max_iterations)
      break;
    tau_w = (1.0 - options.damping) * tau_w + options.damping * next.tau_w;
    tau_l = (1.0 - options.damping) * tau_l + options.damping * next.tau_l;
  }
  throw ConvergenceError("fixed-point iteration did not converge; last residual "
                             + std::to_string(residual),
                         residual, options.max_iterations);
}

EventProbs event_probabilities(const Equilibrium& eq, const CoexScenario& s)
{
  const int nw = s.n_w;
  const int nl = s.n_l;
  const double tw = eq.tau_w;
  const double tl = eq.tau_l;
  if (!finite_probability(tw) || !finite_probability(tl))
    throw InvalidArgument("transmission probabilities must be in [0, 1]");

  const double w_idle = idle_pow(tw, nw);
  const double l_idle = idle_pow(tl, nl);
  const double w_single = nw > 0 ? nw * tw * idle_pow(tw, nw - 1) : 0.0;
  const double l_single = nl > 0 ? nl * tl * idle_pow(tl, nl - 1) : 0.0;

  EventProbs p;
  p.p_idle = w_idle * l_idle;
  p.ps_w = w_single * l_idle;
  p.ps_l = l_single * w_idle;
  p.pc_ww = l_idle * (1.0 - w_idle - w_single);
  p.pc_ll = w_idle * (1.0 - l_idle - l_single);
  p.pc_wl = (1.0 - w_idle) * (1.0 - l_idle);
  return p;
}

Micros mean_slot_duration(const EventProbs& p, const BurstDurations& d, Micros sigma)
{
  return p.ps_w * d.ts_w + p.ps_l * d.ts_l + p.pc_ww * d.tc_w + p.pc_ll * d.tc_l
         + p.pc_wl * std::max(d.tc_w, d.tc_l) + p.p_idle * sigma;
}

namespace {

Micros slot_sigma(const CoexScenario& s)
{
  return s.n_w > 0 ? s.wifi.slot_time : s.laa.slot_time;
}

Mbps wifi_throughput_from(const EventProbs& p, const BurstDurations& d, Micros t_cs, const CoexScenario& s)
{
  if (p.ps_w <= 0.0)
    return 0.0;
  return p.ps_w * d.n_mpdus * 8.0 * s.wifi.payload_bytes / t_cs;
}

Mbps laa_throughput_from(const EventProbs& p, const BurstDurations& d, Micros t_cs, const CoexScenario& s)
{
  const Micros slot = s.laa.laa_slot;
  const double surviving_slots = std::floor(std::max(0.0, d.tc_l - d.tc_w) / slot + 1e-12);
  const double airtime = p.ps_l * s.laa_txop + p.pc_wl * surviving_slots * slot;
  if (airtime <= 0.0)
    return 0.0;
  return 13.0 * s.laa_rate / (14.0 * t_cs) * airtime;
}

} // namespace

Mbps wifi_throughput(const Equilibrium& eq, const CoexScenario& s)
{
  const EventProbs p = event_probabilities(eq, s);
  if (p.ps_w <= 0.0)
    return 0.0;
  const BurstDurations d = burst_durations(s);
  return wifi_throughput_from(p, d, mean_slot_duration(p, d, slot_sigma(s)), s);
}

Mbps laa_throughput(const Equilibrium& eq, const CoexScenario& s)
{
  const EventProbs p = event_probabilities(eq, s);
  if (p.ps_l <= 0.0 && p.pc_wl <= 0.0)
    return 0.0;
  const BurstDurations d = burst_durations(s);
  return laa_throughput_from(p, d, mean_slot_duration(p, d, slot_sigma(s)), s);
}

CoexResult evaluate_coexistence(const CoexScenario& s, const SolverOptions& options)
{
  CoexResult r;
  r.equilibrium = solve_equilibrium(s, options);
  r.probs = event_probabilities(r.equilibrium, s);
  r.durations = burst_durations(s);
  r.t_cs = mean_slot_duration(r.probs, r.durations, slot_sigma(s));
  r.th_w = wifi_throughput_from(r.probs, r.durations, r.t_cs, s);
  r.th_l = laa_throughput_from(r.probs, r.durations, r.t_cs, s);
  return r;
}

NcCapacity capacity_no_coex(Rat rat, const CoexScenario& base, Micros tx_duration_cap)
{
  CoexScenario s = base;
  if (rat == Rat::WiFi) {
    s.n_w = 1;
    s.n_l = 0;
    s.wifi_duration_cap = std::min(base.wifi_duration_cap, tx_duration_cap);
    if (tx_duration_cap <= 0.0 || wifi_burst_mpdus(s) == 0)
      return {0.0, true};
    return {evaluate_coexistence(s).th_w, false};
  }
  s.n_w = 0;
  s.n_l = 1;
  s.laa_txop = std::min(base.laa_txop, tx_duration_cap);
  if (!(s.laa_txop > 0.0))
    return {0.0, true};
  return {evaluate_coexistence(s).th_l, false};
}

} // namespace unlshare
