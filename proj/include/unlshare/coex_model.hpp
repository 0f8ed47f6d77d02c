/*
 * Saturation model of one Wi-Fi population (A-MPDU, no EDCA) and one LAA
 * population (single priority class) contending for the same channel.
 *
 * Each transmitter follows a backoff chain with per-stage windows
 * CW_r = min(cw_min * 2^r, cw_max); stages are coupled through collision
 * probabilities PC and countdown-blocking probabilities PB. The coupled
 * system is solved for the per-slot transmission probabilities tau by a
 * damped fixed-point iteration, and throughput follows from the mean
 * duration of a generic contention slot.
 */

#ifndef UNLSHARE_COEX_MODEL_HPP
#define UNLSHARE_COEX_MODEL_HPP

#include "unlshare/params.hpp"

namespace unlshare {

struct CoexScenario {
  WifiMacProfile wifi;
  LaaClassProfile laa;
  int bandwidth_mhz = 80;
  int n_w = 1;
  int n_l = 1;
  Mbps wifi_rate = 0.0;
  Mbps laa_rate = 0.0;
  /// Probability that a Wi-Fi/LAA collision reaches past the LAA
  /// reservation signal into its data. Long A-MPDU bursts make it 1.
  double p_fc = 1.0;
  /// Cap applied to the Wi-Fi A-MPDU airtime (on top of the PPDU limit).
  Micros wifi_duration_cap = 5484.0;
  /// LAA TXOP in force (depends on the regime for class 4).
  Micros laa_txop = 2000.0;

  int aifs_n() const { return wifi.aifsn; }
  int cca_min() const;

  /// Both technologies on the same channel of `bandwidth_mhz`, rates from
  /// the peak-rate table and the LAA TXOP that applies to `regime`.
  static CoexScenario for_channel(const WifiMacProfile& wifi, const LaaClassProfile& laa,
                                  int bandwidth_mhz, Regime regime = Regime::Coexistence);

  void validate() const;
};

struct Equilibrium {
  double tau_w = 0.0;
  double tau_l = 0.0;
  double pc_w = 0.0;
  double pc_l = 0.0;
  double pb_w = 0.0;
  double pb_l = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Outcome probabilities of one backoff slot; they partition the slot.
struct EventProbs {
  double p_idle = 1.0;
  double ps_w = 0.0;
  double ps_l = 0.0;
  double pc_ww = 0.0;
  double pc_ll = 0.0;
  double pc_wl = 0.0;

  double sum() const { return p_idle + ps_w + ps_l + pc_ww + pc_ll + pc_wl; }
};

struct BurstDurations {
  Micros ts_w = 0.0;
  Micros tc_w = 0.0;
  Micros ts_l = 0.0;
  Micros tc_l = 0.0;
  Micros t_tail_pad_data = 0.0;
  Micros t_tail_pad_ba = 0.0;
  int n_mpdus = 0;
};

struct Coupling {
  double pc_w = 0.0;
  double pc_l = 0.0;
  double pb_w = 0.0;
  double pb_l = 0.0;
};

struct SolverOptions {
  double damping = 0.5;
  double initial_tau = 0.05;
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

/// A-MPDU size for the scenario's Wi-Fi rate and duration cap.
int wifi_burst_mpdus(const CoexScenario& scenario);

/// DIFS + data PPDU + tail/pad + SIFS + block ACK + tail/pad.
/// Throws EmptyBurst if no MPDU fits.
Micros wifi_success_duration(const CoexScenario& scenario);

/// DIFS + data PPDU + tail/pad + ACK timeout.
Micros wifi_collision_duration(const CoexScenario& scenario);

/// Gamma + TXOP; identical for successful and colliding LAA bursts.
Micros laa_burst_duration(const LaaClassProfile& profile, Micros txop);

BurstDurations burst_durations(const CoexScenario& scenario);

/// Stationary probability of the first-attempt transmit state.
/// Requires pc in [0,1); throws DegenerateBlocking when pb == 1.
double backoff_root_probability(const BackoffParams& backoff, double pc, double pb);

double transmission_probability(double b00, double pc, int max_retries);

Coupling coupling_step(double tau_w, double tau_l, const CoexScenario& scenario);

/// Throws ConvergenceError if the iteration cap is reached.
Equilibrium solve_equilibrium(const CoexScenario& scenario, const SolverOptions& options = {});

EventProbs event_probabilities(const Equilibrium& eq, const CoexScenario& scenario);

Micros mean_slot_duration(const EventProbs& probs, const BurstDurations& durations, Micros sigma);

Mbps wifi_throughput(const Equilibrium& eq, const CoexScenario& scenario);

/// Counts LAA payload in successful bursts and in whole LAA slots that
/// outlast a colliding Wi-Fi burst; 13/14 discounts control overhead.
Mbps laa_throughput(const Equilibrium& eq, const CoexScenario& scenario);

struct NcCapacity {
  Mbps value = 0.0;
  /// The cap left no room for a single MPDU / any LAA airtime.
  bool zero_by_cap = false;
};

/// Capacity of one technology operating alone (the other zeroed, one
/// transmitter) with bursts truncated to `tx_duration_cap`.
NcCapacity capacity_no_coex(Rat rat, const CoexScenario& scenario, Micros tx_duration_cap);

/// Everything computed for one coexistence scenario.
struct CoexResult {
  Equilibrium equilibrium;
  EventProbs probs;
  BurstDurations durations;
  Micros t_cs = 0.0;
  Mbps th_w = 0.0;
  Mbps th_l = 0.0;
};

CoexResult evaluate_coexistence(const CoexScenario& scenario, const SolverOptions& options = {});

} // namespace unlshare

#endif /* UNLSHARE_COEX_MODEL_HPP */
