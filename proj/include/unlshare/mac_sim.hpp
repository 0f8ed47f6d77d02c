/*
 * Discrete-event simulator of a one-AP / one-station 802.11ac BSS under
 * saturated downlink UDP traffic with A-MPDU aggregation and block ACKs.
 *
 * In DFM mode the BSS owns its (sub-)channel. In DTM mode a coordinator
 * alternates Wi-Fi windows and LAA windows: at the end of each Wi-Fi window
 * the AP waits SIFS after any exchange in flight and sends a CTS-to-self
 * whose duration covers the LAA window; every station sets its NAV and the
 * eNodeB transmits scheduled TXOP bursts until the NAV expires.
 *
 * The event clock is an integer nanosecond count; identical configurations
 * (seed included) give identical results and traces.
 *
 * Trace format (one frame per line, tab separated, LF line ends):
 *
 *   # unlshare frame trace v1
 *   # time_us	node	kind	duration_us	outcome
 *   100063.000	AP	DATA	1868.000	ok mpdus=64
 *
 * time_us and duration_us are printed with exactly three decimals (the
 * nanosecond clock), node is one of AP, STA, ENB, kind is one of BEACON,
 * AUTH_REQ, AUTH_RESP, ASSOC_REQ, ASSOC_RESP, ARP_REQ, ARP_REPLY, DATA,
 * BLOCK_ACK, CTS, LAA_BURST, and outcome is free text without tabs.
 */

#ifndef UNLSHARE_MAC_SIM_HPP
#define UNLSHARE_MAC_SIM_HPP

#include "unlshare/params.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace unlshare {

using SimTime = std::int64_t; // nanoseconds

inline constexpr std::uint64_t kDefaultSeed = 1;

/// Name of the environment variable that overrides kDefaultSeed.
inline constexpr const char* kSeedEnvVar = "UNLSHARE_SEED";

/// kDefaultSeed unless the environment variable holds an unsigned integer.
std::uint64_t default_seed();

SimTime to_sim_time(Micros us);
Micros to_micros(SimTime t);

enum class SimMode { Dfm, Dtm };

enum class FrameKind {
  Beacon,
  AuthRequest,
  AuthResponse,
  AssocRequest,
  AssocResponse,
  ArpRequest,
  ArpReply,
  Data,
  BlockAck,
  Cts,
  LaaBurst,
};

std::string to_string(SimMode mode);
std::string to_string(FrameKind kind);

/// Ordered by processing priority at equal timestamps (control first).
enum class EventKind {
  WindowBoundary,
  CtsDue,
  NavExpiry,
  LaaBurstEnd,
  BeaconDue,
  AckEnd,
  TxEnd,
  BackoffExpiry,
};

struct SimEvent {
  SimTime time = 0;
  EventKind kind = EventKind::BackoffExpiry;
  std::uint64_t seq = 0;   // insertion order, last tie-breaker
  std::uint64_t token = 0; // generation tag for cancellable events
};

/// Strict weak ordering of the event queue: time, then kind, then seq.
bool fires_before(const SimEvent& a, const SimEvent& b);

/// Test hook: delay the block ACK of the last burst of a Wi-Fi window so
/// the exchange runs past the window end.
struct SimHooks {
  int delayed_ack_window = -1; ///< index of the Wi-Fi window; -1 disables
  Micros delayed_ack_extra = 0.0;
};

struct SimConfig {
  std::uint64_t seed = kDefaultSeed;
  SimMode mode = SimMode::Dfm;
  int bandwidth_mhz = 80;
  /// wifi.beacon_interval drives the beacon schedule.
  WifiMacProfile wifi = wifi_preset("sim-wifi");
  LaaClassProfile laa = laa_preset("table4-class1");
  Micros t_wifi = 0.0;
  Micros t_laa = 0.0;
  Micros warmup = 100000.0;
  Micros measure_duration = 10e6;
  int beacon_bytes = 300;
  bool record_trace = false;
  SimHooks hooks;

  void validate() const;
};

/// Parses a YAML simulation config (documented in README) into a SimConfig.
/// Missing `seed` falls back to default_seed().
SimConfig parse_sim_config(std::string_view text);

struct TraceRecord {
  SimTime time = 0;
  std::string node;
  FrameKind kind = FrameKind::Data;
  SimTime duration = 0;
  std::string outcome;
};

struct SimResult {
  Mbps wifi_throughput = 0.0;
  Mbps laa_airtime_throughput = 0.0;
  std::int64_t data_bursts = 0;
  std::int64_t mpdus_delivered = 0;
  std::int64_t cts_sent = 0;
  std::int64_t beacons = 0;
  std::int64_t window_overruns = 0;
  std::int64_t wifi_windows = 0;
  std::int64_t laa_windows = 0;
  Micros nav_silenced = 0.0;
  Micros wifi_window_time = 0.0; ///< Wi-Fi window time inside the measurement
  Micros wifi_airtime = 0.0;     ///< data + block ACK airtime inside the measurement
  std::vector<TraceRecord> trace;

  bool operator==(const SimResult&) const = default;
};

bool operator==(const TraceRecord& a, const TraceRecord& b);

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace);

/// Channel state the AP uses to time the CTS-to-self.
struct ApChannelState {
  SimTime busy_until = 0; ///< end of the data + block ACK exchange in flight
  Micros sifs = 16.0;
};

/// max(window_end, end of the exchange in flight) + SIFS.
SimTime next_cts_instant(const ApChannelState& ap, SimTime window_end);

/// LAA airtime inside one window: TXOP bursts back to back with one idle
/// LAA slot between consecutive bursts; the last burst is cut to whole
/// slots. Uses the exclusive-operation TXOP.
Micros laa_packed_airtime(Micros t_laa, const LaaClassProfile& profile);

/// laa_packed_airtime * 13/14 * laa_rate spread over a DTM period.
Mbps laa_window_airtime(Micros t_laa, const LaaClassProfile& profile, Mbps laa_rate, Micros period);

SimResult run_dfm_simulation(const SimConfig& config);
SimResult run_dtm_simulation(const SimConfig& config);

/// Dispatches on config.mode.
SimResult run_simulation(const SimConfig& config);

} // namespace unlshare

#endif /* UNLSHARE_MAC_SIM_HPP */
