#include "unlshare/mac_sim.hpp"

#include "unlshare/error.hpp"
#include "unlshare/share_calc.hpp"
#include "yaml_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

namespace unlshare {

namespace {

constexpr SimTime kNever = std::numeric_limits<SimTime>::max();
constexpr double kLaaPayloadShare = 13.0 / 14.0;

struct ScriptedFrame {
  const char* node;
  FrameKind kind;
  int bytes;
};

// Association and address resolution exchanged during the warm-up.
constexpr ScriptedFrame kWarmupScript[] = {
    {"STA", FrameKind::AuthRequest, 30},  {"AP", FrameKind::AuthResponse, 30},
    {"STA", FrameKind::AssocRequest, 60}, {"AP", FrameKind::AssocResponse, 60},
    {"AP", FrameKind::ArpRequest, 64},    {"STA", FrameKind::ArpReply, 64},
};

constexpr SimTime kWarmupScriptStart = 2'000'000; // 2 ms

std::string fmt_us(SimTime t)
{
  std::ostringstream os;
  const SimTime whole = t / 1000;
  const SimTime frac = t % 1000;
  os << whole << '.' << std::setw(3) << std::setfill('0') << frac;
  return os.str();
}

struct EventOrder {
  bool operator()(const SimEvent& a, const SimEvent& b) const { return fires_before(b, a); }
};

enum class TxKind { None, Beacon, Data };

// One stream per station; only the AP draws (its backoff counters).
std::mt19937_64 seed_for_station(std::uint64_t seed, std::uint32_t station)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), station};
  return std::mt19937_64(seq);
}

class Simulator {
public:
  explicit Simulator(const SimConfig& config)
      : cfg_(config),
        rng_(seed_for_station(config.seed, 0))
  {
    const auto& w = cfg_.wifi;
    rate_ = peak_phy_rate(Rat::WiFi, cfg_.bandwidth_mhz);
    slot_ = to_sim_time(w.slot_time);
    sifs_ = to_sim_time(w.sifs);
    difs_ = to_sim_time(w.difs);
    pifs_ = sifs_ + slot_;
    ba_ = to_sim_time(block_ack_airtime(w));
    beacon_air_ = to_sim_time(non_ht_ppdu_airtime(cfg_.beacon_bytes, w.basic_rate));
    cts_air_ = to_sim_time(cts_airtime(w.basic_rate));
    beacon_interval_ = to_sim_time(w.beacon_interval);
    warmup_end_ = to_sim_time(cfg_.warmup);
    end_ = warmup_end_ + to_sim_time(cfg_.measure_duration);
    full_burst_ = max_mpdus_per_burst(w, rate_, w.max_ppdu_duration);
    dtm_ = cfg_.mode == SimMode::Dtm && cfg_.t_laa > 0.0;
    if (dtm_) {
      t_wifi_ = to_sim_time(cfg_.t_wifi);
      t_laa_ = to_sim_time(cfg_.t_laa);
      laa_rate_ = peak_phy_rate(Rat::Laa, cfg_.bandwidth_mhz);
      laa_txop_ = to_sim_time(cfg_.laa.txop_exclusive);
      laa_slot_ = to_sim_time(cfg_.laa.laa_slot);
    }
  }

  SimResult run()
  {
    schedule(0, EventKind::BeaconDue);
    play_warmup_script();
    // The traffic source and the DTM coordinator start together at the end
    // of the warm-up; NavExpiry doubles as "start a Wi-Fi window".
    if (dtm_)
      schedule(warmup_end_, EventKind::NavExpiry);
    else
      schedule(warmup_end_, EventKind::WindowBoundary);

    while (!queue_.empty()) {
      const SimEvent ev = queue_.top();
      if (ev.time > end_)
        break;
      queue_.pop();
      now_ = ev.time;
      dispatch(ev);
    }
    finish();
    return std::move(result_);
  }

private:
  void schedule(SimTime t, EventKind kind, std::uint64_t token = 0)
  {
    queue_.push(SimEvent{t, kind, seq_++, token});
  }

  void trace(SimTime t, const char* node, FrameKind kind, SimTime duration, std::string outcome)
  {
    if (cfg_.record_trace)
      result_.trace.push_back(TraceRecord{t, node, kind, duration, std::move(outcome)});
  }

  void play_warmup_script()
  {
    // Frames are spaced by DIFS plus a mean backoff; the channel is
    // otherwise idle, so they are laid out directly.
    const SimTime gap = difs_ + 7 * slot_;
    SimTime t = kWarmupScriptStart;
    for (const auto& f : kWarmupScript) {
      const SimTime air = to_sim_time(non_ht_ppdu_airtime(f.bytes, cfg_.wifi.basic_rate));
      if (t + air > warmup_end_)
        break;
      trace(t, f.node, f.kind, air, "ok");
      t += air + gap;
    }
  }

  void dispatch(const SimEvent& ev)
  {
    switch (ev.kind) {
    case EventKind::WindowBoundary: on_window_boundary(); break;
    case EventKind::CtsDue: on_cts_due(); break;
    case EventKind::NavExpiry: on_nav_expiry(); break;
    case EventKind::LaaBurstEnd: break;
    case EventKind::BeaconDue: on_beacon_due(); break;
    case EventKind::AckEnd: on_ack_end(); break;
    case EventKind::TxEnd: on_tx_end(); break;
    case EventKind::BackoffExpiry:
      if (ev.token == access_token_)
        on_access();
      break;
    }
  }

  // --- channel access -----------------------------------------------------

  bool beacon_fits(SimTime start) const { return start + beacon_air_ <= window_end_; }

  void resume_access()
  {
    if (!in_window_ || tx_ != TxKind::None)
      return;
    idle_since_ = now_;
    start_contention();
  }

  void start_contention()
  {
    const SimTime beacon_start = std::max(now_, idle_since_ + pifs_);
    if (beacon_pending_ && beacon_fits(beacon_start)) {
      contending_ = true;
      beacon_access_ = true;
      schedule(beacon_start, EventKind::BackoffExpiry, ++access_token_);
      return;
    }
    if (!traffic_on_)
      return;
    if (backoff_slots_ < 0)
      backoff_slots_ = draw_backoff();
    contending_ = true;
    beacon_access_ = false;
    countdown_start_ = std::max(now_, idle_since_ + difs_);
    schedule(countdown_start_ + backoff_slots_ * slot_, EventKind::BackoffExpiry, ++access_token_);
  }

  // Stops a countdown in progress, keeping the slots not yet consumed.
  void freeze()
  {
    if (!contending_)
      return;
    ++access_token_;
    contending_ = false;
    if (!beacon_access_ && now_ > countdown_start_) {
      const auto elapsed = static_cast<int>((now_ - countdown_start_) / slot_);
      backoff_slots_ = std::max(0, backoff_slots_ - elapsed);
    }
  }

  int draw_backoff()
  {
    std::uniform_int_distribution<int> dist(0, cfg_.wifi.cw_min - 1);
    return dist(rng_);
  }

  void on_access()
  {
    contending_ = false;
    if (beacon_access_) {
      beacon_pending_ = false;
      tx_ = TxKind::Beacon;
      busy_until_ = now_ + beacon_air_;
      ++result_.beacons;
      trace(now_, "AP", FrameKind::Beacon, beacon_air_, "ok");
      schedule(busy_until_, EventKind::TxEnd);
      return;
    }
    backoff_slots_ = 0;
    int n = full_burst_;
    if (window_end_ != kNever) {
      const SimTime room = window_end_ - now_ - sifs_ - ba_;
      n = room > 0 ? max_mpdus_per_burst(cfg_.wifi, rate_, std::min(to_micros(room), cfg_.wifi.max_ppdu_duration))
                   : 0;
    }
    if (n == 0)
      return; // wait for the window boundary with the counter at zero
    burst_mpdus_ = n;
    burst_air_ = to_sim_time(data_ppdu_airtime(cfg_.wifi, n, rate_));
    ack_delay_ = window_index_ == cfg_.hooks.delayed_ack_window ? to_sim_time(cfg_.hooks.delayed_ack_extra) : 0;
    tx_ = TxKind::Data;
    busy_until_ = now_ + burst_air_ + sifs_ + ack_delay_ + ba_;
    ++result_.data_bursts;
    trace(now_, "AP", FrameKind::Data, burst_air_, "ok mpdus=" + std::to_string(n));
    schedule(now_ + burst_air_, EventKind::TxEnd);
  }

  void on_tx_end()
  {
    if (tx_ == TxKind::Beacon) {
      tx_ = TxKind::None;
      resume_access();
      return;
    }
    const SimTime ba_start = now_ + sifs_ + ack_delay_;
    trace(ba_start, "STA", FrameKind::BlockAck, ba_, ack_delay_ > 0 ? "ok delayed" : "ok");
    schedule(ba_start + ba_, EventKind::AckEnd);
  }

  void on_ack_end()
  {
    tx_ = TxKind::None;
    if (now_ >= warmup_end_ && now_ <= end_) {
      result_.mpdus_delivered += burst_mpdus_;
      payload_bits_ += 8.0 * burst_mpdus_ * cfg_.wifi.payload_bytes;
      result_.wifi_airtime += to_micros(burst_air_ + ba_);
    }
    backoff_slots_ = -1;
    resume_access();
  }

  void on_beacon_due()
  {
    beacon_pending_ = true;
    if (beacon_interval_ > 0 && now_ + beacon_interval_ > now_)
      schedule(now_ + beacon_interval_, EventKind::BeaconDue);
    if (tx_ != TxKind::None || !in_window_)
      return;
    if (contending_ && beacon_access_)
      return;
    freeze();
    start_contention();
  }

  // --- DTM coordinator ----------------------------------------------------

  void on_window_boundary()
  {
    if (!dtm_) {
      // Start of measurement without multiplexing: one unbounded window.
      traffic_on_ = true;
      in_window_ = true;
      window_end_ = kNever;
      if (tx_ == TxKind::None) {
        freeze();
        start_contention();
      }
      return;
    }
    in_window_ = false;
    account_window(window_start_, now_);
    freeze();
    if (busy_until_ > now_)
      ++result_.window_overruns;
    laa_left_ = t_laa_;
    ++result_.laa_windows;
    schedule(next_cts_instant(ApChannelState{busy_until_, cfg_.wifi.sifs}, now_), EventKind::CtsDue);
  }

  void on_cts_due()
  {
    const SimTime reservation = std::min(laa_left_, to_sim_time(kMaxCtsReservation));
    laa_left_ -= reservation;
    ++result_.cts_sent;
    result_.nav_silenced += to_micros(reservation);
    trace(now_, "AP", FrameKind::Cts, cts_air_, "nav=" + fmt_us(reservation));
    const SimTime start = now_ + cts_air_;
    pack_laa(start, reservation);
    schedule(start + reservation, EventKind::NavExpiry);
  }

  void pack_laa(SimTime start, SimTime length)
  {
    SimTime t = start;
    const SimTime stop = start + length;
    while (stop - t >= laa_slot_) {
      const SimTime left = stop - t;
      const SimTime burst = std::min(laa_txop_, left / laa_slot_ * laa_slot_);
      trace(t, "ENB", FrameKind::LaaBurst, burst, "ok");
      const SimTime lo = std::max(t, warmup_end_);
      const SimTime hi = std::min(t + burst, end_);
      if (hi > lo)
        laa_bits_ += kLaaPayloadShare * laa_rate_ * to_micros(hi - lo);
      schedule(t + burst, EventKind::LaaBurstEnd);
      t += burst + laa_slot_;
    }
  }

  void on_nav_expiry()
  {
    if (laa_left_ > 0) {
      schedule(now_ + sifs_, EventKind::CtsDue);
      return;
    }
    traffic_on_ = true;
    in_window_ = true;
    window_start_ = now_;
    window_end_ = now_ + t_wifi_;
    ++window_index_;
    ++result_.wifi_windows;
    schedule(window_end_, EventKind::WindowBoundary);
    resume_access();
  }

  void account_window(SimTime from, SimTime to)
  {
    const SimTime lo = std::max(from, warmup_end_);
    const SimTime hi = std::min(to, end_);
    if (hi > lo)
      result_.wifi_window_time += to_micros(hi - lo);
  }

  void finish()
  {
    // Scripted warm-up frames are logged ahead of the event loop.
    std::stable_sort(result_.trace.begin(), result_.trace.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return a.time < b.time; });
    if (!dtm_)
      result_.wifi_window_time = cfg_.measure_duration;
    else if (in_window_)
      account_window(window_start_, end_);
    const Micros measured = cfg_.measure_duration;
    result_.wifi_throughput = payload_bits_ / measured;
    result_.laa_airtime_throughput = laa_bits_ / measured;
  }

  const SimConfig& cfg_;
  std::mt19937_64 rng_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> queue_;
  SimResult result_;

  Mbps rate_ = 0.0;
  Mbps laa_rate_ = 0.0;
  SimTime slot_ = 0, sifs_ = 0, difs_ = 0, pifs_ = 0, ba_ = 0;
  SimTime beacon_air_ = 0, cts_air_ = 0, beacon_interval_ = 0;
  SimTime warmup_end_ = 0, end_ = 0;
  SimTime t_wifi_ = 0, t_laa_ = 0, laa_txop_ = 0, laa_slot_ = 1;
  int full_burst_ = 0;
  bool dtm_ = false;

  SimTime now_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t access_token_ = 0;

  bool traffic_on_ = false;
  bool in_window_ = true; // warm-up frames are not constrained by DTM
  SimTime window_start_ = 0;
  SimTime window_end_ = kNever;
  int window_index_ = -1;
  SimTime laa_left_ = 0;

  TxKind tx_ = TxKind::None;
  SimTime busy_until_ = 0;
  SimTime idle_since_ = 0;
  bool contending_ = false;
  bool beacon_access_ = false;
  bool beacon_pending_ = false;
  SimTime countdown_start_ = 0;
  int backoff_slots_ = -1;
  int burst_mpdus_ = 0;
  SimTime burst_air_ = 0;
  SimTime ack_delay_ = 0;

  double payload_bits_ = 0.0;
  double laa_bits_ = 0.0;
};

} // namespace

std::uint64_t default_seed()
{
  const char* env = std::getenv(kSeedEnvVar);
  if (env == nullptr || *env == '\0')
    return kDefaultSeed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0')
    return kDefaultSeed;
  return v;
}

SimTime to_sim_time(Micros us)
{
  return std::llround(us * 1000.0);
}

Micros to_micros(SimTime t)
{
  return static_cast<double>(t) / 1000.0;
}

std::string to_string(SimMode mode)
{
  return mode == SimMode::Dfm ? "dfm" : "dtm";
}

std::string to_string(FrameKind kind)
{
  switch (kind) {
  case FrameKind::Beacon: return "BEACON";
  case FrameKind::AuthRequest: return "AUTH_REQ";
  case FrameKind::AuthResponse: return "AUTH_RESP";
  case FrameKind::AssocRequest: return "ASSOC_REQ";
  case FrameKind::AssocResponse: return "ASSOC_RESP";
  case FrameKind::ArpRequest: return "ARP_REQ";
  case FrameKind::ArpReply: return "ARP_REPLY";
  case FrameKind::Data: return "DATA";
  case FrameKind::BlockAck: return "BLOCK_ACK";
  case FrameKind::Cts: return "CTS";
  case FrameKind::LaaBurst: return "LAA_BURST";
  }
  return "?";
}

bool fires_before(const SimEvent& a, const SimEvent& b)
{
  if (a.time != b.time)
    return a.time < b.time;
  if (a.kind != b.kind)
    return a.kind < b.kind;
  return a.seq < b.seq;
}

bool operator==(const TraceRecord& a, const TraceRecord& b)
{
  return a.time == b.time && a.node == b.node && a.kind == b.kind && a.duration == b.duration
         && a.outcome == b.outcome;
}

void SimConfig::validate() const
{
  wifi.validate();
  if (!(measure_duration > 0.0))
    throw InvalidArgument("measure_duration must be positive");
  if (warmup < 0.0)
    throw InvalidArgument("warmup must be non-negative");
  if (beacon_bytes <= 0)
    throw InvalidArgument("beacon size must be positive");
  peak_phy_rate(Rat::WiFi, bandwidth_mhz);
  if (mode == SimMode::Dtm) {
    laa.validate();
    if (!(t_wifi > 0.0) || t_laa < 0.0)
      throw InvalidArgument("DTM needs t_wifi > 0 and t_laa >= 0");
  }
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace)
{
  out << "# unlshare frame trace v1\n";
  out << "# time_us\tnode\tkind\tduration_us\toutcome\n";
  for (const auto& r : trace)
    out << fmt_us(r.time) << '\t' << r.node << '\t' << to_string(r.kind) << '\t' << fmt_us(r.duration) << '\t'
        << r.outcome << '\n';
}

SimTime next_cts_instant(const ApChannelState& ap, SimTime window_end)
{
  return std::max(window_end, ap.busy_until) + to_sim_time(ap.sifs);
}

Micros laa_packed_airtime(Micros t_laa, const LaaClassProfile& profile)
{
  if (t_laa < 0.0)
    throw InvalidArgument("t_laa must be non-negative");
  const Micros slot = profile.laa_slot;
  const Micros txop = profile.txop_exclusive;
  Micros airtime = 0.0;
  Micros left = t_laa;
  while (left >= slot - 1e-9) {
    const Micros burst = std::min(txop, std::floor(left / slot + 1e-9) * slot);
    airtime += burst;
    left -= burst + slot;
  }
  return airtime;
}

Mbps laa_window_airtime(Micros t_laa, const LaaClassProfile& profile, Mbps laa_rate, Micros period)
{
  if (!(period > 0.0))
    throw InvalidArgument("period must be positive");
  return kLaaPayloadShare * laa_rate * laa_packed_airtime(t_laa, profile) / period;
}

SimResult run_dfm_simulation(const SimConfig& config)
{
  if (config.mode != SimMode::Dfm)
    throw InvalidArgument("run_dfm_simulation needs mode = dfm");
  config.validate();
  return Simulator(config).run();
}

SimResult run_dtm_simulation(const SimConfig& config)
{
  if (config.mode != SimMode::Dtm)
    throw InvalidArgument("run_dtm_simulation needs mode = dtm");
  config.validate();
  return Simulator(config).run();
}

SimResult run_simulation(const SimConfig& config)
{
  return config.mode == SimMode::Dfm ? run_dfm_simulation(config) : run_dtm_simulation(config);
}

SimConfig parse_sim_config(std::string_view text)
{
  using detail::read;
  const YAML::Node root = detail::load_yaml(text);
  detail::reject_unknown(root,
                         {"seed", "mode", "bandwidth_mhz", "payload", "t_wifi", "t_laa", "ratio", "warmup",
                          "measure_duration", "beacon_interval", "beacon_size", "trace", "wifi", "laa"},
                         "<root>");
  SimConfig c;
  c.seed = read<std::uint64_t>(root, "seed", default_seed());
  const auto mode = read<std::string>(root, "mode", "dfm");
  if (mode == "dfm")
    c.mode = SimMode::Dfm;
  else if (mode == "dtm")
    c.mode = SimMode::Dtm;
  else
    throw ConfigError("mode must be dfm or dtm, got '" + mode + "'");
  c.bandwidth_mhz = read(root, "bandwidth_mhz", c.bandwidth_mhz);

  YAML::Node wifi = root["wifi"] ? YAML::Clone(root["wifi"]) : YAML::Node(YAML::NodeType::Map);
  if (!wifi["preset"])
    wifi["preset"] = "sim-wifi";
  c.wifi = detail::wifi_from_yaml(wifi);
  if (root["laa"])
    c.laa = detail::laa_from_yaml(root["laa"]);

  c.wifi.payload_bytes = read(root, "payload", c.wifi.payload_bytes);
  c.wifi.beacon_interval = read(root, "beacon_interval", c.wifi.beacon_interval);
  c.beacon_bytes = read(root, "beacon_size", c.beacon_bytes);
  c.warmup = read(root, "warmup", c.warmup);
  c.measure_duration = read(root, "measure_duration", c.measure_duration);
  c.record_trace = read(root, "trace", c.record_trace);
  c.t_wifi = read(root, "t_wifi", c.t_wifi);
  if (root["ratio"] && root["t_laa"])
    throw ConfigError("give either t_laa or ratio, not both");
  if (root["ratio"]) {
    const double ratio = read(root, "ratio", 1.0);
    if (!(ratio > 0.0) || ratio > 1.0)
      throw ConfigError("ratio must be in (0, 1]");
    c.t_laa = c.t_wifi * (1.0 - ratio) / ratio;
  } else {
    c.t_laa = read(root, "t_laa", c.t_laa);
  }
  if (c.mode == SimMode::Dtm && !root["t_wifi"])
    throw ConfigError("dtm mode needs t_wifi");
  if (c.mode == SimMode::Dtm && !root["t_laa"] && !root["ratio"])
    throw ConfigError("dtm mode needs t_laa or ratio");
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

} // namespace unlshare
