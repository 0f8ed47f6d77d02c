#include "unlshare/coex_model.hpp"
#include "unlshare/error.hpp"
#include "unlshare/mac_sim.hpp"
#include "unlshare/share_calc.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace unlshare;

namespace {

SimConfig dtm_config(int bw, Micros t_wifi, Micros t_laa, Micros measure = 1e6)
{
  SimConfig c;
  c.mode = SimMode::Dtm;
  c.bandwidth_mhz = bw;
  c.t_wifi = t_wifi;
  c.t_laa = t_laa;
  c.measure_duration = measure;
  return c;
}

SimConfig dfm_config(int bw, Micros measure = 1e6)
{
  SimConfig c;
  c.bandwidth_mhz = bw;
  c.measure_duration = measure;
  return c;
}

std::vector<TraceRecord> frames(const std::vector<TraceRecord>& trace, FrameKind kind)
{
  std::vector<TraceRecord> out;
  std::copy_if(trace.begin(), trace.end(), std::back_inserter(out), [&](const auto& r) { return r.kind == kind; });
  return out;
}

} // namespace

TEST_SUITE("mac_sim") {

TEST_CASE("time conversion and event order")
{
  CHECK(to_sim_time(16.0) == 16000);
  CHECK(to_sim_time(0.0005) == 1);
  CHECK(to_micros(44000) == 44.0);

  SimEvent a{100, EventKind::BackoffExpiry, 1, 0};
  SimEvent b{100, EventKind::WindowBoundary, 2, 0};
  SimEvent c{99, EventKind::BackoffExpiry, 3, 0};
  SimEvent d{100, EventKind::BackoffExpiry, 4, 0};
  CHECK(fires_before(b, a));
  CHECK(fires_before(c, b));
  CHECK(fires_before(a, d));
  CHECK_FALSE(fires_before(a, a));
}

TEST_CASE("CTS instant")
{
  CHECK(next_cts_instant(ApChannelState{0, 16.0}, 5'000'000) == 5'016'000);
  CHECK(next_cts_instant(ApChannelState{5'100'000, 16.0}, 5'000'000) == 5'116'000);
  CHECK(cts_downtime(6.0) - 16.0 == 44.0);
}

TEST_CASE("LAA window packing")
{
  const auto c1 = laa_preset("table4-class1");
  CHECK(laa_packed_airtime(0.0, c1) == 0.0);
  CHECK(laa_packed_airtime(499.0, c1) == 0.0);
  CHECK(laa_packed_airtime(2 * c1.txop_exclusive + 500.0, c1) == 2 * c1.txop_exclusive);
  CHECK(laa_packed_airtime(2 * c1.txop_exclusive + 400.0, c1) == c1.txop_exclusive + 1500.0);
  CHECK(laa_packed_airtime(1700.0, c1) == 1500.0);
  CHECK_THROWS_AS(laa_packed_airtime(-1.0, c1), InvalidArgument);
  CHECK(laa_window_airtime(2 * c1.txop_exclusive + 500.0, c1, 301.5, 10000.0) ==
        doctest::Approx(13.0 / 14.0 * 301.5 * 4000.0 / 10000.0));
  double prev = 0.0;
  for (Micros t = 0; t < 40000; t += 123.0) {
    const Micros a = laa_packed_airtime(t, c1);
    CHECK(a >= prev);
    CHECK(a <= t);
    prev = a;
  }
}

TEST_CASE("config parsing")
{
  auto c = parse_sim_config("mode: dtm\nbandwidth_mhz: 40\nt_wifi: 5000\nratio: 0.25\nseed: 9\n");
  CHECK(c.mode == SimMode::Dtm);
  CHECK(c.bandwidth_mhz == 40);
  CHECK(c.seed == 9);
  CHECK(c.t_laa == doctest::Approx(15000));
  CHECK(c.wifi.response_phy_header_time == wifi_preset("sim-wifi").response_phy_header_time);

  c = parse_sim_config("mode: dfm\npayload: 15000\nbeacon_interval: 204800\nlaa:\n  preset: table5-class4\n");
  CHECK(c.seed == default_seed());
  CHECK(c.wifi.payload_bytes == 15000);
  CHECK(c.wifi.beacon_interval == 204800.0);
  CHECK(c.laa.priority_class == 4);

  CHECK_THROWS_AS(parse_sim_config("mode: tdm\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("mode: dtm\nt_wifi: 5000\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("mode: dtm\nratio: 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("mode: dtm\nt_wifi: 5000\nt_laa: 10\nratio: 0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("bandwidth_mhz: 60\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("bandwith_mhz: 80\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("measure_duration: 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("mode: [dfm"), ConfigError);
}

TEST_CASE("mode mismatch is rejected")
{
  CHECK_THROWS_AS(run_dfm_simulation(dtm_config(80, 5000, 5000)), InvalidArgument);
  CHECK_THROWS_AS(run_dtm_simulation(dfm_config(80)), InvalidArgument);
  auto bad = dfm_config(80);
  bad.bandwidth_mhz = 30;
  CHECK_THROWS_AS(run_simulation(bad), InvalidArgument);
}

TEST_CASE("identical configs give identical results")
{
  for (auto c : {dfm_config(40), dtm_config(80, 5000, 5000)}) {
    c.record_trace = true;
    const auto a = run_simulation(c);
    const auto b = run_simulation(c);
    CHECK(a == b);
    std::ostringstream sa, sb;
    write_trace(sa, a.trace);
    write_trace(sb, b.trace);
    CHECK(sa.str() == sb.str());
    c.seed = 2;
    CHECK_FALSE(run_simulation(c) == a);
  }
}

TEST_CASE("trace format")
{
  auto c = dtm_config(20, 5000, 5000, 2e4);
  c.record_trace = true;
  const auto r = run_simulation(c);
  std::ostringstream out;
  write_trace(out, r.trace);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# unlshare frame trace v1");
  std::getline(in, line);
  CHECK(line == "# time_us\tnode\tkind\tduration_us\toutcome");
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    CHECK(std::count(line.begin(), line.end(), '\t') == 4);
    const auto first = line.substr(0, line.find('\t'));
    CHECK(first.size() > 4);
    CHECK(first[first.size() - 4] == '.');
  }
  CHECK(n == static_cast<int>(r.trace.size()));
  CHECK(std::is_sorted(r.trace.begin(), r.trace.end(),
                       [](const auto& a, const auto& b) { return a.time < b.time; }));
  for (auto kind : {FrameKind::AuthRequest, FrameKind::AssocResponse, FrameKind::ArpReply, FrameKind::Beacon,
                    FrameKind::Data, FrameKind::BlockAck, FrameKind::Cts, FrameKind::LaaBurst})
    CHECK_FALSE(frames(r.trace, kind).empty());
}

TEST_CASE("DTM keeps Wi-Fi and LAA apart")
{
  for (int bw : {20, 80, 160}) {
    auto c = dtm_config(bw, 5000, 3000, 2e5);
    c.record_trace = true;
    const auto r = run_simulation(c);
    CHECK(r.window_overruns == 0);
    const auto laa = frames(r.trace, FrameKind::LaaBurst);
    const auto cts = frames(r.trace, FrameKind::Cts);
    REQUIRE_FALSE(laa.empty());
    for (const auto& f : r.trace) {
      if (f.node == "ENB")
        continue;
      for (const auto& b : laa) {
        const bool overlap = f.time < b.time + b.duration && b.time < f.time + f.duration;
        CHECK_FALSE(overlap);
      }
    }
    // Every LAA burst lies inside the reservation of the CTS before it.
    for (const auto& b : laa) {
      auto it = std::find_if(cts.rbegin(), cts.rend(), [&](const auto& x) { return x.time <= b.time; });
      REQUIRE(it != cts.rend());
      const SimTime start = it->time + it->duration;
      const SimTime nav = to_sim_time(std::stod(it->outcome.substr(4)));
      CHECK(b.time >= start);
      CHECK(b.time + b.duration <= start + nav);
    }
  }
}

TEST_CASE("window accounting")
{
  for (int bw : {20, 160}) {
    for (double ratio : {0.25, 0.5, 0.75}) {
      const auto sched = DtmSchedule::from_wifi_window(5000, ratio);
      const auto r = run_simulation(dtm_config(bw, sched.t_wifi, sched.t_laa, 10e6));
      CHECK(r.window_overruns == 0);
      const double want = sched.t_wifi / (sched.t_wifi + sched.t_laa + 60.0);
      CHECK(r.wifi_window_time / 10e6 == doctest::Approx(want).epsilon(0.01));
      CHECK(r.wifi_airtime <= r.wifi_window_time);
    }
  }
}

TEST_CASE("NAV time matches the reservations")
{
  const auto r = run_simulation(dtm_config(80, 5000, 7000, 1e6));
  REQUIRE(r.cts_sent > 0);
  CHECK(std::abs(r.nav_silenced - r.cts_sent * 7000.0) <= 9.0 * r.cts_sent);

  const auto big = run_simulation(dtm_config(80, 5000, 40000, 1e6));
  CHECK(big.cts_sent >= 2 * big.laa_windows - 1);
  CHECK(big.cts_sent <= 2 * big.laa_windows);
  const auto full = big.cts_sent / 2;
  CHECK(std::abs(big.nav_silenced - (full * 40000.0 + (big.cts_sent % 2) * kMaxCtsReservation)) <=
        9.0 * big.cts_sent);

  auto traced = dtm_config(80, 5000, 40000, 2e5);
  traced.record_trace = true;
  const auto cts = frames(run_simulation(traced).trace, FrameKind::Cts);
  REQUIRE(cts.size() >= 2);
  CHECK(cts[0].outcome == "nav=32767.000");
  CHECK(cts[1].outcome == "nav=7233.000");
  CHECK(cts[1].time == cts[0].time + cts[0].duration + to_sim_time(32767.0) + to_sim_time(16.0));
}

TEST_CASE("delayed block ACK stretches the window")
{
  auto c = dtm_config(80, 5000, 5000, 2e5);
  c.record_trace = true;
  c.hooks.delayed_ack_window = 0;
  c.hooks.delayed_ack_extra = 2000.0;
  const auto r = run_simulation(c);
  CHECK(r.window_overruns == 1);
  const auto cts = frames(r.trace, FrameKind::Cts);
  const auto acks = frames(r.trace, FrameKind::BlockAck);
  REQUIRE_FALSE(cts.empty());
  auto last = std::find_if(acks.rbegin(), acks.rend(), [&](const auto& a) { return a.time < cts[0].time; });
  REQUIRE(last != acks.rend());
  CHECK(last->outcome == "ok delayed");
  CHECK(cts[0].time == last->time + last->duration + to_sim_time(16.0));

  const auto clean = run_simulation(dtm_config(80, 5000, 5000, 2e5));
  CHECK(clean.window_overruns == 0);
}

TEST_CASE("an empty LAA window behaves like DFM")
{
  const auto dtm = run_simulation(dtm_config(80, 5000, 0, 2e6));
  const auto dfm = run_simulation(dfm_config(80, 2e6));
  CHECK(dtm.cts_sent == 0);
  CHECK(dtm.wifi_throughput == doctest::Approx(dfm.wifi_throughput).epsilon(0.01));
}

TEST_CASE("a Wi-Fi window shorter than the minimum carries nothing")
{
  const auto r = run_simulation(dtm_config(80, 100, 9900, 1e6));
  CHECK(r.wifi_throughput == 0.0);
  CHECK(r.data_bursts == 0);
  const auto ref = run_simulation(dtm_config(80, 1000, 9900, 1e6));
  CHECK(r.laa_airtime_throughput > 0.0);
  CHECK(r.laa_airtime_throughput == doctest::Approx(ref.laa_airtime_throughput).epsilon(0.1));
}

TEST_CASE("without beacons the simulator reaches the stand-alone capacity")
{
  for (int bw : {20, 40, 80, 160}) {
    auto c = dfm_config(bw, 2e6);
    c.wifi.beacon_interval = 1e12;
    const auto r = run_simulation(c);
    CHECK(r.beacons <= 1); // the one at t = 0, inside the warm-up
    const auto s = CoexScenario::for_channel(c.wifi, laa_preset("table3-laa"), bw, Regime::NoCoex);
    const Mbps nc = capacity_no_coex(Rat::WiFi, s, s.wifi_duration_cap).value;
    CHECK(r.wifi_throughput == doctest::Approx(nc).epsilon(0.01));
  }
}

TEST_CASE("beacons cost a little throughput")
{
  for (int bw : {20, 40, 80, 160}) {
    const auto r = run_simulation(dfm_config(bw, 2e6));
    const auto s = CoexScenario::for_channel(wifi_preset("table2-wifi"), laa_preset("table3-laa"), bw,
                                             Regime::NoCoex);
    const Mbps analytical = capacity_no_coex(Rat::WiFi, s, s.wifi_duration_cap).value;
    CHECK(r.wifi_throughput < analytical);
    CHECK(r.wifi_throughput > 0.975 * analytical);
    CHECK(r.beacons >= 19);
  }
}

TEST_CASE("LAA throughput follows the window packing")
{
  // Measuring a whole number of periods removes the phase error.
  for (const char* name : {"table4-class1", "table5-class4"}) {
    for (double ratio : {0.25, 0.5, 0.75}) {
      const auto sched = DtmSchedule::from_period(10000, ratio);
      auto c = dtm_config(80, sched.t_wifi, sched.t_laa, 10e6);
      c.laa = laa_preset(name);
      const auto r = run_simulation(c);
      const Micros period = sched.t_wifi + sched.t_laa + 60.0;
      const Mbps want = laa_window_airtime(sched.t_laa, c.laa, peak_phy_rate(Rat::Laa, 80), period);
      CHECK(r.laa_airtime_throughput == doctest::Approx(want).epsilon(0.002));
    }
  }
}

TEST_CASE("LAA throughput against the DTM capacity")
{
  // The analytical LAA capacity charges one contention access per TXOP;
  // the scheduled window charges an idle LAA slot between bursts instead.
  // The two airtimes differ by at most one of those per burst.
  for (const char* name : {"table4-class1", "table5-class4"}) {
    for (double ratio : {0.25, 0.5, 0.75}) {
      const auto sched = DtmSchedule::from_period(10000, ratio);
      const auto s = CoexScenario::for_channel(wifi_preset("table2-wifi"), laa_preset(name), 80, Regime::Dtm);
      const Micros period = sched.t_wifi + sched.t_laa + 60.0;
      const double to_airtime = period / (13.0 / 14.0 * s.laa_rate);
      const Micros analytical = dtm_capacities(sched, s).c_l * to_airtime;
      const Micros packed = laa_window_airtime(sched.t_laa, s.laa, s.laa_rate, period) * to_airtime;
      const Micros txop = s.laa.txop_exclusive;
      const auto bursts = static_cast<int>(std::ceil(sched.t_laa / (txop + s.laa.laa_slot)));
      const Micros per_burst = std::max(laa_access_time(s.laa), s.laa.laa_slot);
      INFO(std::string(name) << " ratio " << ratio << " analytical " << analytical << " packed " << packed);
      CHECK(std::abs(packed - analytical) <= bursts * per_burst + 1e-6);
    }
  }
}

}
