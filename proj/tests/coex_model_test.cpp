#include "oracles.hpp"
#include "unlshare/coex_model.hpp"
#include "unlshare/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace unlshare;

namespace {

CoexScenario scenario(int bw, const char* laa = "table4-class1", int n_w = 1, int n_l = 1)
{
  auto s = CoexScenario::for_channel(wifi_preset("table2-wifi"), laa_preset(laa), bw);
  s.n_w = n_w;
  s.n_l = n_l;
  return s;
}

void check_against_mc(const CoexScenario& s, bool check_tau)
{
  const auto r = evaluate_coexistence(s);
  const auto mc = oracle::contention_monte_carlo(s);
  auto within = [](double model, const oracle::McEstimate& est) {
    return std::abs(model - est.value) <= 3.0 * est.se + 1e-12;
  };
  INFO("tau_w model " << r.equilibrium.tau_w << " mc " << mc.tau_w.value << " se " << mc.tau_w.se);
  INFO("tau_l model " << r.equilibrium.tau_l << " mc " << mc.tau_l.value << " se " << mc.tau_l.se);
  INFO("th_w model " << r.th_w << " mc " << mc.th_w.value << " se " << mc.th_w.se);
  INFO("th_l model " << r.th_l << " mc " << mc.th_l.value << " se " << mc.th_l.se);
  CHECK(within(r.th_w, mc.th_w));
  CHECK(within(r.th_l, mc.th_l));
  if (check_tau) {
    CHECK(within(r.equilibrium.tau_w, mc.tau_w));
    CHECK(within(r.equilibrium.tau_l, mc.tau_l));
    CHECK(within(r.equilibrium.pc_w, mc.pc_w));
    CHECK(within(r.equilibrium.pc_l, mc.pc_l));
  }
}

} // namespace

TEST_SUITE("coex_model") {

TEST_CASE("burst durations")
{
  const auto s = scenario(80);
  CHECK(wifi_burst_mpdus(s) == 64);
  const Micros ts = wifi_success_duration(s);
  const Micros psdu = 4.0 * std::ceil(64 * 1546 * 8 / 433.3 / 4.0);
  CHECK(ts == doctest::Approx(34 + 40 + psdu + 16 + s.wifi.response_phy_header_time + 44));
  const Micros ba = s.wifi.sifs + s.wifi.response_phy_header_time + block_ack_airtime(s.wifi);
  CHECK(wifi_collision_duration(s) == doctest::Approx(ts - ba + s.wifi.ack_timeout));

  auto t = s;
  t.wifi.ack_timeout = ba;
  CHECK(wifi_collision_duration(t) == doctest::Approx(ts));

  // Doubling the payload doubles only the PSDU term.
  auto base = s;
  base.wifi.tail_pad = TailPad::None;
  base.wifi.payload_bytes = 1000;
  base.wifi.mac_header_bytes = 0;
  base.wifi.llc_header_bytes = 0;
  base.wifi.delimiter_bytes = 0;
  base.wifi.max_mpdus = 10;
  base.wifi_duration_cap = 1e9;
  auto twice = base;
  twice.wifi.payload_bytes = 2000;
  const int n = wifi_burst_mpdus(base);
  CHECK(n == 10);
  CHECK(wifi_burst_mpdus(twice) == 10);
  const Micros payload_air = n * 1000 * 8 / base.wifi_rate;
  CHECK(wifi_success_duration(twice) - wifi_success_duration(base) == doctest::Approx(payload_air));

  auto empty = s;
  empty.wifi_duration_cap = 10.0;
  CHECK_THROWS_AS(wifi_success_duration(empty), EmptyBurst);

  CHECK(laa_burst_duration(laa_preset("table4-class1"), 2000) == 2250.0);
  CHECK(laa_burst_duration(laa_preset("table5-class4"), 8000) == 8250.0);
}

TEST_CASE("backoff closed forms")
{
  const auto w = wifi_preset("table2-wifi").backoff();
  const auto l = laa_preset("table4-class1").backoff();
  CHECK(backoff_root_probability(w, 0, 0) == doctest::Approx(2.0 / 19.0).epsilon(1e-14));
  CHECK(backoff_root_probability(l, 0, 0) == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
  CHECK(transmission_probability(2.0 / 19.0, 0, 7) == doctest::Approx(2.0 / 19.0));
  CHECK_THROWS_AS(backoff_root_probability(w, 0.1, 1.0), DegenerateBlocking);
  CHECK_THROWS_AS(backoff_root_probability(w, 1.0, 0.0), InvalidArgument);

  double prev = 1.0;
  for (double pc = 0.0; pc < 1.0; pc += 0.05) {
    const double b = backoff_root_probability(w, pc, 0.2);
    CHECK(b < prev);
    prev = b;
    const double tau = transmission_probability(b, pc, w.max_retries);
    CHECK(tau >= 0.0);
    CHECK(tau <= 1.0);
  }
}

TEST_CASE("coupling at the boundaries")
{
  auto s = scenario(80);
  s.n_l = 1;
  s.n_w = 1;
  auto c = coupling_step(0.3, 0.0, s);
  CHECK(c.pc_w == 0.0);
  c = coupling_step(0.0, 0.3, s);
  CHECK(c.pc_l == 0.0);
  c = coupling_step(0.0, 0.0, s);
  CHECK(c.pb_w == 0.0);
  CHECK(c.pb_l == 0.0);
}

TEST_CASE("single-technology equilibria")
{
  auto s = scenario(80, "table4-class1", 1, 0);
  auto eq = solve_equilibrium(s);
  CHECK(eq.tau_w == doctest::Approx(2.0 / 19.0).epsilon(1e-9));
  CHECK(eq.pc_w == 0.0);
  CHECK(eq.pb_w == 0.0);

  s = scenario(80, "table4-class1", 0, 1);
  eq = solve_equilibrium(s);
  CHECK(eq.tau_l == doctest::Approx(2.0 / 7.0).epsilon(1e-9));
  CHECK(eq.pc_l == 0.0);
  CHECK(eq.pb_l == 0.0);
}

TEST_CASE("fixed point is self-consistent")
{
  for (const char* laa : {"table4-class1", "table5-class4"}) {
    for (int bw : {20, 40, 80, 160}) {
      for (int n_w = 1; n_w <= 4; ++n_w) {
        for (int n_l = 1; n_l <= 4; ++n_l) {
          const auto s = scenario(bw, laa, n_w, n_l);
          const auto eq = solve_equilibrium(s);
          CHECK(eq.residual <= 1e-10);
          const auto c = coupling_step(eq.tau_w, eq.tau_l, s);
          CHECK(c.pc_w == doctest::Approx(eq.pc_w).epsilon(1e-8));
          CHECK(c.pc_l == doctest::Approx(eq.pc_l).epsilon(1e-8));
          const double tw = transmission_probability(
              backoff_root_probability(s.wifi.backoff(), c.pc_w, c.pb_w), c.pc_w, s.wifi.max_retries);
          const double tl = transmission_probability(
              backoff_root_probability(s.laa.backoff(), c.pc_l, c.pb_l), c.pc_l, s.laa.max_retries);
          CHECK(std::abs(tw - eq.tau_w) <= 1e-9);
          CHECK(std::abs(tl - eq.tau_l) <= 1e-9);

          const auto p = event_probabilities(eq, s);
          CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
          for (double v : {p.p_idle, p.ps_w, p.ps_l, p.pc_ww, p.pc_ll, p.pc_wl}) {
            CHECK(v >= -1e-15);
            CHECK(v <= 1.0 + 1e-15);
          }
        }
      }
    }
  }
}

TEST_CASE("solver is deterministic")
{
  const auto s = scenario(40, "table5-class4", 2, 3);
  const auto a = solve_equilibrium(s);
  const auto b = solve_equilibrium(s);
  CHECK(a.tau_w == b.tau_w);
  CHECK(a.tau_l == b.tau_l);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("solver reports non-convergence")
{
  SolverOptions o;
  o.max_iterations = 1;
  CHECK_THROWS_AS(solve_equilibrium(scenario(80, "table4-class1", 3, 3), o), ConvergenceError);
}

TEST_CASE("event probabilities at the corners")
{
  auto s = scenario(80);
  Equilibrium zero;
  auto p = event_probabilities(zero, s);
  CHECK(p.p_idle == 1.0);
  CHECK(p.ps_w + p.ps_l + p.pc_ww + p.pc_ll + p.pc_wl == 0.0);

  s.n_w = 2;
  s.n_l = 1;
  Equilibrium full;
  full.tau_w = 1.0;
  p = event_probabilities(full, s);
  CHECK(p.pc_ww == doctest::Approx(1.0));
}

TEST_CASE("mean slot duration against the dot product")
{
  const auto d = burst_durations(scenario(80));
  EventProbs idle;
  CHECK(mean_slot_duration(idle, d, 9.0) == 9.0);
  EventProbs succ;
  succ.p_idle = 0;
  succ.ps_w = 1;
  CHECK(mean_slot_duration(succ, d, 9.0) == doctest::Approx(d.ts_w));

  for (const char* laa : {"table4-class1", "table5-class4"}) {
    for (int bw : {20, 80, 160}) {
      const auto s = scenario(bw, laa, 2, 2);
      const auto eq = solve_equilibrium(s);
      const auto p = event_probabilities(eq, s);
      const auto dur = burst_durations(s);
      CHECK(mean_slot_duration(p, dur, 9.0) ==
            doctest::Approx(oracle::slot_duration_dot(p, dur, 9.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("throughput at the corners")
{
  const auto s = scenario(80);
  Equilibrium zero;
  CHECK(wifi_throughput(zero, s) == 0.0);
  CHECK(laa_throughput(zero, s) == 0.0);

  // Class 1 LAA bursts are shorter than a colliding Wi-Fi burst at 20 MHz:
  // the recovery term vanishes and only successes count.
  const auto c20 = scenario(20);
  const auto d = burst_durations(c20);
  CHECK(d.tc_w >= d.tc_l);
  const auto eq = solve_equilibrium(c20);
  const auto p = event_probabilities(eq, c20);
  const Micros tcs = mean_slot_duration(p, d, 9.0);
  CHECK(laa_throughput(eq, c20) ==
        doctest::Approx(13.0 * c20.laa_rate / (14.0 * tcs) * p.ps_l * c20.laa_txop).epsilon(1e-12));
}

TEST_CASE("stand-alone capacities")
{
  const auto w = wifi_preset("table2-wifi");
  const double table6[] = {81.00, 184.31, 377.22, 684.21};
  const int bws[] = {20, 40, 80, 160};
  for (int i = 0; i < 4; ++i) {
    const auto s = CoexScenario::for_channel(w, laa_preset("table3-laa"), bws[i], Regime::NoCoex);
    CHECK(capacity_no_coex(Rat::WiFi, s, s.wifi_duration_cap).value == doctest::Approx(table6[i]).epsilon(0.03));
  }
  auto w15 = w;
  w15.payload_bytes = 15000;
  const auto s = CoexScenario::for_channel(w15, laa_preset("table3-laa"), 80, Regime::NoCoex);
  CHECK(capacity_no_coex(Rat::WiFi, s, s.wifi_duration_cap).value == doctest::Approx(415.51).epsilon(0.03));

  const auto z = capacity_no_coex(Rat::WiFi, s, 0.0);
  CHECK(z.value == 0.0);
  CHECK(z.zero_by_cap);
  const auto zl = capacity_no_coex(Rat::Laa, s, 0.0);
  CHECK(zl.value == 0.0);
  CHECK(zl.zero_by_cap);

  // Forcing the other technology silent reproduces the stand-alone value.
  auto alone = scenario(80, "table4-class1", 1, 0);
  const auto r = evaluate_coexistence(alone);
  CHECK(r.th_w == doctest::Approx(capacity_no_coex(Rat::WiFi, alone, alone.wifi_duration_cap).value));
}

TEST_CASE("throughput degrades with more competitors")
{
  for (const char* laa : {"table4-class1", "table5-class4"}) {
    for (int bw : {20, 40, 80, 160}) {
      for (int n = 1; n <= 4; ++n) {
        double prev_w = 1e18, prev_l = 1e18;
        for (int m = 1; m <= 4; ++m) {
          const Mbps th_w = evaluate_coexistence(scenario(bw, laa, n, m)).th_w;
          const Mbps th_l = evaluate_coexistence(scenario(bw, laa, m, n)).th_l;
          CHECK(th_w <= prev_w + 1e-9);
          CHECK(th_l <= prev_l + 1e-9);
          prev_w = th_w;
          prev_l = th_l;
        }
      }
    }
  }
}

TEST_CASE("Monte Carlo oracle: one node each, class 1, 80 MHz")
{
  check_against_mc(scenario(80, "table4-class1"), true);
}

TEST_CASE("Monte Carlo oracle: one node each, class 4, 80 MHz")
{
  check_against_mc(scenario(80, "table5-class4"), false);
}

TEST_CASE("invalid scenarios are rejected")
{
  auto s = scenario(80);
  s.n_w = -1;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = scenario(80);
  s.p_fc = 1.5;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  CHECK_THROWS_AS(CoexScenario::for_channel(wifi_preset("table2-wifi"), laa_preset("table4-class1"), 60),
                  InvalidArgument);
}

}
