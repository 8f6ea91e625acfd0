#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fsfcpt/oracle.hpp>
#include <fsfcpt/solver.hpp>

#include <cmath>
#include <complex>

using namespace fsfcpt;

namespace {

ComponentTable<double> two_line_table(double spacing) {
  ComponentTable<double> tab;
  tab.lo = -1;
  tab.hi = 0;
  tab.spacing = spacing;
  tab.a1.resize(2);
  tab.a2.resize(2);
  tab.ph.resize(2);
  tab.a1 << 5.0, 5.0;
  tab.a2 << 5.0, 5.0;
  tab.ph << 0.3, 0.9;
  tab.u1.resize(2);
  tab.u2.resize(2);
  for (int j = 0; j < 2; ++j) {
    tab.u1[j] = tab.a1[j] * std::polar(1.0, tab.ph[j]);
    tab.u2[j] = tab.a2[j] * std::polar(1.0, tab.ph[j]);
  }
  return tab;
}

LambdaSystem<double> dark_atom(double omega21) {
  LambdaSystem<double> s;
  s.omega21 = omega21;
  s.p1 = 0.55;
  s.p2 = 0.45;
  s.gamma_prime = 20.0;
  s.gamma_coh = 1e-4;
  s.nu = 0.0;
  s.kv0 = 0.0;
  s.delta1 = 0.0;
  return s;
}

LambdaSystem<double> atom3() {
  LambdaSystem<double> s;
  s.omega21 = 20.0;
  s.p1 = 0.55;
  s.p2 = 0.45;
  s.gamma_prime = 50.0;
  s.gamma_coh = 1.0;
  s.nu = 0.0;
  s.kv0 = 0.0;
  s.delta1 = 3.0;
  return s;
}

}  // namespace

TEST_CASE("two lines one splitting apart trap nearly all excitation") {
  // both arms bridged by adjacent comb lines: the coherent part eats
  // almost the whole resonant background pair
  auto tab = two_line_table(400.0);
  auto sys = dark_atom(400.0);
  auto pt = time_domain_oracle(sys, tab, 1, 0.0, 60.0, 2);

  CHECK(pt.s_cpt == doctest::Approx(-0.6218065767488326).epsilon(1e-5));
  const double resonant_pair = 0.625;  // two Lorentzian pairs on line center
  CHECK(std::abs(pt.s_cpt) / resonant_pair >= 0.99);

  // halving the spacing detunes the single-photon resonances and the
  // trapping weakens measurably
  auto tab2 = two_line_table(200.0);
  auto sys2 = dark_atom(200.0);
  auto pt2 = time_domain_oracle(sys2, tab2, 1, 0.0, 60.0, 2);
  CHECK(std::abs(pt2.s_cpt) / resonant_pair < 0.985);
  CHECK(std::abs(pt2.s_cpt) / resonant_pair ==
        doctest::Approx(0.980602).epsilon(1e-3));
}

TEST_CASE("one dark arm produces no coherent part") {
  auto sys = atom3();
  auto comb = make_comb(0.8, 0.0, 1.2, 20.0, 0.7, 0.3, 0.1, 1);
  auto pt = time_domain_oracle(sys, comb, 1, 0.0, 40.0, 2);
  CHECK(pt.s_background > 0.0);
  CHECK(std::abs(pt.s_cpt) <= 1e-6 * pt.s_background);
}

TEST_CASE("time average agrees with the harmonic solver") {
  auto sys = atom3();
  auto comb = make_comb(0.8, 0.8, 1.2, 20.0, 0.7, 0.3, 0.1, 1);
  auto tab = ComponentTable<double>::from_spec(comb);
  auto grid = build_velocity_grid(0.0, 1);
  for (double d : {0.0, 0.8}) {
    auto freq = cpt_signal(sys, tab, 1, d, grid);
    auto time = time_domain_oracle(sys, tab, 1, d, 40.0, 2);
    CHECK(time.s_cpt ==
          doctest::Approx(freq.s_cpt).epsilon(1e-3));
    CHECK(time.s_background ==
          doctest::Approx(freq.s_background).epsilon(1e-5));
  }
}

TEST_CASE("leftover transient is detected") {
  auto sys = atom3();
  auto comb = make_comb(0.8, 0.8, 1.2, 20.0, 0.7, 0.3, 0.1, 1);
  // two averaging windows fit, but the ground coherence is still
  // relaxing at this horizon
  CHECK_THROWS_AS(
      static_cast<void>(time_domain_oracle(sys, comb, 1, 0.0, 1.5, 2)),
      convergence_error);
}

TEST_CASE("horizon and window validation") {
  auto sys = atom3();
  auto comb = make_comb(0.8, 0.8, 1.2, 20.0, 0.7, 0.3, 0.1, 1);
  CHECK_THROWS_AS(
      static_cast<void>(time_domain_oracle(sys, comb, 1, 0.0, 0.5, 2)),
      domain_error);
  CHECK_THROWS_AS(
      static_cast<void>(time_domain_oracle(sys, comb, 1, 0.0, 40.0, 0)),
      domain_error);
  OracleOptions<double> opt;
  opt.samples = 3;
  CHECK_THROWS_AS(
      static_cast<void>(time_domain_oracle(sys, comb, 1, 0.0, 40.0, 2, opt)),
      domain_error);
}
