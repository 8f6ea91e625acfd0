#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <fsfcpt/fit.hpp>
#include <fsfcpt/limits.hpp>
#include <fsfcpt/solver.hpp>

using namespace fsfcpt;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("velocity-averaged signal reproduces frozen references") {
  LambdaSystem<double> sys;
  sys.omega21 = 60.0;
  sys.p1 = 0.6;
  sys.p2 = 0.4;
  sys.gamma_prime = 50.0;
  sys.gamma_coh = 1.0;
  sys.nu = 3.0;
  sys.delta1 = 7.0;
  const auto comb = make_comb(1.0, 1.2, 4.0, 30.0, 0.9, 0.2, 0.4);

  sys.kv0 = 100.0;
  CHECK(rel(signal_doppler(sys, comb, 2, 0.0), 7.882723245710276e-06) < 1e-10);
  CHECK(rel(signal_doppler(sys, comb, 2, 0.7), 7.864142354349028e-06) < 1e-10);
  CHECK(rel(signal_doppler(sys, comb, 2, 0.3, true), -9.717130090447642e-05) <
        1e-10);

  sys.kv0 = 500.0;
  CHECK(rel(signal_doppler(sys, comb, 2, 0.0), 1.6935835751583973e-06) <
        1e-10);
  CHECK(rel(signal_doppler(sys, comb, 2, 0.7), 1.692459795121836e-06) < 1e-10);
}

TEST_CASE("motionless limit reproduces the harmonic solver") {
  LambdaSystem<double> sys;
  sys.omega21 = 61.0;
  sys.gamma_prime = 200.0;
  sys.gamma_coh = 1.0;
  sys.kv0 = 0.0;
  sys.delta1 = 0.0;
  const auto comb = make_comb(0.2, 0.2, 4.0, 30.0, 0.9, 0.2, 0.4);
  const auto tab = ComponentTable<double>::from_spec(comb);
  const auto grid = build_velocity_grid(0.0, 1);

  CHECK(rel(signal_doppler(sys, tab, 2, 0.0), 9.72024707785664e-10) < 1e-12);
  double worst = 0.0;
  for (double d : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    const double exact = signal_doppler(sys, tab, 2, d);
    const double full = cpt_signal(sys, tab, 2, d, grid).s_cpt;
    worst = std::max(worst, rel(exact, full));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("fast path drops the phase dependence") {
  LambdaSystem<double> sys;
  sys.omega21 = 1000.0;
  sys.gamma_prime = 10.0;
  sys.gamma_coh = 1.0;
  sys.kv0 = 5000.0;
  sys.delta1 = 0.0;

  std::vector<double> vals;
  for (double alpha : {0.0, 0.3, 1.1, kPi})
    vals.push_back(signal_doppler(
        sys, make_comb(1.0, 1.0, 5.0, 200.0, alpha), 5, 0.4, true));
  const double v0 = vals.front();
  for (double v : vals) CHECK(rel(v, v0) < 1e-10);
}

TEST_CASE("resonance contrast grows with the homogeneous width") {
  auto contrast = [](double gamma_prime) {
    LambdaSystem<double> sys;
    sys.omega21 = 1000.0;
    sys.gamma_prime = gamma_prime;
    sys.gamma_coh = 1.0;
    sys.kv0 = 5000.0;
    sys.delta1 = 0.0;
    double vmin = std::numeric_limits<double>::infinity(), vmax = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double alpha = kPi * i / 40.0;
      const double s = std::abs(signal_doppler(
          sys, make_comb(1.0, 1.0, 5.0, 200.0, alpha), 5, 0.0));
      vmin = std::min(vmin, s);
      vmax = std::max(vmax, s);
    }
    return (vmax - vmin) / vmax;
  };
  const double c10 = contrast(10.0);
  const double c20 = contrast(20.0);
  CHECK(c10 < c20);
  CHECK(rel(c10, 0.042964) < 1e-3);
  CHECK(rel(c20, 0.152205) < 1e-3);
}

TEST_CASE("velocity-changing collisions deepen the averaged dip") {
  LambdaSystem<double> sys;
  sys.omega21 = 500.0;
  sys.gamma_prime = 200.0;
  sys.gamma_coh = 1.0;
  sys.kv0 = 2000.0;
  sys.delta1 = 0.0;
  const auto comb = make_comb(0.2, 0.2, 10.0, 50.0, kPi / 10);
  const auto tab = ComponentTable<double>::from_spec(comb);

  const std::vector<double> frozen{
      3.416011264237422e-08, 2.392132323623633e-08, 1.555050087788716e-08,
      1.3921187050399039e-08, 1.380625300731099e-08};
  const std::vector<double> nus{0.0, 1.0, 10.0, 100.0, 1000.0};
  std::vector<double> vals;
  for (std::size_t i = 0; i < nus.size(); ++i) {
    sys.nu = nus[i];
    vals.push_back(std::abs(signal_doppler(sys, tab, 10, 0.0)));
    CHECK(rel(vals.back(), frozen[i]) < 1e-10);
  }
  for (std::size_t i = 0; i + 1 < vals.size(); ++i)
    CHECK(vals[i] > vals[i + 1]);
}

TEST_CASE("linewidth against collisions rises then falls") {
  LambdaSystem<double> sys;
  sys.omega21 = 500.0;
  sys.gamma_prime = 200.0;
  sys.gamma_coh = 1.0;
  sys.kv0 = 2000.0;
  sys.delta1 = 0.0;
  const auto tab =
      ComponentTable<double>::from_spec(make_comb(0.2, 0.2, 10.0, 50.0, kPi));

  const std::vector<double> frozen{0.9898203679856703, 1.0270413764683222,
                                   1.0000366597874841, 0.9999654146444147,
                                   0.9999693964042097};
  const std::vector<double> nus{0.0, 10.0, 50.0, 200.0, 1000.0};
  std::vector<double> widths;
  for (std::size_t i = 0; i < nus.size(); ++i) {
    sys.nu = nus[i];
    const auto fit = measure_half_width(
        [&](double d) { return signal_doppler(sys, tab, 10, d); }, 1.0);
    REQUIRE(fit.status > 0);
    widths.push_back(fit.width);
    CHECK(rel(fit.width, frozen[i]) < 1e-5);
  }
  // moderate collisions broaden the averaged line, strong ones restore it
  CHECK(widths[1] > widths[0]);
  CHECK(widths[1] > widths[2]);
  CHECK(widths[2] > widths[3]);
  CHECK(widths[1] > widths[4]);
}
