#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "fsfcpt/comb.hpp"

using fsfcpt::CombSpec;
using fsfcpt::make_comb;
namespace num = std::numbers;

using Vec = Eigen::VectorXd;

static Vec period_grid(const CombSpec<double>& spec, int n) {
  // n samples over [0, T), uniform
  return Vec::LinSpaced(n, 0.0, spec.period() * (n - 1) / n);
}

TEST_CASE("component_amplitude matches the Gaussian envelope") {
  auto spec = make_comb(1.0, 0.7, 10.0, 10.0, 0.0);
  CHECK(spec.n_max == 30);
  CHECK(fsfcpt::component_amplitude(spec, 1, 0) == 1.0);
  CHECK(fsfcpt::component_amplitude(spec, 1, 10) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(fsfcpt::component_amplitude(spec, 2, 0) == 0.7);

  SUBCASE("even in n, exactly") {
    for (int n = 0; n <= 30; ++n)
      CHECK(fsfcpt::component_amplitude(spec, 1, n) ==
            fsfcpt::component_amplitude(spec, 1, -n));
  }
  SUBCASE("exactly zero beyond the cutoff") {
    auto wide = make_comb(1.0, 1.0, 10.0, 10.0, 0.0, 0.0, 0.0, 30);
    CHECK(fsfcpt::component_amplitude(wide, 1, 35) == 0.0);
    CHECK(fsfcpt::component_amplitude(wide, 1, -31) == 0.0);
    CHECK(fsfcpt::component_amplitude(wide, 1, 30) > 0.0);
  }
  SUBCASE("bad arm rejected") {
    CHECK_THROWS_AS((void)fsfcpt::component_amplitude(spec, 3, 0),
                    fsfcpt::domain_error);
  }
}

TEST_CASE("component_phase is quadratic and reduced to [0, 2pi)") {
  auto spec = make_comb(1.0, 1.0, 10.0, 10.0, num::pi / 5);
  CHECK(fsfcpt::component_phase(spec, 0) == 0.0);
  CHECK(fsfcpt::component_phase(spec, 3) ==
        doctest::Approx(9 * num::pi / 5).epsilon(1e-14));
  CHECK(fsfcpt::component_phase(spec, 5) ==
        doctest::Approx(num::pi).epsilon(1e-12));
  for (int n = -90; n <= 90; n += 7) {
    const double p = fsfcpt::component_phase(spec, n);
    CHECK(p >= 0.0);
    CHECK(p < 2 * num::pi);
  }
  SUBCASE("beta and phi0 enter linearly") {
    auto s2 = make_comb(1.0, 1.0, 10.0, 10.0, 0.0, 0.25, 0.125);
    CHECK(fsfcpt::component_phase(s2, 2) ==
          doctest::Approx(0.625).epsilon(1e-14));
    CHECK(fsfcpt::component_phase(s2, -2) ==
          doctest::Approx(2 * num::pi - 0.375).epsilon(1e-12));
  }
}

TEST_CASE("alpha_from_cavity") {
  // 10 ns round trip, 2*pi*80 MHz spacing
  CHECK(fsfcpt::alpha_from_cavity(10e-9, 2 * num::pi * 80e6) ==
        doctest::Approx(2.5132741228718345).epsilon(1e-14));
  const double w = 123.4;
  CHECK(fsfcpt::alpha_from_cavity(2 * num::pi / w, w) ==
        doctest::Approx(num::pi).epsilon(1e-14));
  CHECK_THROWS_AS((void)fsfcpt::alpha_from_cavity(0.0, 1.0),
                  fsfcpt::domain_error);
  CHECK_THROWS_AS((void)fsfcpt::alpha_from_cavity(1.0, -2.0),
                  fsfcpt::domain_error);
}

TEST_CASE("optimal_alpha and alpha_tolerance") {
  CHECK(fsfcpt::optimal_alpha<double>(5, 1) ==
        doctest::Approx(num::pi / 5).epsilon(1e-14));
  CHECK(fsfcpt::optimal_alpha<double>(5, 5) ==
        doctest::Approx(num::pi).epsilon(1e-14));
  CHECK(fsfcpt::optimal_alpha<double>(1, 0) == 0.0);
  CHECK_THROWS_AS((void)fsfcpt::optimal_alpha<double>(0, 1),
                  fsfcpt::domain_error);

  CHECK(fsfcpt::alpha_tolerance(5, 10.0) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(fsfcpt::alpha_tolerance(10, 10.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK_THROWS_AS((void)fsfcpt::alpha_tolerance(1, 0.0), fsfcpt::domain_error);
  CHECK_THROWS_AS((void)fsfcpt::alpha_tolerance(0, 10.0), fsfcpt::domain_error);
}

TEST_CASE("pulse train: in-phase comb peaks at t=0") {
  auto spec = make_comb(1.0, 1.0, 10.0, 10.0, 0.0);
  Vec t = period_grid(spec, 1000);
  Vec I = fsfcpt::pulse_train_intensity(spec, t);

  double esum = 0.0;
  for (int n = -spec.n_max; n <= spec.n_max; ++n)
    esum += std::exp(-double(n) * n / (spec.n0 * spec.n0));
  CHECK(I[0] == doctest::Approx(esum * esum).epsilon(1e-12));
  CHECK(I.maxCoeff() == doctest::Approx(I[0]).epsilon(1e-12));
  CHECK(I.minCoeff() >= 0.0);

  CHECK_THROWS_AS((void)fsfcpt::pulse_train_intensity(spec, Vec{}),
                  fsfcpt::domain_error);
}

TEST_CASE("pulse train periods follow alpha") {
  const double T = 2 * num::pi / 10.0;
  SUBCASE("alpha = pi/5 gives five pulses per span") {
    auto spec = make_comb(1.0, 1.0, 10.0, 10.0, num::pi / 5);
    Vec I = fsfcpt::pulse_train_intensity(spec, period_grid(spec, 1000));
    CHECK(fsfcpt::fundamental_period(I, T) == doctest::Approx(T / 5).epsilon(1e-12));
  }
  SUBCASE("alpha = pi gives one pulse per span") {
    auto spec = make_comb(1.0, 1.0, 10.0, 10.0, num::pi);
    Vec I = fsfcpt::pulse_train_intensity(spec, period_grid(spec, 1000));
    CHECK(fsfcpt::fundamental_period(I, T) == doctest::Approx(T).epsilon(1e-12));
  }
  SUBCASE("alpha = 2pi/5 is indistinguishable from pi/5 spacing-wise") {
    // gcd structure: still five pulses per span
    auto spec = make_comb(1.0, 1.0, 10.0, 10.0, 2 * num::pi / 5);
    Vec I = fsfcpt::pulse_train_intensity(spec, period_grid(spec, 1000));
    CHECK(fsfcpt::fundamental_period(I, T) == doctest::Approx(T / 5).epsilon(1e-12));
  }
}

TEST_CASE("gauge invariance: beta and phi0 only translate the train") {
  const int N = 1000;
  auto base = make_comb(1.0, 1.0, 10.0, 10.0, num::pi / 5);
  const double T = base.period();
  Vec t = period_grid(base, N);

  // beta shifts time by beta/spacing; sample the shifted grid directly
  const double beta = 2 * num::pi * 17.0 / N;
  auto moved = make_comb(1.0, 1.0, 10.0, 10.0, num::pi / 5, beta, 0.77);
  Vec I_moved = fsfcpt::pulse_train_intensity(moved, t);
  Vec t_shift = t.array() + beta / base.spacing;
  Vec I_base_shifted = fsfcpt::pulse_train_intensity(base, t_shift);
  for (int i = 0; i < N; ++i)
    CHECK(I_moved[i] == doctest::Approx(I_base_shifted[i]).epsilon(1e-12));

  Vec I_base = fsfcpt::pulse_train_intensity(base, t);
  CHECK(I_moved.maxCoeff() == doctest::Approx(I_base.maxCoeff()).epsilon(1e-12));
}

TEST_CASE("alpha + pi changes the phase pattern by a pure translation") {
  auto a = make_comb(1.0, 1.0, 10.0, 10.0, 0.4);
  auto b = make_comb(1.0, 1.0, 10.0, 10.0, 0.4 + num::pi);
  Vec t = period_grid(a, 2000);
  Vec Ia = fsfcpt::pulse_train_intensity(a, t);
  Vec Ib = fsfcpt::pulse_train_intensity(b, t);
  CHECK(Ia.maxCoeff() == doctest::Approx(Ib.maxCoeff()).epsilon(1e-12));
}

TEST_CASE("mean intensity over one span is alpha-independent") {
  Vec t = period_grid(make_comb(1.0, 1.0, 10.0, 10.0, 0.0), 1024);
  double esq = 0.0;
  for (int n = -30; n <= 30; ++n)
    esq += std::exp(-2.0 * n * n / 100.0);
  for (double alpha : {0.0, num::pi / 5, 0.9, num::pi}) {
    auto spec = make_comb(1.0, 1.0, 10.0, 10.0, alpha);
    Vec I = fsfcpt::pulse_train_intensity(spec, t);
    CHECK(I.mean() == doctest::Approx(esq).epsilon(1e-10));
  }
}

TEST_CASE("ComponentTable mirrors the spec on a dense window") {
  auto spec = make_comb(2.0, 3.0, 4.0, 7.0, 0.3, 0.1, 0.2);
  auto tab = fsfcpt::ComponentTable<double>::from_spec(spec);
  CHECK(tab.lo == -12);
  CHECK(tab.hi == 12);
  CHECK(tab.size() == 25);
  CHECK(tab.spacing == 7.0);
  for (int n = tab.lo; n <= tab.hi; ++n) {
    CHECK(tab.A1(n) == fsfcpt::component_amplitude(spec, 1, n));
    CHECK(tab.A2(n) == fsfcpt::component_amplitude(spec, 2, n));
    CHECK(tab.PH(n) == fsfcpt::component_phase(spec, n));
    CHECK(std::abs(tab.U1(n)) == doctest::Approx(tab.A1(n)).epsilon(1e-14));
  }
  CHECK(tab.A1(13) == 0.0);
  CHECK(tab.A2(-13) == 0.0);
  CHECK(tab.U1(40) == std::complex<double>(0, 0));
  CHECK(tab.PH(99) == 0.0);
}

TEST_CASE("validation rejects broken specs") {
  CHECK_THROWS_AS((void)make_comb(1.0, 1.0, 0.0, 10.0, 0.0), fsfcpt::domain_error);
  CHECK_THROWS_AS((void)make_comb(1.0, 1.0, 10.0, -1.0, 0.0), fsfcpt::domain_error);
  CHECK_THROWS_AS((void)make_comb(-1.0, 1.0, 10.0, 10.0, 0.0), fsfcpt::domain_error);
  CombSpec<double> bad;
  bad.n_max = 0;
  CHECK_THROWS_AS(bad.validate(), fsfcpt::domain_error);
}

TEST_CASE("scalar-generic instantiation") {
  auto spec = make_comb<long double>(1.0L, 1.0L, 10.0L, 10.0L, 0.0L);
  CHECK(fsfcpt::component_amplitude(spec, 1, 0) == 1.0L);
  CHECK(static_cast<double>(fsfcpt::component_phase(spec, 4)) == 0.0);
}
