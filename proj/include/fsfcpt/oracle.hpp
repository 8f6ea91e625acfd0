#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "fsfcpt/atom.hpp"
#include "fsfcpt/comb.hpp"
#include "fsfcpt/errors.hpp"
#include "fsfcpt/solver.hpp"

// Brute-force cross-check for the harmonic solver: integrates the
// rotating-frame equations of motion directly in time, then averages
// the excitation rate over trailing comb periods. Shares no code with
// the steady-state path beyond the component table.

namespace fsfcpt {

namespace detail {

// Dormand-Prince 5(4) with adaptive steps. Steps are clipped to the
// requested stop times so samples are exact state evaluations rather
// than interpolants.
template <typename Scalar, typename F, typename OnStop>
void dp45_integrate(F&& f, Scalar t0, Scalar t1,
                    Eigen::VectorX<std::complex<Scalar>>& y, Scalar rtol,
                    Scalar atol, const std::vector<Scalar>& stops,
                    OnStop&& on_stop) {
  using Vec = Eigen::VectorX<std::complex<Scalar>>;
  const auto rms = [](const Vec& v, const Eigen::VectorX<Scalar>& scale) {
    Scalar acc = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const Scalar q = std::abs(v[i]) / scale[i];
      acc += q * q;
    }
    return std::sqrt(acc / Scalar(v.size()));
  };
  const auto scale_of = [&](const Vec& a, const Vec& b) {
    Eigen::VectorX<Scalar> s(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
      s[i] = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    return s;
  };

  static constexpr Scalar A21 = Scalar(1) / 5;
  static constexpr Scalar A31 = Scalar(3) / 40, A32 = Scalar(9) / 40;
  static constexpr Scalar A41 = Scalar(44) / 45, A42 = Scalar(-56) / 15,
                          A43 = Scalar(32) / 9;
  static constexpr Scalar A51 = Scalar(19372) / 6561,
                          A52 = Scalar(-25360) / 2187,
                          A53 = Scalar(64448) / 6561, A54 = Scalar(-212) / 729;
  static constexpr Scalar A61 = Scalar(9017) / 3168, A62 = Scalar(-355) / 33,
                          A63 = Scalar(46732) / 5247, A64 = Scalar(49) / 176,
                          A65 = Scalar(-5103) / 18656;
  static constexpr Scalar B1 = Scalar(35) / 384, B3 = Scalar(500) / 1113,
                          B4 = Scalar(125) / 192, B5 = Scalar(-2187) / 6784,
                          B6 = Scalar(11) / 84;
  static constexpr Scalar E1 = Scalar(71) / 57600, E3 = Scalar(-71) / 16695,
                          E4 = Scalar(71) / 1920, E5 = Scalar(-17253) / 339200,
                          E6 = Scalar(22) / 525, E7 = Scalar(-1) / 40;
  static constexpr Scalar C2 = Scalar(1) / 5, C3 = Scalar(3) / 10,
                          C4 = Scalar(4) / 5, C5 = Scalar(8) / 9;

  Scalar t = t0;
  Vec k1 = f(t, y), k2, k3, k4, k5, k6, k7, ynew;
  std::size_t next_stop = 0;
  while (next_stop < stops.size() && stops[next_stop] <= t0) {
    on_stop(stops[next_stop], y);
    ++next_stop;
  }

  // initial step from local derivative scales
  Scalar h;
  {
    const auto sc = scale_of(y, y);
    const Scalar d0 = rms(y, sc), d1 = rms(k1, sc);
    Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5))
                    ? Scalar(1e-6)
                    : Scalar(0.01) * d0 / d1;
    h0 = std::min(h0, (t1 - t0) / 2);
    Vec y1 = y + h0 * k1;
    Vec f1 = f(t + h0, y1);
    const Scalar d2 = rms(Vec(f1 - k1), sc) / h0;
    const Scalar dm = std::max(d1, d2);
    const Scalar h1 = (dm <= Scalar(1e-15))
                          ? std::max(Scalar(1e-6), h0 * Scalar(1e-3))
                          : std::pow(Scalar(0.01) / dm, Scalar(0.2));
    h = std::min({Scalar(100) * h0, h1, t1 - t0});
  }

  const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * 16;
  while (t < t1 - tiny * std::max(Scalar(1), std::abs(t1))) {
    Scalar h_try = std::min(h, t1 - t);
    bool hit_stop = false;
    if (next_stop < stops.size() && t + h_try >= stops[next_stop] - tiny) {
      h_try = stops[next_stop] - t;
      hit_stop = true;
    }
    const bool clipped = h_try < h;
    if (!(h_try > std::abs(t) * tiny))
      throw convergence_error("time-domain integration: step size collapsed");

    k2 = f(t + C2 * h_try, Vec(y + h_try * (A21 * k1)));
    k3 = f(t + C3 * h_try, Vec(y + h_try * (A31 * k1 + A32 * k2)));
    k4 = f(t + C4 * h_try, Vec(y + h_try * (A41 * k1 + A42 * k2 + A43 * k3)));
    k5 = f(t + C5 * h_try,
           Vec(y + h_try * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)));
    k6 = f(t + h_try, Vec(y + h_try * (A61 * k1 + A62 * k2 + A63 * k3 +
                                       A64 * k4 + A65 * k5)));
    ynew = y + h_try * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    k7 = f(t + h_try, ynew);
    const Vec err = h_try * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 +
                             E7 * k7);
    const Scalar en = rms(err, scale_of(y, ynew));

    if (en <= Scalar(1)) {
      t += h_try;
      y.swap(ynew);
      k1.swap(k7);
      if (hit_stop) {
        on_stop(stops[next_stop], y);
        ++next_stop;
      }
      const Scalar grow =
          (en == Scalar(0)) ? Scalar(10)
                            : std::min(Scalar(10), Scalar(0.9) *
                                                       std::pow(en, Scalar(-0.2)));
      // a step shortened only to land on a stop must not drag the
      // adaptive suggestion down with it
      h = std::max(clipped ? h : Scalar(0),
                   h_try * std::max(Scalar(0.2), grow));
    } else {
      h = h_try *
          std::max(Scalar(0.2), Scalar(0.9) * std::pow(en, Scalar(-0.2)));
    }
  }
  while (next_stop < stops.size()) {
    on_stop(stops[next_stop], y);
    ++next_stop;
  }
}

// composite Simpson average over a uniform window, odd sample count
template <typename Scalar>
Scalar simpson_mean(const std::vector<Scalar>& v, Scalar span) {
  const std::size_t n = v.size();
  const Scalar dt = span / Scalar(n - 1);
  Scalar acc = v.front() + v.back();
  for (std::size_t i = 1; i + 1 < n; ++i) acc += (i % 2 ? 4 : 2) * v[i];
  return acc * dt / (3 * span);
}

template <typename Scalar>
Scalar time_domain_rate(const LambdaSystem<Scalar>& sys,
                        const ComponentTable<Scalar>& tab, int m_tilde,
                        Scalar delta, Scalar horizon, int average_window,
                        bool suppress, int nodes, Scalar rtol, Scalar atol,
                        int samples, Scalar transient_tol) {
  using Complex = std::complex<Scalar>;
  using Vec = Eigen::VectorX<Complex>;
  const Complex I(0, 1);

  const Scalar w = tab.spacing;
  const Scalar om21 = delta + Scalar(m_tilde) * w;
  const Scalar d1 = sys.delta1;
  const Scalar d2 = d1 - om21;
  const Scalar gp = sys.gamma_prime, gc = sys.gamma_coh, nu = sys.nu;

  const auto grid = build_velocity_grid(sys.kv0, nodes);
  const Eigen::Index nv = grid.size();
  const int nlines = tab.size();

  // comb envelopes over the window; E1(t), E2(t) carry the phases
  Eigen::VectorX<Scalar> a1(nlines), a2(nlines), ph(nlines);
  for (int n = tab.lo; n <= tab.hi; ++n) {
    a1[n - tab.lo] = tab.A1(n);
    a2[n - tab.lo] = tab.A2(n);
    ph[n - tab.lo] = tab.PH(n);
  }
  const auto fields = [&](Scalar t, Complex& e1, Complex& e2) {
    e1 = Complex{};
    e2 = Complex{};
    for (int j = 0; j < nlines; ++j) {
      const Complex e =
          std::polar(Scalar(1), Scalar(tab.lo + j) * w * t + ph[j]);
      e1 += a1[j] * e;
      e2 += a2[j] * e;
    }
  };

  // state layout: per node (rho12, sigma13, sigma32)
  const auto rhs = [&](Scalar t, const Vec& y) {
    Vec dy(y.size());
    Complex e1, e2;
    fields(t, e1, e2);
    Complex n12{};
    if (nu != Scalar(0))
      for (Eigen::Index k = 0; k < nv; ++k) n12 += grid.weights[k] * y[3 * k];
    for (Eigen::Index k = 0; k < nv; ++k) {
      const Scalar kv = sys.kv0 * grid.nodes[k];
      const Complex r12 = y[3 * k], s13 = y[3 * k + 1], s32 = y[3 * k + 2];
      dy[3 * k] = Scalar(-0.5) * I * (e1 * s32 - std::conj(e2) * s13) +
                  I * om21 * r12 - gc * r12 - nu * (r12 - n12);
      const Complex c12 = suppress ? Complex{} : r12;
      dy[3 * k + 1] = Scalar(0.5) * I * (sys.p1 * e1 + c12 * e2) +
                      (I * (d1 + kv) - gp) * s13;
      dy[3 * k + 2] =
          Scalar(-0.5) * I * (sys.p2 * std::conj(e2) + c12 * std::conj(e1)) -
          (I * (d2 + kv) + gp) * s32;
    }
    return dy;
  };

  const auto rate = [&](Scalar t, const Vec& y) {
    Complex e1, e2;
    fields(t, e1, e2);
    Scalar tot = 0;
    for (Eigen::Index k = 0; k < nv; ++k)
      tot += grid.weights[k] * (std::imag(y[3 * k + 1] * std::conj(e1)) -
                                std::imag(y[3 * k + 2] * e2));
    return tot;
  };

  const Scalar period = 2 * EIGEN_PI / w;
  const Scalar win = Scalar(average_window) * period;
  // two trailing windows: the first detects a leftover transient, the
  // second is the reported average
  const Scalar t_mark = horizon - 2 * win;
  const int ns = samples | 1;
  std::vector<Scalar> stops(2 * static_cast<std::size_t>(ns) - 1);
  for (std::size_t i = 0; i < stops.size(); ++i)
    stops[i] = t_mark + win * Scalar(2 * i) / Scalar(stops.size() - 1);
  stops.back() = horizon;

  std::vector<Scalar> vals;
  vals.reserve(stops.size());
  Vec y = Vec::Zero(3 * nv);
  dp45_integrate(
      rhs, Scalar(0), horizon, y, rtol, atol, stops,
      [&](Scalar t, const Vec& st) { vals.push_back(rate(t, st)); });

  const std::vector<Scalar> va(vals.begin(), vals.begin() + ns);
  const std::vector<Scalar> vb(vals.end() - ns, vals.end());
  const Scalar avg_a = simpson_mean(va, win);
  const Scalar avg_b = simpson_mean(vb, win);
  const Scalar scl = std::max({std::abs(avg_a), std::abs(avg_b), 10 * atol});
  if (std::abs(avg_a - avg_b) > transient_tol * scl)
    throw convergence_error(
        "time-domain average still drifting between trailing windows (" +
        std::to_string(static_cast<double>(avg_a)) + " vs " +
        std::to_string(static_cast<double>(avg_b)) +
        "); extend the horizon");
  return avg_b;
}

}  // namespace detail

template <typename Scalar = double>
struct OracleOptions {
  int nodes{8};
  Scalar rtol{Scalar(1e-10)};
  Scalar atol{Scalar(1e-12)};
  int samples{2001};
  Scalar transient_tol{Scalar(1e-5)};
};

// Integrates the full equations and a coherence-suppressed companion
// run; their difference isolates the resonant part of the excitation
// rate, the companion run is the background.
template <typename Scalar>
SignalPoint<Scalar> time_domain_oracle(const LambdaSystem<Scalar>& sys,
                                       const ComponentTable<Scalar>& tab,
                                       int m_tilde, Scalar delta,
                                       Scalar horizon, int average_window = 2,
                                       const OracleOptions<Scalar>& opt = {}) {
  sys.validate();
  if (!(tab.spacing > Scalar(0)))
    throw domain_error("time_domain_oracle: spacing must be positive");
  if (average_window < 1)
    throw domain_error("time_domain_oracle: average_window must be >= 1");
  const Scalar period = 2 * EIGEN_PI / tab.spacing;
  if (!(horizon >= 2 * Scalar(average_window) * period))
    throw domain_error(
        "time_domain_oracle: horizon shorter than two averaging windows");
  if (opt.samples < 5)
    throw domain_error("time_domain_oracle: need at least 5 samples");

  const Scalar full = detail::time_domain_rate(
      sys, tab, m_tilde, delta, horizon, average_window, false, opt.nodes,
      opt.rtol, opt.atol, opt.samples, opt.transient_tol);
  const Scalar bg = detail::time_domain_rate(
      sys, tab, m_tilde, delta, horizon, average_window, true, opt.nodes,
      opt.rtol, opt.atol, opt.samples, opt.transient_tol);

  SignalPoint<Scalar> out;
  out.delta = delta;
  out.s_cpt = full - bg;
  out.s_background = bg;
  return out;
}

template <typename Scalar>
SignalPoint<Scalar> time_domain_oracle(const LambdaSystem<Scalar>& sys,
                                       const CombSpec<Scalar>& comb,
                                       int m_tilde, Scalar delta,
                                       Scalar horizon, int average_window = 2,
                                       const OracleOptions<Scalar>& opt = {}) {
  return time_domain_oracle(sys, ComponentTable<Scalar>::from_spec(comb),
                            m_tilde, delta, horizon, average_window, opt);
}

}  // namespace fsfcpt
