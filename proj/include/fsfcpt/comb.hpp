#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

#include "fsfcpt/errors.hpp"

namespace fsfcpt {

// Spectral comb of the frequency-shifted-feedback laser: Gaussian
// amplitude envelope over equidistant components, quadratic phases.
// All rates are in units of the ground-coherence relaxation rate.
template <typename Scalar = double>
struct CombSpec {
  Scalar rabi1{1};    // peak Rabi frequency, arm |1> <-> |3>
  Scalar rabi2{1};    // peak Rabi frequency, arm |2> <-> |3>
  Scalar n0{10};      // envelope width, component counts
  Scalar spacing{10}; // component frequency difference
  Scalar alpha{0};    // quadratic phase coefficient [rad]
  Scalar beta{0};     // linear phase coefficient [rad]
  Scalar phi0{0};     // constant phase [rad]
  int n_max{30};      // components kept for |n| <= n_max

  Scalar period() const {
    return Scalar(2) * std::numbers::pi_v<Scalar> / spacing;
  }

  void validate() const {
    if (!(n0 > Scalar(0))) throw domain_error("comb: n0 must be > 0");
    if (!(spacing > Scalar(0))) throw domain_error("comb: spacing must be > 0");
    if (n_max < 1) throw domain_error("comb: n_max must be >= 1");
    if (rabi1 < Scalar(0) || rabi2 < Scalar(0))
      throw domain_error("comb: peak Rabi frequencies must be >= 0");
  }
};

inline int default_component_cutoff(double n0) {
  return static_cast<int>(std::ceil(3.0 * n0));
}

template <typename Scalar>
CombSpec<Scalar> make_comb(Scalar rabi1, Scalar rabi2, Scalar n0,
                           Scalar spacing, Scalar alpha, Scalar beta = Scalar(0),
                           Scalar phi0 = Scalar(0), int n_max = 0) {
  CombSpec<Scalar> spec;
  spec.rabi1 = rabi1;
  spec.rabi2 = rabi2;
  spec.n0 = n0;
  spec.spacing = spacing;
  spec.alpha = alpha;
  spec.beta = beta;
  spec.phi0 = phi0;
  spec.n_max = n_max > 0 ? n_max : default_component_cutoff(static_cast<double>(n0));
  spec.validate();
  return spec;
}

// Rabi amplitude of component n on the selected arm. Exactly zero
// beyond the truncation bound.
template <typename Scalar>
Scalar component_amplitude(const CombSpec<Scalar>& spec, int arm, int n) {
  if (arm != 1 && arm != 2)
    throw domain_error("component_amplitude: arm must be 1 or 2");
  if (n > spec.n_max || n < -spec.n_max) return Scalar(0);
  const Scalar peak = (arm == 1) ? spec.rabi1 : spec.rabi2;
  const Scalar nf = static_cast<Scalar>(n);
  return peak * std::exp(-(nf * nf) / (spec.n0 * spec.n0));
}

// Phase of component n, alpha n^2 + beta n + phi0, reduced to [0, 2*pi).
template <typename Scalar>
Scalar component_phase(const CombSpec<Scalar>& spec, int n) {
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar nf = static_cast<Scalar>(n);
  Scalar r = std::fmod(spec.alpha * (nf * nf) + spec.beta * nf + spec.phi0, two_pi);
  if (r < Scalar(0)) r += two_pi;
  return r;
}

// Quadratic phase coefficient from the cavity round-trip time and the
// component spacing: half their product.
template <typename Scalar>
Scalar alpha_from_cavity(Scalar round_trip_time, Scalar spacing) {
  if (!(round_trip_time > Scalar(0)))
    throw domain_error("alpha_from_cavity: round_trip_time must be > 0");
  if (!(spacing > Scalar(0)))
    throw domain_error("alpha_from_cavity: spacing must be > 0");
  return Scalar(0.5) * round_trip_time * spacing;
}

// Values of alpha at which the dark-resonance amplitude is maximal:
// integer multiples of pi/m_tilde.
template <typename Scalar = double>
Scalar optimal_alpha(int m_tilde, int j) {
  if (m_tilde < 1) throw domain_error("optimal_alpha: m_tilde must be >= 1");
  return std::numbers::pi_v<Scalar> * static_cast<Scalar>(j) /
         static_cast<Scalar>(m_tilde);
}

// Width of the alpha window around an optimum within which the signal
// stays near maximal.
template <typename Scalar>
Scalar alpha_tolerance(int m, Scalar n0) {
  if (m < 1) throw domain_error("alpha_tolerance: m must be >= 1");
  if (!(n0 > Scalar(0))) throw domain_error("alpha_tolerance: n0 must be > 0");
  return Scalar(1) / (static_cast<Scalar>(m) * n0);
}

// Time-domain intensity of the comb over a grid of times, unit-peak
// envelope. Scale is arbitrary; shape and periodicity are what matter.
template <typename Scalar, typename Derived>
Eigen::Vector<Scalar, Eigen::Dynamic> pulse_train_intensity(
    const CombSpec<Scalar>& spec, const Eigen::DenseBase<Derived>& times) {
  if (times.size() == 0)
    throw domain_error("pulse_train_intensity: empty time grid");
  spec.validate();

  using Complex = std::complex<Scalar>;
  const int m = 2 * spec.n_max + 1;
  Eigen::Vector<Scalar, Eigen::Dynamic> env(m), ph(m);
  for (int n = -spec.n_max; n <= spec.n_max; ++n) {
    const Scalar nf = static_cast<Scalar>(n);
    env[n + spec.n_max] = std::exp(-(nf * nf) / (spec.n0 * spec.n0));
    ph[n + spec.n_max] = component_phase(spec, n);
  }

  Eigen::Vector<Scalar, Eigen::Dynamic> out(times.size());
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    const Scalar t = static_cast<Scalar>(times.derived()(i));
    Complex field{};
    for (int n = -spec.n_max; n <= spec.n_max; ++n)
      field += std::polar(env[n + spec.n_max],
                          static_cast<Scalar>(n) * spec.spacing * t +
                              ph[n + spec.n_max]);
    out[i] = std::norm(field);
  }
  return out;
}

// Repetition time of a uniformly sampled trace covering one full span.
// Circular autocorrelation of the de-meaned samples; the first interior
// local maximum at or above `threshold` sets the period, otherwise the
// trace does not repeat within the span and the full span is returned.
template <typename Derived,
          typename Scalar = typename Derived::Scalar>
Scalar fundamental_period(const Eigen::DenseBase<Derived>& samples,
                          Scalar span, Scalar threshold = Scalar(0.9)) {
  const Eigen::Index n = samples.size();
  if (n < 3) throw domain_error("fundamental_period: need at least 3 samples");
  Eigen::Vector<Scalar, Eigen::Dynamic> x =
      samples.derived().template cast<Scalar>();
  x.array() -= x.mean();
  const Scalar denom = x.squaredNorm();
  if (!(denom > Scalar(0))) return span;  // constant trace

  Eigen::Vector<Scalar, Eigen::Dynamic> c(n);
  for (Eigen::Index lag = 0; lag < n; ++lag) {
    Scalar acc{};
    for (Eigen::Index i = 0; i < n; ++i) acc += x[i] * x[(i + lag) % n];
    c[lag] = acc / denom;
  }
  for (Eigen::Index lag = 1; lag + 1 < n; ++lag) {
    if (c[lag] >= threshold && c[lag] >= c[lag - 1] && c[lag] >= c[lag + 1])
      return span * static_cast<Scalar>(lag) / static_cast<Scalar>(n);
  }
  return span;
}

// Dense per-component table on the index window [lo, hi]; the working
// view the steady-state solver iterates over. Accessors return plain
// zero outside the window.
template <typename Scalar = double>
struct ComponentTable {
  using Complex = std::complex<Scalar>;
  using RealVec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  using ComplexVec = Eigen::Vector<Complex, Eigen::Dynamic>;

  int lo{0};
  int hi{-1};
  Scalar spacing{1};
  RealVec a1, a2, ph;
  ComplexVec u1, u2;  // a_j(n) * exp(i ph(n))

  static ComponentTable from_spec(const CombSpec<Scalar>& spec) {
    spec.validate();
    ComponentTable t;
    t.lo = -spec.n_max;
    t.hi = spec.n_max;
    t.spacing = spec.spacing;
    const int m = t.size();
    t.a1.resize(m);
    t.a2.resize(m);
    t.ph.resize(m);
    t.u1.resize(m);
    t.u2.resize(m);
    for (int n = t.lo; n <= t.hi; ++n) {
      const int i = n - t.lo;
      t.a1[i] = component_amplitude(spec, 1, n);
      t.a2[i] = component_amplitude(spec, 2, n);
      t.ph[i] = component_phase(spec, n);
      const Complex f = std::polar(Scalar(1), t.ph[i]);
      t.u1[i] = t.a1[i] * f;
      t.u2[i] = t.a2[i] * f;
    }
    return t;
  }

  int size() const { return hi - lo + 1; }
  bool contains(int n) const { return n >= lo && n <= hi; }

  Scalar A1(int n) const { return contains(n) ? a1[n - lo] : Scalar(0); }
  Scalar A2(int n) const { return contains(n) ? a2[n - lo] : Scalar(0); }
  Scalar PH(int n) const { return contains(n) ? ph[n - lo] : Scalar(0); }
  Complex U1(int n) const { return contains(n) ? u1[n - lo] : Complex{}; }
  Complex U2(int n) const { return contains(n) ? u2[n - lo] : Complex{}; }
};

}  // namespace fsfcpt
