#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <fsfcpt/atom.hpp>
#include <fsfcpt/comb.hpp>
#include <fsfcpt/errors.hpp>
#include <fsfcpt/faddeeva.hpp>

// Reduced models of the dark-resonance line. signal_narrowband keeps every
// two-photon coherence channel but drops their coupling, signal_broadband
// collapses them onto one broadened and shifted resonance, and
// signal_doppler evaluates the velocity average in closed form through the
// dispersion integral instead of quadrature. None of these call
// LambdaSystem::validate(): the reduced expressions stay meaningful where
// the full solver contract does not (omega21 = 0, sign-flipped splittings)
// and several documented identities live there. delta is the two-photon
// detuning at harmonic m_tilde, exactly as in the solver.

namespace fsfcpt {

// Summary of the resonance distortions produced by the field itself.
// delta_z is absent when the arm amplitudes admit no zero-shift detuning,
// delta_s when the signal minimum is too shallow to localize.
template <typename Scalar = double>
struct ShiftBroadeningReport {
  Scalar gamma_b{};
  Scalar delta_f{};
  std::optional<Scalar> delta_z;
  std::optional<Scalar> delta_s;
};

// Velocity average of a unit-width resonant denominator against the thermal
// profile, as a function of the scaled detuning x and the ratio of the
// homogeneous width to the Doppler width. ratio = +infinity degenerates to
// the motionless result 1/(1 + i x).
template <typename Scalar>
std::complex<Scalar> dispersion_integral(Scalar x, Scalar ratio) {
  using Complex = std::complex<Scalar>;
  if (!(ratio > Scalar(0)))
    throw domain_error("dispersion_integral: ratio must be > 0");
  if (std::isinf(ratio)) return Scalar(1) / Complex(Scalar(1), x);
  const Scalar spi = std::sqrt(std::numbers::pi_v<Scalar>);
  return spi * ratio * faddeeva_w(Complex(-ratio * x, ratio));
}

// d/dx of dispersion_integral, needed wherever a squared denominator is
// averaged. Uses w'(z) = -2 z w(z) + 2i/sqrt(pi).
template <typename Scalar>
std::complex<Scalar> dispersion_integral_derivative(Scalar x, Scalar ratio) {
  using Complex = std::complex<Scalar>;
  if (!(ratio > Scalar(0)))
    throw domain_error("dispersion_integral: ratio must be > 0");
  if (std::isinf(ratio)) {
    const Complex d = Complex(Scalar(1), x);
    return Complex(Scalar(0), Scalar(-1)) / (d * d);
  }
  const Scalar spi = std::sqrt(std::numbers::pi_v<Scalar>);
  const Complex z(-ratio * x, ratio);
  const Complex wz = faddeeva_w(z);
  return -spi * ratio * ratio *
         (Scalar(-2) * z * wz + Complex(Scalar(0), Scalar(2) / spi));
}

// Dark-resonance signal with the coupling between coherence harmonics
// dropped: each harmonic m responds only to its own two-photon drive, so
// the line is a sum of independent resonances spaced by the comb. Valid
// when the ground coherence relaxes faster than the comb spacing scans it.
template <typename Scalar>
Scalar signal_narrowband(const LambdaSystem<Scalar>& sys,
                         const ComponentTable<Scalar>& tab, int m_tilde,
                         Scalar delta) {
  using Complex = std::complex<Scalar>;
  if (!(tab.spacing > Scalar(0)))
    throw domain_error("signal_narrowband: spacing must be > 0");
  const Scalar gp = sys.gamma_prime;
  const int span = tab.hi - tab.lo;
  Complex tot{};
  for (int m = -span; m <= span; ++m) {
    Complex g{};
    for (int n = tab.lo; n <= tab.hi; ++n) {
      const Scalar amp = tab.A1(n) * tab.A2(n - m);
      if (amp == Scalar(0)) continue;
      g += amp * std::polar(Scalar(1), tab.PH(n - m) - tab.PH(n));
    }
    const Complex den(sys.gamma_coh,
                      -(delta + Scalar(m_tilde - m) * tab.spacing));
    tot += std::norm(g) / (Scalar(4) * gp * gp * den);
  }
  return -(sys.p1 + sys.p2) * tot.real();
}

template <typename Scalar>
Scalar signal_narrowband(const LambdaSystem<Scalar>& sys,
                         const CombSpec<Scalar>& comb, int m_tilde,
                         Scalar delta) {
  return signal_narrowband(sys, ComponentTable<Scalar>::from_spec(comb),
                           m_tilde, delta);
}

// Location of the signal minimum near delta = 0 from a quadratic model
// built with central differences at h = 1e-3 gamma_coh. The same model at
// h/2 serves as a consistency check; a curvature below the rounding floor
// or disagreeing estimates raise numeric_error, since then the minimum is
// not localizable at this scale.
template <typename Scalar, typename Fn>
Scalar resonance_minimum_shift_of(Fn&& signal, Scalar gamma_coh) {
  if (!(gamma_coh > Scalar(0)))
    throw domain_error("resonance_minimum_shift: gamma_coh must be > 0");
  const Scalar s0 = signal(Scalar(0));
  auto estimate = [&](Scalar h) {
    const Scalar sp = signal(h);
    const Scalar sm = signal(-h);
    const Scalar d1 = (sp - sm) / (Scalar(2) * h);
    const Scalar d2 = (sp - Scalar(2) * s0 + sm) / (h * h);
    const Scalar scale =
        std::max({std::abs(sp), std::abs(s0), std::abs(sm)});
    const Scalar floor = Scalar(1024) *
                         std::numeric_limits<Scalar>::epsilon() * scale /
                         (h * h);
    if (!(std::abs(d2) > floor))
      throw numeric_error(
          "resonance_minimum_shift: ill-conditioned, |curvature| " +
          std::to_string(static_cast<double>(std::abs(d2))) +
          " is below the rounding floor " +
          std::to_string(static_cast<double>(floor)));
    return -d1 / d2;
  };
  const Scalar h = Scalar(1e-3) * gamma_coh;
  const Scalar coarse = estimate(h);
  const Scalar fine = estimate(h / Scalar(2));
  const Scalar tol = Scalar(0.05) * std::max(std::abs(coarse), std::abs(fine)) +
                     Scalar(1e-9) * gamma_coh;
  if (!(std::abs(coarse - fine) <= tol))
    throw numeric_error(
        "resonance_minimum_shift: ill-conditioned, the half-step estimate "
        "disagrees with the full-step one");
  return coarse;
}

template <typename Scalar>
Scalar resonance_minimum_shift(const LambdaSystem<Scalar>& sys,
                               const ComponentTable<Scalar>& tab,
                               int m_tilde) {
  return resonance_minimum_shift_of(
      [&](Scalar d) { return signal_narrowband(sys, tab, m_tilde, d); },
      sys.gamma_coh);
}

template <typename Scalar>
Scalar resonance_minimum_shift(const LambdaSystem<Scalar>& sys,
                               const CombSpec<Scalar>& comb, int m_tilde) {
  return resonance_minimum_shift(sys, ComponentTable<Scalar>::from_spec(comb),
                                 m_tilde);
}

// Power broadening of the ground-state resonance: every comb component
// pumps the ground coherence at a rate set by its own one-photon detuning.
template <typename Scalar>
Scalar field_broadening(const LambdaSystem<Scalar>& sys,
                        const ComponentTable<Scalar>& tab) {
  if (!(tab.spacing > Scalar(0)))
    throw domain_error("field_broadening: spacing must be > 0");
  const Scalar gp = sys.gamma_prime;
  const Scalar d1 = sys.delta1;
  const Scalar d2 = sys.delta2();
  Scalar acc{};
  for (int n = tab.lo; n <= tab.hi; ++n) {
    const Scalar x1 = d1 - Scalar(n) * tab.spacing;
    const Scalar x2 = d2 - Scalar(n) * tab.spacing;
    acc += tab.A1(n) * tab.A1(n) / (gp * gp + x1 * x1) +
           tab.A2(n) * tab.A2(n) / (gp * gp + x2 * x2);
  }
  return Scalar(0.25) * gp * acc;
}

template <typename Scalar>
Scalar field_broadening(const LambdaSystem<Scalar>& sys,
                        const CombSpec<Scalar>& comb) {
  return field_broadening(sys, ComponentTable<Scalar>::from_spec(comb));
}

// Light shift of the resonance: the dispersive counterpart of
// field_broadening, odd in the detuning of each component and opposite in
// sign between the arms.
template <typename Scalar>
Scalar light_shift(const LambdaSystem<Scalar>& sys,
                   const ComponentTable<Scalar>& tab) {
  if (!(tab.spacing > Scalar(0)))
    throw domain_error("light_shift: spacing must be > 0");
  const Scalar gp = sys.gamma_prime;
  const Scalar d1 = sys.delta1;
  const Scalar d2 = sys.delta2();
  Scalar acc{};
  for (int n = tab.lo; n <= tab.hi; ++n) {
    const Scalar x1 = d1 - Scalar(n) * tab.spacing;
    const Scalar x2 = d2 - Scalar(n) * tab.spacing;
    acc += tab.A1(n) * tab.A1(n) * x1 / (gp * gp + x1 * x1) -
           tab.A2(n) * tab.A2(n) * x2 / (gp * gp + x2 * x2);
  }
  return Scalar(0.25) * acc;
}

template <typename Scalar>
Scalar light_shift(const LambdaSystem<Scalar>& sys,
                   const CombSpec<Scalar>& comb) {
  return light_shift(sys, ComponentTable<Scalar>::from_spec(comb));
}

// Dark-resonance signal in the opposite regime from signal_narrowband: the
// coherence channels merge into a single resonance whose width gains
// field_broadening and whose center moves by light_shift. Valid when the
// comb envelope is wide and the components strong enough to overlap.
template <typename Scalar>
Scalar signal_broadband(const LambdaSystem<Scalar>& sys,
                        const ComponentTable<Scalar>& tab, int m_tilde,
                        Scalar delta) {
  using Complex = std::complex<Scalar>;
  if (!(tab.spacing > Scalar(0)))
    throw domain_error("signal_broadband: spacing must be > 0");
  const Scalar gp = sys.gamma_prime;
  const Scalar d1 = sys.delta1;
  const Scalar d2 = sys.delta2();
  const Scalar gb = field_broadening(sys, tab);
  const Scalar df = light_shift(sys, tab);
  const Complex i1(Scalar(0), Scalar(1));
  Complex weight{}, source{};
  for (int n = tab.lo; n <= tab.hi; ++n) {
    const Scalar amp = tab.A1(n) * tab.A2(n - m_tilde);
    if (amp == Scalar(0)) continue;
    const Complex den1 = gp - i1 * (d1 - Scalar(n) * tab.spacing);
    const Complex den2 = gp + i1 * (d2 - Scalar(n - m_tilde) * tab.spacing);
    const Scalar steer = tab.PH(m_tilde) - tab.PH(n) + tab.PH(n - m_tilde);
    weight += amp * std::polar(Scalar(1), steer) *
              (Scalar(0.5) / den1 + Scalar(0.5) / den2);
    source += amp * std::polar(Scalar(1), -steer) *
              (sys.p1 / den1 + sys.p2 / den2);
  }
  const Complex closure =
      -source / (Scalar(4) * (sys.gamma_coh + gb - i1 * (delta - df)));
  return (weight * closure).real();
}

template <typename Scalar>
Scalar signal_broadband(const LambdaSystem<Scalar>& sys,
                        const CombSpec<Scalar>& comb, int m_tilde,
                        Scalar delta) {
  return signal_broadband(sys, ComponentTable<Scalar>::from_spec(comb),
                          m_tilde, delta);
}

// One arm's contribution to the light shift when the comb envelope is
// modeled as a Lorentzian profile of equivalent width, which closes the
// component sum in elementary terms. Odd in dj.
template <typename Scalar>
Scalar light_shift_lorentzian_term(Scalar rabi, Scalar n0, Scalar spacing,
                                   Scalar gamma_prime, Scalar dj) {
  using std::numbers::pi_v;
  const Scalar pi = pi_v<Scalar>;
  const Scalar root2 = std::sqrt(Scalar(2));
  const Scalar ew = n0 * spacing;
  const Scalar lead =
      std::sqrt(Scalar(2) * pi * root2) * gamma_prime -
      ew * std::pow(Scalar(2), Scalar(0.25));
  const Scalar num = rabi * rabi * n0 * dj * std::sqrt(pi * pi * pi) *
                     (lead * lead + Scalar(2) * pi * root2 * dj * dj);
  const Scalar g2 = dj * dj + gamma_prime * gamma_prime;
  const Scalar den =
      Scalar(4) * (Scalar(4) * pi * pi * g2 * g2 +
                   ew * ew * (ew * ew + Scalar(4) * pi * dj * dj -
                              Scalar(4) * pi * gamma_prime * gamma_prime));
  const Scalar scale =
      Scalar(4) * (Scalar(4) * pi * pi * g2 * g2 +
                   ew * ew * (ew * ew + Scalar(4) * pi * dj * dj +
                              Scalar(4) * pi * gamma_prime * gamma_prime));
  if (!(std::abs(den) > Scalar(1e-12) * scale))
    throw numeric_error(
        "light_shift_lorentzian: vanishing denominator at detuning " +
        std::to_string(static_cast<double>(dj)));
  return num / den;
}

// Light shift evaluated from the Lorentzian-profile closed form, one term
// per arm. Needs the envelope width, hence the spec and not the table.
template <typename Scalar>
Scalar light_shift_lorentzian(const LambdaSystem<Scalar>& sys,
                              const CombSpec<Scalar>& comb) {
  return light_shift_lorentzian_term(comb.rabi1, comb.n0, comb.spacing,
                                     sys.gamma_prime, sys.delta1) -
         light_shift_lorentzian_term(comb.rabi2, comb.n0, comb.spacing,
                                     sys.gamma_prime, sys.delta2());
}

// One-photon detuning at which the arms' light shifts cancel. Undefined
// for equal Rabi amplitudes, where the difference has no zero.
template <typename Scalar>
Scalar zero_shift_detuning(Scalar omega21, Scalar omega1_0, Scalar omega2_0) {
  const Scalar s1 = omega1_0 * omega1_0;
  const Scalar s2 = omega2_0 * omega2_0;
  if (s1 == s2)
    throw domain_error(
        "zero_shift_detuning: equal Rabi amplitudes admit no zero-shift "
        "detuning");
  return omega21 * s2 / (s2 - s1);
}

// Velocity-averaged dark-resonance signal in closed form: every resolvent
// pair that the average produces reduces to dispersion_integral and its
// derivative, so no velocity grid or harmonic system is built. fast keeps
// only the resonant coherence channel m = m_tilde with its diagonal
// component pairs, which is exact in the wide-envelope limit.
template <typename Scalar>
Scalar signal_doppler(const LambdaSystem<Scalar>& sys,
                      const ComponentTable<Scalar>& tab, int m_tilde,
                      Scalar delta, bool fast = false) {
  using Complex = std::complex<Scalar>;
  if (!(tab.spacing > Scalar(0)))
    throw domain_error("signal_doppler: spacing must be > 0");
  const Scalar gp = sys.gamma_prime;
  const Scalar w = tab.spacing;
  const Scalar d1 = sys.delta1;
  const Scalar ratio = sys.kv0 == Scalar(0)
                           ? std::numeric_limits<Scalar>::infinity()
                           : gp / sys.kv0;
  const Complex i1(Scalar(0), Scalar(1));

  auto fplus = [&](Scalar b) { return dispersion_integral(b / gp, ratio) / gp; };
  auto fminus = [&](Scalar a) {
    return std::conj(dispersion_integral(a / gp, ratio)) / gp;
  };
  auto fplus2 = [&](Scalar b) {
    return i1 * dispersion_integral_derivative(b / gp, ratio) / (gp * gp);
  };
  auto fminus2 = [&](Scalar a) {
    return std::conj(i1 * dispersion_integral_derivative(a / gp, ratio)) /
           (gp * gp);
  };

  const int mlo = fast ? m_tilde : tab.lo - tab.hi;
  const int mhi = fast ? m_tilde : tab.hi - tab.lo;
  Scalar total{};
  std::vector<int> idx;
  for (int m = mlo; m <= mhi; ++m) {
    const Scalar dd = delta + Scalar(m_tilde - m) * w;
    const Complex pref = Scalar(2) * gp - i1 * dd;
    const Complex dencol = sys.gamma_coh + sys.nu - i1 * dd;
    const Complex rden = sys.gamma_coh - i1 * dd;

    idx.clear();
    for (int n = tab.lo; n <= tab.hi; ++n)
      if (tab.A1(n) * tab.A2(n - m) != Scalar(0)) idx.push_back(n);
    if (idx.empty()) continue;
    const int k = static_cast<int>(idx.size());

    Eigen::Vector<Scalar, Eigen::Dynamic> amp(k), av(k), bv(k);
    Eigen::Vector<Complex, Eigen::Dynamic> pha(k), fm(k), fp(k), pnn(k);
    for (int i = 0; i < k; ++i) {
      const int n = idx[i];
      amp[i] = tab.A1(n) * tab.A2(n - m);
      pha[i] = std::polar(Scalar(1), tab.PH(n - m) - tab.PH(n));
      av[i] = d1 - Scalar(n) * w;
      bv[i] = d1 - delta - Scalar(n - m + m_tilde) * w;
      fm[i] = fminus(av[i]);
      fp[i] = fplus(bv[i]);
      pnn[i] = (fm[i] + fp[i]) / (Scalar(2) * gp + i1 * (bv[i] - av[i]));
    }

    Complex ab{};
    if (fast) {
      for (int i = 0; i < k; ++i) {
        const Complex dnn = Scalar(2) * gp + i1 * (bv[i] - av[i]);
        const Complex t1 = (pnn[i] + fminus2(av[i])) / dnn;
        const Complex t2 = (pnn[i] + fplus2(bv[i])) / dnn;
        ab += amp[i] * amp[i] * (sys.p1 * t1 + sys.p2 * t2);
      }
      if (sys.nu != Scalar(0)) {
        for (int i = 0; i < k; ++i) {
          const Scalar x2 =
              (d1 - delta - Scalar(idx[i] + m_tilde - m) * w) / gp;
          const Complex nuterm =
              sys.nu *
              (sys.p2 * dispersion_integral(x2, ratio) +
               sys.p1 * std::conj(dispersion_integral(av[i] / gp, ratio))) /
              (gp * rden);
          ab += amp[i] * amp[i] * pnn[i] * nuterm;
        }
      }
    } else {
      Eigen::Vector<Scalar, Eigen::Dynamic> blm(k);
      Eigen::Vector<Complex, Eigen::Dynamic> fplm(k);
      for (int j = 0; j < k; ++j) {
        blm[j] = d1 - delta - Scalar(idx[j] + m_tilde - m) * w;
        fplm[j] = fplus(blm[j]);
      }
      for (int i = 0; i < k; ++i) {
        const Complex dnn = Scalar(2) * gp + i1 * (bv[i] - av[i]);
        for (int j = 0; j < k; ++j) {
          Complex t1, t2;
          if (j == i) {
            t1 = (pnn[i] + fminus2(av[i])) / dnn;
            t2 = (pnn[i] + fplus2(bv[i])) / dnn;
          } else {
            const Complex pair_ln =
                (fm[j] + fp[i]) / (Scalar(2) * gp + i1 * (bv[i] - av[j]));
            t1 = (pair_ln - pnn[i]) / (-i1 * (av[i] - av[j]));
            const Complex pair_nlm =
                (fm[i] + fplm[j]) /
                (Scalar(2) * gp + i1 * (blm[j] - av[i]));
            t2 = (pair_nlm - pnn[i]) / (i1 * (bv[i] - blm[j]));
          }
          ab += amp[i] * amp[j] * (pha[i] / pha[j]) *
                (sys.p1 * t1 + sys.p2 * t2);
        }
      }
      if (sys.nu != Scalar(0)) {
        Complex aavg{}, btil{};
        for (int i = 0; i < k; ++i) aavg += amp[i] * pha[i] * pnn[i];
        for (int j = 0; j < k; ++j) {
          const Scalar x2 =
              (d1 - delta - Scalar(idx[j] + m_tilde - m) * w) / gp;
          const Complex nuterm =
              sys.nu *
              (sys.p2 * dispersion_integral(x2, ratio) +
               sys.p1 * std::conj(dispersion_integral(av[j] / gp, ratio))) /
              (gp * rden);
          btil += amp[j] / pha[j] * nuterm;
        }
        ab += aavg * btil;
      }
    }
    total += Scalar(-0.125) * (pref / dencol * ab).real();
  }
  return total;
}

template <typename Scalar>
Scalar signal_doppler(const LambdaSystem<Scalar>& sys,
                      const CombSpec<Scalar>& comb, int m_tilde, Scalar delta,
                      bool fast = false) {
  return signal_doppler(sys, ComponentTable<Scalar>::from_spec(comb), m_tilde,
                        delta, fast);
}

// Convenience bundle of the field-induced distortions of one resonance.
template <typename Scalar>
ShiftBroadeningReport<Scalar> shift_broadening_report(
    const LambdaSystem<Scalar>& sys, const CombSpec<Scalar>& comb,
    int m_tilde) {
  const auto tab = ComponentTable<Scalar>::from_spec(comb);
  ShiftBroadeningReport<Scalar> rep;
  rep.gamma_b = field_broadening(sys, tab);
  rep.delta_f = light_shift(sys, tab);
  if (comb.rabi1 * comb.rabi1 != comb.rabi2 * comb.rabi2)
    rep.delta_z = zero_shift_detuning(sys.omega21, comb.rabi1, comb.rabi2);
  try {
    rep.delta_s = resonance_minimum_shift(sys, tab, m_tilde);
  } catch (const numeric_error&) {
    // minimum too shallow to localize at the gamma_coh scale; leave unset
  }
  return rep;
}

}  // namespace fsfcpt
