#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <cmath>
#include <cstdlib>

#include "fsfcpt/errors.hpp"

// Lorentzian least-squares fitting used by the resonance-shape
// analyses. Double precision; this is measurement plumbing, not part
// of the scalar-generic physics core.

namespace fsfcpt {

struct LorentzFit {
  double amplitude{};  // A, signed
  double center{};     // c
  double width{};      // w, half width at half maximum, > 0
  double offset{};     // B (0 when not fitted)
  double curvature{};  // B2 (0 when not fitted)
  int status{};        // LM termination code, > 0 on success
};

namespace detail {

struct LorentzResidual {
  using Scalar = double;
  enum {
    InputsAtCompileTime = Eigen::Dynamic,
    ValuesAtCompileTime = Eigen::Dynamic
  };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const Eigen::VectorXd& xs;
  const Eigen::VectorXd& ys;
  int nparam;

  LorentzResidual(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int np)
      : xs(x), ys(y), nparam(np) {}

  int inputs() const { return nparam; }
  int values() const { return static_cast<int>(xs.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    const double A = p[0], c = p[1], w = p[2];
    const double B = nparam >= 4 ? p[3] : 0.0;
    const double B2 = nparam >= 5 ? p[4] : 0.0;
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      const double u = (xs[i] - c) / w;
      f[i] = A / (1.0 + u * u) + B + B2 * xs[i] * xs[i] - ys[i];
    }
    return 0;
  }
};

}  // namespace detail

// Fits y ~ A / (1 + ((x-c)/w)^2) [+ B] [+ B2 x^2]. nparam selects 3, 4
// or 5 free parameters in that order.
inline LorentzFit fit_lorentzian(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y,
                                 const Eigen::VectorXd& p0) {
  const int np = static_cast<int>(p0.size());
  if (np < 3 || np > 5)
    throw domain_error("fit_lorentzian: need 3 to 5 initial parameters");
  if (x.size() != y.size() || x.size() < np)
    throw domain_error("fit_lorentzian: bad sample arrays");

  detail::LorentzResidual res(x, y, np);
  Eigen::NumericalDiff<detail::LorentzResidual> nd(res);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::LorentzResidual>>
      lm(nd);
  lm.parameters.maxfev = 4000;
  lm.parameters.xtol = 1e-13;
  lm.parameters.ftol = 1e-13;

  Eigen::VectorXd p = p0;
  const int info = lm.minimize(p);

  LorentzFit out;
  out.amplitude = p[0];
  out.center = p[1];
  out.width = std::abs(p[2]);
  out.offset = np >= 4 ? p[3] : 0.0;
  out.curvature = np >= 5 ? p[4] : 0.0;
  out.status = info;
  return out;
}

// Convenience: peak fit with width seeded from the half-maximum extent.
inline LorentzFit fit_peak(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd ay = y.cwiseAbs();
  Eigen::Index imax;
  const double A0 = ay.maxCoeff(&imax);
  double lo = x[imax], hi = x[imax];
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (ay[i] >= A0 / 2) {
      lo = std::min(lo, x[i]);
      hi = std::max(hi, x[i]);
    }
  }
  const double w0 =
      std::max((hi - lo) / 2, std::abs(x[1] - x[0]) / 2);
  Eigen::Vector3d p0(A0, x[imax], w0);
  return fit_lorentzian(x, ay, p0);
}

// Half width of a resonance around zero, measured from a normalized
// |signal| profile on the window [-5g, 5g]. The window half-width g is
// re-seeded from the fit and retried when the fitted width lands far
// outside it, so a poor initial guess still converges.
template <typename Fn>
LorentzFit measure_half_width(Fn&& signal, double gamma_guess,
                              int npts = 41, int max_iter = 3) {
  if (!(gamma_guess > 0.0))
    throw domain_error("measure_half_width: gamma_guess must be > 0");
  double g = gamma_guess;
  LorentzFit fit;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(npts, -5 * g, 5 * g);
    Eigen::VectorXd y(npts);
    for (int i = 0; i < npts; ++i) y[i] = std::abs(signal(x[i]));
    y /= y.maxCoeff();

    Eigen::Index imax;
    const double ymax = y.maxCoeff(&imax);
    Eigen::Vector4d p0(ymax - y.minCoeff(), x[imax], g, y.minCoeff());
    fit = fit_lorentzian(x, y, p0);
    if (fit.width >= 0.4 * g && fit.width <= 2.5 * g) return fit;
    g = fit.width;
  }
  return fit;
}

}  // namespace fsfcpt
