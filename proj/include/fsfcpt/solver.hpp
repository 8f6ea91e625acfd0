#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "fsfcpt/atom.hpp"
#include "fsfcpt/comb.hpp"
#include "fsfcpt/errors.hpp"
#include "fsfcpt/parallel.hpp"

// Steady-state engine for the ground-coherence harmonics r12,n(v) and
// the fluorescence signal they control.
//
// Conventions used throughout this header:
//  - delta is the two-photon detuning at harmonic m_tilde; every place
//    the ground splitting appears, the effective value
//    delta + m_tilde * spacing is used, so scans in delta slide the
//    splitting relative to a fixed comb.
//  - Per velocity class, amplitudes are stored relative to the class
//    population (the Maxwell factor lives in the quadrature weights),
//    so velocity integrals are plain weighted sums.
//  - Fourier coefficients are kept in the comb-phase gauge: the
//    oscillating factor attached to component n carries exp(i phi_n),
//    and the stored coefficients are what multiplies it.

namespace fsfcpt {

template <typename Scalar = double>
struct SignalPoint {
  Scalar delta{};
  Scalar s_cpt{};
  Scalar s_background{};
};

template <typename Scalar = double>
struct SolveInfo {
  int nodes{1};
  bool refined{false};
  bool converged{true};
  std::string warning;
};

// Harmonic index window for r12: wide enough that every product of two
// in-window comb components lands inside it, at either splitting sign.
template <typename Scalar>
std::pair<int, int> coherence_index_range(const ComponentTable<Scalar>& tab,
                                          int m_tilde) {
  const int half =
      2 * std::max(std::abs(tab.lo), std::abs(tab.hi)) + std::abs(m_tilde);
  return {-half, half};
}

template <typename Scalar = double>
struct CoherenceField {
  using Complex = std::complex<Scalar>;
  using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Vector<Complex, Eigen::Dynamic>;

  int lo{0}, hi{-1};   // harmonic window
  int m_tilde{1};
  Scalar delta{};
  Mat r12;             // (harmonic, velocity node), class-relative
  Vec R12;             // velocity-integrated harmonics
  VelocityGrid<Scalar> grid;
  SolveInfo<Scalar> info;

  int size() const { return hi - lo + 1; }
  int index(int n) const { return n - lo; }
  Complex coeff(int n, Eigen::Index node) const {
    return (n >= lo && n <= hi) ? r12(n - lo, node) : Complex{};
  }
};

template <typename Scalar = double>
struct AssembledSystem {
  using Complex = std::complex<Scalar>;
  int lo{0}, hi{-1};
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> A;
  Eigen::Vector<Complex, Eigen::Dynamic> b;
  Eigen::Vector<Complex, Eigen::Dynamic> c;  // collision injection channel
};

namespace detail {

// Builds the per-class system in the normalized form
//   myA * r = b + nu * R12,
// with myA = diag(gamma_coh + nu - i(omega_eff - n spacing)) + coupling.
// The public assembled form is a sign/scale transform of this one.
template <typename Scalar>
void assemble_normalized(
    const LambdaSystem<Scalar>& sys, const ComponentTable<Scalar>& tab,
    int m_tilde, Scalar delta, Scalar v,
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>& A,
    Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>& b) {
  using Complex = std::complex<Scalar>;
  using CMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using CVec = Eigen::Vector<Complex, Eigen::Dynamic>;
  const Complex I(0, 1);

  if (!(tab.spacing > Scalar(0)))
    throw domain_error("component table needs a positive spacing");
  const Scalar w = tab.spacing;
  const Scalar om21 = delta + Scalar(m_tilde) * w;
  const Scalar d1 = sys.delta1;
  const Scalar d2 = d1 - om21;
  const Scalar kv = sys.kv0 * v;
  const Scalar gp = sys.gamma_prime, gc = sys.gamma_coh, nu = sys.nu;

  const auto [rlo, rhi] = coherence_index_range(tab, m_tilde);
  const int sz = rhi - rlo + 1;

  // coupling: for each harmonic pair (n, j), a sum over components l of
  // Rabi products against the optical Lorentzians
  const int xlo = tab.lo - rhi, xhi = tab.hi - rlo;
  const int xn = xhi - xlo + 1;
  CVec X1(xn), X2(xn);
  for (int l = xlo; l <= xhi; ++l) {
    X1[l - xlo] = Scalar(1) / (gp + I * (d2 - Scalar(l) * w + kv));
    X2[l - xlo] = Scalar(1) / (gp - I * (d1 - Scalar(l) * w + kv));
  }
  CMat U1nl(sz, xn), U2ln(sz, xn);
  for (int n = rlo; n <= rhi; ++n)
    for (int l = xlo; l <= xhi; ++l) {
      U1nl(n - rlo, l - xlo) = tab.U1(n + l);
      U2ln(n - rlo, l - xlo) = tab.U2(l - n);
    }

  A = (U1nl * X1.asDiagonal()) * U1nl.adjoint() +
      (U2ln.conjugate() * X2.asDiagonal()) * U2ln.transpose();

  CVec eph(sz);
  for (int n = rlo; n <= rhi; ++n)
    eph[n - rlo] = std::polar(Scalar(1), tab.PH(n));
  for (int i = 0; i < sz; ++i)
    for (int j = 0; j < sz; ++j)
      A(i, j) *= Scalar(0.25) * eph[j] / eph[i];

  for (int n = rlo; n <= rhi; ++n)
    A(n - rlo, n - rlo) += gc + nu - I * (om21 - Scalar(n) * w);

  // source: population-driven two-photon pumping into harmonic n
  b.resize(sz);
  for (int n = rlo; n <= rhi; ++n) {
    Complex t1{}, t2{};
    for (int m = tab.lo; m <= tab.hi; ++m) {
      const int s1 = m + n;
      if (tab.contains(s1))
        t1 += std::conj(tab.U2(m)) * tab.U1(s1) /
              (gp - I * (d1 - Scalar(s1) * w + kv));
      const int s2 = m - n;
      if (tab.contains(s2))
        t2 += tab.U1(m) * std::conj(tab.U2(s2)) /
              (gp + I * (d2 - Scalar(s2) * w + kv));
    }
    b[n - rlo] = -(sys.p1 * t1 + sys.p2 * t2) /
                 (Scalar(4) * std::polar(Scalar(1), tab.PH(n)));
  }
}

}  // namespace detail

// Linear system obeyed by the physical per-class harmonics r12,n(v):
//   A r = b + c .* R12,
// where R12 is the velocity-integrated harmonic vector. At zero field
// A is diagonal with entries i(omega_eff - n spacing) - gamma_coh - nu.
template <typename Scalar>
AssembledSystem<Scalar> assemble_r12_system(const LambdaSystem<Scalar>& sys,
                                            const ComponentTable<Scalar>& tab,
                                            int m_tilde, Scalar delta,
                                            Scalar v) {
  sys.validate();
  AssembledSystem<Scalar> out;
  const auto [rlo, rhi] = coherence_index_range(tab, m_tilde);
  out.lo = rlo;
  out.hi = rhi;
  detail::assemble_normalized(sys, tab, m_tilde, delta, v, out.A, out.b);
  const Scalar dens = maxwell_density(v);
  out.A = -out.A;
  out.b *= -dens;
  out.c = Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>::Constant(
      rhi - rlo + 1, std::complex<Scalar>(-sys.nu * dens, 0));
  return out;
}

template <typename Scalar>
AssembledSystem<Scalar> assemble_r12_system(const LambdaSystem<Scalar>& sys,
                                            const CombSpec<Scalar>& comb,
                                            int m_tilde, Scalar delta,
                                            Scalar v) {
  return assemble_r12_system(sys, ComponentTable<Scalar>::from_spec(comb),
                             m_tilde, delta, v);
}

// Solves the coupled per-class systems exactly. The collision closure
// is eliminated linearly: R12 = (I - nu K)^-1 sum_i w_i A_i^-1 b_i with
// K = sum_i w_i A_i^-1, then each class is back-substituted.
template <typename Scalar>
CoherenceField<Scalar> solve_coherence(const LambdaSystem<Scalar>& sys,
                                       const ComponentTable<Scalar>& tab,
                                       int m_tilde, Scalar delta,
                                       const VelocityGrid<Scalar>& grid) {
  using Complex = std::complex<Scalar>;
  using CMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using CVec = Eigen::Vector<Complex, Eigen::Dynamic>;

  sys.validate();
  const auto [rlo, rhi] = coherence_index_range(tab, m_tilde);
  const int sz = rhi - rlo + 1;
  const Eigen::Index nodes = grid.size();

  CoherenceField<Scalar> field;
  field.lo = rlo;
  field.hi = rhi;
  field.m_tilde = m_tilde;
  field.delta = delta;
  field.grid = grid;
  field.r12.resize(sz, nodes);
  field.info.nodes = static_cast<int>(nodes);

  constexpr Scalar kRcondFloor = Scalar(1e-14);
  // rcond() alone reports garbage for exactly singular input (its norm
  // estimator hits NaN), so the pivot spread guards that case
  const auto rcond_of = [kRcondFloor](const Eigen::PartialPivLU<CMat>& lu) {
    const auto piv = lu.matrixLU().diagonal().cwiseAbs().eval();
    const Scalar pmax = piv.maxCoeff();
    if (!(pmax > Scalar(0))) return Scalar(0);
    return std::min(lu.rcond(), piv.minCoeff() / pmax);
  };

  CMat K = CMat::Zero(sz, sz);
  CVec s = CVec::Zero(sz);

  // blocked so the stored inverses stay bounded while the weighted
  // sums accumulate in node order, independent of worker count
  const Eigen::Index block = std::min<Eigen::Index>(nodes, 64);
  std::vector<CMat> inv_store(block);
  std::vector<CVec> b_store(block);
  for (Eigen::Index base = 0; base < nodes; base += block) {
    const Eigen::Index count = std::min(block, nodes - base);
    parallel_for(count, [&](std::ptrdiff_t j) {
      const Eigen::Index k = base + j;
      CMat A;
      CVec b;
      detail::assemble_normalized(sys, tab, m_tilde, delta, grid.nodes[k], A,
                                  b);
      Eigen::PartialPivLU<CMat> lu(A);
      const Scalar rc = rcond_of(lu);
      if (!(rc > kRcondFloor))
        throw numeric_error(
            "solve_coherence: singular per-class system (rcond " +
            std::to_string(rc) + " at node " + std::to_string(k) +
            ", delta " + std::to_string(static_cast<double>(delta)) + ")");
      inv_store[j] = lu.inverse();
      b_store[j] = std::move(b);
    });
    for (Eigen::Index j = 0; j < count; ++j) {
      const Scalar wt = grid.weights[base + j];
      K += wt * inv_store[j];
      s += wt * (inv_store[j] * b_store[j]);
    }
  }

  if (sys.nu == Scalar(0)) {
    field.R12 = s;
  } else {
    CMat closure = CMat::Identity(sz, sz) - sys.nu * K;
    Eigen::PartialPivLU<CMat> lu(closure);
    const Scalar rc = rcond_of(lu);
    if (!(rc > kRcondFloor))
      throw numeric_error("solve_coherence: singular collision closure (rcond " +
                          std::to_string(rc) + ")");
    field.R12 = lu.solve(s);
  }

  // back-substitution per class; recomputing the factorization keeps
  // memory flat and every column is an independent slot
  parallel_for(nodes, [&](std::ptrdiff_t k) {
    CMat A;
    CVec b;
    detail::assemble_normalized(sys, tab, m_tilde, delta, grid.nodes[k], A, b);
    if (sys.nu != Scalar(0)) b += sys.nu * field.R12;
    field.r12.col(k) = A.partialPivLu().solve(b);
  });

  return field;
}

template <typename Scalar>
CoherenceField<Scalar> solve_coherence(const LambdaSystem<Scalar>& sys,
                                       const CombSpec<Scalar>& comb,
                                       int m_tilde, Scalar delta,
                                       const VelocityGrid<Scalar>& grid) {
  return solve_coherence(sys, ComponentTable<Scalar>::from_spec(comb), m_tilde,
                         delta, grid);
}

// Optical coherence harmonics for one velocity class, in the comb-phase
// gauge, scaled by the class density. First return carries the
// |1>-arm, second the |2>-arm. Index window is the comb window.
template <typename Scalar>
std::pair<Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>,
          Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>>
optical_coherences(const CoherenceField<Scalar>& field,
                   const LambdaSystem<Scalar>& sys,
                   const ComponentTable<Scalar>& tab, Eigen::Index node) {
  using Complex = std::complex<Scalar>;
  using CVec = Eigen::Vector<Complex, Eigen::Dynamic>;
  const Complex I(0, 1);

  if (node < 0 || node >= field.grid.size())
    throw domain_error("optical_coherences: velocity node out of range");

  const Scalar w = tab.spacing;
  const Scalar om21 = field.delta + Scalar(field.m_tilde) * w;
  const Scalar d1 = sys.delta1;
  const Scalar d2 = d1 - om21;
  const Scalar kv = sys.kv0 * field.grid.nodes[node];
  const Scalar gp = sys.gamma_prime;
  const Scalar dens = field.grid.density(node);

  const int m = tab.size();
  CVec r13(m), r32(m);
  for (int n = tab.lo; n <= tab.hi; ++n) {
    Complex c13 = sys.p1 * tab.A1(n);
    Complex c32 = sys.p2 * tab.A2(n);
    for (int q = field.lo; q <= field.hi; ++q) {
      const Complex rq = field.r12(q - field.lo, node);
      if (rq == Complex{}) continue;
      // arm 1 picks up r12 through the arm-2 field, and vice versa
      if (tab.contains(n - q))
        c13 += tab.A2(n - q) *
               std::polar(Scalar(1),
                          tab.PH(n - q) + tab.PH(q) - tab.PH(n)) *
               rq;
      if (tab.contains(n + q))
        c32 += tab.A1(n + q) *
               std::polar(Scalar(1),
                          tab.PH(n) - tab.PH(n + q) + tab.PH(q)) *
               rq;
    }
    r13[n - tab.lo] =
        dens * (I / Scalar(2)) * c13 / (gp - I * (d1 - Scalar(n) * w + kv));
    r32[n - tab.lo] =
        -dens * (I / Scalar(2)) * c32 / (gp + I * (d2 - Scalar(n) * w + kv));
  }
  return {std::move(r13), std::move(r32)};
}

// Fluorescence signal at one two-photon detuning: the coherent (CPT)
// part and the population background. Both are real reductions; the
// resonant part is the real part of the harmonic double sum, summed
// term by term.
template <typename Scalar>
SignalPoint<Scalar> cpt_signal(const LambdaSystem<Scalar>& sys,
                               const ComponentTable<Scalar>& tab, int m_tilde,
                               Scalar delta, const VelocityGrid<Scalar>& grid) {
  using Complex = std::complex<Scalar>;
  const Complex I(0, 1);

  const auto field = solve_coherence(sys, tab, m_tilde, delta, grid);

  const Scalar w = tab.spacing;
  const Scalar om21 = delta + Scalar(m_tilde) * w;
  const Scalar d1 = sys.delta1;
  const Scalar d2 = d1 - om21;
  const Scalar gp = sys.gamma_prime;

  SignalPoint<Scalar> out;
  out.delta = delta;

  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const Scalar kv = sys.kv0 * grid.nodes[k];
    const Scalar wt = grid.weights[k];
    Scalar acc = 0;
    for (int m = field.lo; m <= field.hi; ++m) {
      const Complex rm = field.r12(m - field.lo, k);
      if (rm == Complex{}) continue;
      const Scalar phm = tab.PH(m);
      Complex inner{};
      for (int n = tab.lo; n <= tab.hi; ++n) {
        const Scalar amp = tab.A1(n) * tab.A2(n - m);
        if (amp == Scalar(0)) continue;
        const Complex f1 =
            Scalar(1) / (Scalar(2) * (gp - I * (d1 - Scalar(n) * w + kv)));
        const Complex f2 =
            Scalar(1) /
            (Scalar(2) * (gp + I * (d2 - Scalar(n - m) * w + kv)));
        inner += amp *
                 std::polar(Scalar(1), phm - tab.PH(n) + tab.PH(n - m)) *
                 (f1 + f2);
      }
      acc += (inner * rm).real();
    }
    out.s_cpt += wt * acc;

    Scalar bg = 0;
    for (int n = tab.lo; n <= tab.hi; ++n) {
      const Scalar q1 = d1 - Scalar(n) * w + kv;
      const Scalar q2 = d2 - Scalar(n) * w + kv;
      bg += sys.p1 * tab.A1(n) * tab.A1(n) * (gp / 2) / (gp * gp + q1 * q1) +
            sys.p2 * tab.A2(n) * tab.A2(n) * (gp / 2) / (gp * gp + q2 * q2);
    }
    out.s_background += wt * bg;
  }
  return out;
}

template <typename Scalar>
SignalPoint<Scalar> cpt_signal(const LambdaSystem<Scalar>& sys,
                               const CombSpec<Scalar>& comb, int m_tilde,
                               Scalar delta, const VelocityGrid<Scalar>& grid) {
  return cpt_signal(sys, ComponentTable<Scalar>::from_spec(comb), m_tilde,
                    delta, grid);
}

// Node-doubling convergence wrapper: doubles the velocity grid until
// s_cpt moves less than rel_tol, up to max_doublings. Non-convergence
// is reported in the info, not thrown.
template <typename Scalar>
std::pair<SignalPoint<Scalar>, SolveInfo<Scalar>> cpt_signal_refined(
    const LambdaSystem<Scalar>& sys, const ComponentTable<Scalar>& tab,
    int m_tilde, Scalar delta, int initial_nodes, Scalar rel_tol = Scalar(1e-6),
    int max_doublings = 3) {
  SolveInfo<Scalar> info;
  int n = std::max(1, initial_nodes);
  auto grid = build_velocity_grid(sys.kv0, n);
  SignalPoint<Scalar> prev = cpt_signal(sys, tab, m_tilde, delta, grid);
  info.nodes = static_cast<int>(grid.size());
  if (grid.degenerate()) return {prev, info};

  for (int it = 0; it < max_doublings; ++it) {
    n *= 2;
    auto fine = build_velocity_grid(sys.kv0, n);
    SignalPoint<Scalar> next = cpt_signal(sys, tab, m_tilde, delta, fine);
    info.nodes = n;
    info.refined = true;
    const Scalar scale = std::max({std::abs(next.s_cpt),
                                   std::abs(next.s_background),
                                   Scalar(1e-300)});
    if (std::abs(next.s_cpt - prev.s_cpt) <= rel_tol * scale)
      return {next, info};
    prev = next;
  }
  info.converged = false;
  info.warning = "velocity-grid refinement did not converge to " +
                 std::to_string(static_cast<double>(rel_tol)) + " at " +
                 std::to_string(info.nodes) + " nodes";
  return {prev, info};
}

}  // namespace fsfcpt
