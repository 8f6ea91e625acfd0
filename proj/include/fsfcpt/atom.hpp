#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "fsfcpt/errors.hpp"

namespace fsfcpt {

// Three-level Lambda system. Rates in units of the ground-coherence
// relaxation rate gamma_coh, which is therefore 1 unless a test
// deliberately scales it.
template <typename Scalar = double>
struct LambdaSystem {
  Scalar omega21{50};      // ground-state splitting
  Scalar p1{0.5}, p2{0.5}; // long-lived state populations
  Scalar gamma_prime{100}; // optical coherence relaxation rate
  Scalar gamma_coh{1};     // ground coherence relaxation rate (the unit)
  Scalar nu{0};            // velocity-changing collision rate
  Scalar kv0{0};           // Doppler width
  Scalar delta1{0};        // one-photon detuning of the peak component

  Scalar delta2() const { return delta1 - omega21; }

  void validate() const {
    if (!(omega21 > Scalar(0)))
      throw domain_error("atom: omega21 must be > 0");
    if (p1 < Scalar(0) || p2 < Scalar(0))
      throw domain_error("atom: populations must be >= 0");
    if (p1 + p2 > Scalar(1) + Scalar(1e-12))
      throw domain_error("atom: p1 + p2 must not exceed 1");
    if (!(gamma_prime > Scalar(0)))
      throw domain_error("atom: gamma_prime must be > 0");
    if (gamma_coh < Scalar(0))
      throw domain_error("atom: gamma_coh must be >= 0");
    if (nu < Scalar(0)) throw domain_error("atom: nu must be >= 0");
    if (kv0 < Scalar(0)) throw domain_error("atom: kv0 must be >= 0");
  }
};

// Optical relaxation rate from its decomposition into collisional,
// spontaneous and laser-linewidth parts.
template <typename Scalar>
Scalar gamma_prime_from_rates(Scalar gamma_col, Scalar gamma_sp,
                              Scalar gamma_laser) {
  if (gamma_col < Scalar(0) || gamma_sp < Scalar(0) || gamma_laser < Scalar(0))
    throw domain_error("gamma_prime_from_rates: rates must be >= 0");
  return gamma_col + Scalar(0.5) * gamma_sp + Scalar(0.5) * gamma_laser;
}

// Maxwell velocity distribution in units of the thermal velocity.
template <typename Scalar>
Scalar maxwell_density(Scalar v) {
  return std::exp(-v * v) / std::sqrt(std::numbers::pi_v<Scalar>);
}

// Harmonic index bringing m*spacing closest to omega21; exact ties go
// to the smaller index.
template <typename Scalar>
int select_mtilde(Scalar omega21, Scalar spacing) {
  if (!(spacing > Scalar(0)))
    throw domain_error("select_mtilde: spacing must be > 0");
  if (!(omega21 > Scalar(0)))
    throw domain_error("select_mtilde: omega21 must be > 0");
  const Scalar q = omega21 / spacing;
  int best = std::max(1, static_cast<int>(std::floor(q)));
  Scalar best_res = std::abs(omega21 - Scalar(best) * spacing);
  for (int m : {best + 1, best - 1}) {
    if (m < 1) continue;
    const Scalar res = std::abs(omega21 - Scalar(m) * spacing);
    if (res < best_res || (res == best_res && m < best)) {
      best = m;
      best_res = res;
    }
  }
  return best;
}

template <typename Scalar>
Scalar two_photon_detuning(Scalar omega21, int m_tilde, Scalar spacing) {
  return omega21 - Scalar(m_tilde) * spacing;
}

// Quadrature grid for Maxwell-weighted velocity integrals: Sum of
// weights[i] * f(nodes[i]) approximates the integral of M(v) f(v).
template <typename Scalar = double>
struct VelocityGrid {
  Eigen::Vector<Scalar, Eigen::Dynamic> nodes;
  Eigen::Vector<Scalar, Eigen::Dynamic> weights;

  Eigen::Index size() const { return nodes.size(); }
  bool degenerate() const { return nodes.size() == 1 && nodes[0] == Scalar(0); }

  // Population density of the class at node i. The degenerate grid is a
  // point distribution carrying all population in one class.
  Scalar density(Eigen::Index i) const {
    return degenerate() ? Scalar(1) : maxwell_density(nodes[i]);
  }
};

// Gauss-Hermite nodes and normalized weights via the symmetric
// tridiagonal Jacobi matrix. kv0 = 0 collapses to the single class v=0.
template <typename Scalar = double>
VelocityGrid<Scalar> build_velocity_grid(Scalar kv0, int node_count) {
  if (node_count < 1)
    throw domain_error("build_velocity_grid: node_count must be >= 1");
  if (kv0 < Scalar(0))
    throw domain_error("build_velocity_grid: kv0 must be >= 0");

  VelocityGrid<Scalar> grid;
  if (kv0 == Scalar(0) || node_count == 1) {
    grid.nodes = Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(1);
    grid.weights = Eigen::Vector<Scalar, Eigen::Dynamic>::Ones(1);
    return grid;
  }

  using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = node_count;
  Vec diag = Vec::Zero(n);
  Vec sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(Scalar(k) / Scalar(2));

  Eigen::SelfAdjointEigenSolver<Mat> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw numeric_error("build_velocity_grid: quadrature eigensolve failed");

  grid.nodes = es.eigenvalues();
  grid.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const Scalar v0 = es.eigenvectors()(0, i);
    grid.weights[i] = v0 * v0;  // normalized: weights of exp(-v^2)/sqrt(pi)
  }

  // enforce exact symmetry of the node pattern
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const Scalar x = (grid.nodes[j] - grid.nodes[i]) / Scalar(2);
    grid.nodes[i] = -x;
    grid.nodes[j] = x;
    const Scalar wm = (grid.weights[i] + grid.weights[j]) / Scalar(2);
    grid.weights[i] = wm;
    grid.weights[j] = wm;
  }
  if (n % 2 == 1) grid.nodes[n / 2] = Scalar(0);
  grid.weights /= grid.weights.sum();
  return grid;
}

}  // namespace fsfcpt
