// Shared helpers for the test binaries: data families and independent oracles.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "branewave/brane_spectrum.hpp"
#include "branewave/desitter_modes.hpp"

namespace testing_support {

using branewave::cplx;

inline double rel_diff(double a, double b) {
  const double s = std::max(std::fabs(a), std::fabs(b));
  return s == 0.0 ? 0.0 : std::fabs(a - b) / s;
}

// Smooth bump in y = log coth(rho/2) supported on [lo, hi]:
// amp (1 + c1 t + c2 t^2)(1 - t^2)^8, t the centered coordinate.
struct YBump {
  double lo = 1.0;
  double hi = 3.0;
  double amp = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double rho) const { return at_y(branewave::spectrum::y_from_rho(rho)); }
  double at_y(double y) const {
    const double t = (2.0 * y - lo - hi) / (hi - lo);
    if (std::fabs(t) >= 1.0) return 0.0;
    return amp * (1.0 + c1 * t + c2 * t * t) * std::pow(1.0 - t * t, 8);
  }
};

// Random member of the bump family: it starts 0.02 to 1.02 above y0 and has
// half-width 1 to 1.5, so it vanishes near the brane and is resolved by the
// truncated continuum.
inline YBump random_bump(std::mt19937_64& rng, double y0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  YBump b;
  const double half = 1.0 + 0.5 * U(rng);
  b.lo = y0 + 0.02 + U(rng);
  b.hi = b.lo + 2.0 * half;
  b.amp = 0.5 + U(rng);
  b.c1 = U(rng) - 0.5;
  b.c2 = U(rng) - 0.5;
  return b;
}

inline std::vector<cplx> sample(const branewave::spectrum::RadialGrid& g, const YBump& b) {
  std::vector<cplx> u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = b.at_y(g.y.x[i]);
  return u;
}

// Smooth bump in rho supported on [lo, hi]: amp (1 + c1 t + c2 t^2)(1 - t^2)^8.
struct RhoBump {
  double lo = 0.2;
  double hi = 1.2;
  double amp = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double operator()(double rho) const {
    const double t = (2.0 * rho - lo - hi) / (hi - lo);
    if (std::fabs(t) >= 1.0) return 0.0;
    return amp * (1.0 + c1 * t + c2 * t * t) * std::pow(1.0 - t * t, 8);
  }
};

// Random member of the rho-bump family: it spans [0.1 to 0.25, 0.93 to 0.98]
// times rho0, so it is resolved by a uniform rho grid and vanishes at the brane.
inline RhoBump random_rho_bump(std::mt19937_64& rng, double rho0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  RhoBump b;
  b.lo = rho0 * (0.1 + 0.15 * U(rng));
  b.hi = rho0 * (0.93 + 0.05 * U(rng));
  b.amp = 0.5 + U(rng);
  b.c1 = U(rng) - 0.5;
  b.c2 = U(rng) - 0.5;
  return b;
}

// Adaptive Dormand-Prince integration of
//   v'' + (e^{-2 tau} xi^2 + kappa - 9/4) v = 0,  v = e^{3 tau/2} u_hat,
// from (u, u_tau) at tau0 to tau1. Returns (u, u_tau) at tau1.
inline std::array<double, 2> ode_mode(double kappa, double xi, double tau0, double tau1, double u0, double ut0,
                                      double tol = 1e-13) {
  using State = std::array<double, 2>;
  const double e0 = std::exp(1.5 * tau0);
  State v{e0 * u0, e0 * (ut0 + 1.5 * u0)};
  auto rhs = [&](const State& s, State& d, double tau) {
    d[0] = s[1];
    d[1] = -(std::exp(-2.0 * tau) * xi * xi + kappa - 2.25) * s[0];
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_dopri5<State>());
  const double dt0 = (tau1 > tau0 ? 1.0 : -1.0) * 1e-4;
  ode::integrate_adaptive(stepper, rhs, v, tau0, tau1, dt0);
  const double e1 = std::exp(-1.5 * tau1);
  return {e1 * v[0], e1 * v[1] - 1.5 * e1 * v[0]};
}

// Single-xi field holding (u0, u1).
inline branewave::modes::SpectralField point_field(double xi, cplx u0, cplx u1, double tau) {
  branewave::modes::SpectralField f;
  f.xi_grid = {xi};
  f.u_hat = {u0};
  f.ut_hat = {u1};
  f.tau = tau;
  return f;
}

}  // namespace testing_support
