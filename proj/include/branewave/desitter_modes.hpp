// Exact evolution of one Klein-Gordon mode of mass kappa on the Steady
// State Universe d_tau^2 u + 3 d_tau u - e^{-2 tau} Lap u + kappa u = 0,
// through Fourier multipliers built from Bessel functions of order nu,
// nu^2 = 9/4 - kappa, Re nu >= 0.
//
// Fourier convention: unitary in x, so int |u|^2 dx = int |u_hat|^2 dxi and
// radial integrals carry the weight 4 pi xi^2.
#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "branewave/specialfn.hpp"

namespace branewave::modes {

struct ModeParams {
  double kappa = 0.0;
  cplx bessel_order;  // nu

  static ModeParams from_kappa(double kappa);
  bool imaginary_order() const { return kappa > 2.25; }
  double order_real() const { return bessel_order.real(); }
  double order_imag() const { return bessel_order.imag(); }
};

// Propagator of v = e^{3 tau/2} u_hat in the basis (v, d_tau v):
//   v(tau) = A v(tau*) + B d_tau v(tau*),
//   A = pi/2 a [Y'(a) J(b) - J'(a) Y(b)],  B = pi/2 [Y(a) J(b) - J(a) Y(b)],
// with a = xi e^{-tau*}, b = xi e^{-tau}. Real for real kappa.
struct MultiplierSet {
  double a = 1.0;
  double b = 0.0;
  double da = 0.0;
  double db = 1.0;
};

// Below max(a, b) < kSmallArgument the Bessel form is a 0 * inf limit and
// the exact solution of v'' = nu^2 v is used (error O(z^2)).
inline constexpr double kSmallArgument = 1e-6;

MultiplierSet multipliers(const ModeParams& mode, double tau_star, double tau, double xi);

struct SpectralField {
  std::vector<double> xi_grid;
  std::vector<cplx> u_hat;
  std::vector<cplx> ut_hat;
  double tau = 0.0;

  // Throws std::invalid_argument unless the grid is strictly increasing,
  // nonnegative, the arrays match and every entry is finite.
  void validate() const;
};

// Composite Gauss-Legendre nodes on [0, xi_max] with weights 4 pi xi^2 dxi.
struct RadialQuadrature {
  std::vector<double> xi;
  std::vector<double> weight;
};
RadialQuadrature radial_quadrature(double xi_max, std::size_t panels, int order);

// Field on the nodes of q with the given radial profiles.
using RadialProfile = std::function<cplx(double)>;
SpectralField make_field(const RadialQuadrature& q, double tau, const RadialProfile& u0, const RadialProfile& u1);

// u_hat(tau) = e^{-3(tau - tau*)/2} (A u0 + B (u1 + 3/2 u0)) and its
// tau-derivative, per grid node.
SpectralField evolve(const SpectralField& init, const ModeParams& mode, double tau);

struct EnergyValue {
  double value = 0.0;
  bool indefinite = false;  // kappa < 0: the quadratic form has no sign
};

// int |d_tau u|^2 + e^{-2 tau}|grad u|^2 + kappa |u|^2 dx by radial
// quadrature; weights as from radial_quadrature.
EnergyValue energy(const SpectralField& state, const ModeParams& mode, const std::vector<double>& weights);

// Limit profile at tau = +inf for kappa = 0:
//   phi_hat = sqrt(pi/2) e^{tau*/2} xi^{-1/2} {J_{1/2}(z) u0 + J_{3/2}(z) e^{tau*} xi^{-1} u1},
// z = e^{-tau*} xi; at xi = 0 the limit u0 + u1/3. Result has ut_hat =
// -xi^2 phi_hat, the limit of e^{2 tau} d_tau u_hat, and tau = +inf.
SpectralField profile_phi(const SpectralField& init, const ModeParams& mode);

// Norm scales for decay fits with Sobolev index s:
//   full: ||u||_{H^s} + ||d_tau u||_{H^{s-1}}
//   half: ||u||_{H^{s-1/2}} + ||d_tau u||_{H^{s-3/2}}
double norm_full(const SpectralField& f, const std::vector<double>& weights, double s);
double norm_half(const SpectralField& f, const std::vector<double>& weights, double s);

struct DecayFit {
  double slope_full = 0.0;
  double slope_half = 0.0;
  bool tau_corrected = false;  // kappa == 9/4: norms divided by tau before the fit
  std::vector<double> taus;
  std::vector<double> full;
  std::vector<double> half;
};

// Least-squares slope of log(norm) against tau on `samples` uniform points
// of [tau_lo, tau_hi]. Throws std::invalid_argument for kappa <= 0, a window
// shorter than 1 or fewer than 3 samples.
DecayFit decay_rate_fit(const ModeParams& mode, const SpectralField& init, const std::vector<double>& weights,
                        double tau_lo, double tau_hi, int samples = 25, double s = 1.0);

// Late-time coefficient of u_hat e^{-(nu - 3/2) tau} for u0 = 0, kappa < 0,
// as the xi -> 0 limit: e^{(3/2 - nu) tau*} u1_hat/(2 nu).
std::vector<cplx> blowup_amplitude(const ModeParams& mode, const SpectralField& u1);
// The exact per-xi limit e^{3 tau*/2} Gamma(nu) 2^{nu-1} xi^{-nu} J_nu(xi e^{-tau*}) u1_hat.
std::vector<cplx> blowup_amplitude_exact(const ModeParams& mode, const SpectralField& u1);

// Real fields on the periodic box [-L/2, L/2)^3 with n points per side,
// index (i * n + j) * n + k.
struct Grid3 {
  std::size_t n = 0;
  double length = 0.0;
  double spacing() const { return length / static_cast<double>(n); }
  double coord(std::size_t i) const { return -0.5 * length + spacing() * static_cast<double>(i); }
};

struct LeakageReport {
  double leakage = 0.0;        // max |u(tau)| beyond radius + one grid spacing
  double max_amplitude = 0.0;  // max |u(tau)| over the box
  double radius = 0.0;         // R + e^{-tau*} - e^{-tau}
  bool grid_too_coarse = false;
};

// Evolves (u0, u1), supported in |x| <= R, per 3D frequency with the
// multipliers and measures |u| outside the predicted support. grid_too_coarse
// is set when the box cannot hold the support plus a margin of 8 cells or
// when the data spectrum is not resolved (relative energy in the outer
// eighth of the frequency shell above 1e-14).
LeakageReport support_radius_check(const Grid3& grid, const std::vector<double>& u0, const std::vector<double>& u1,
                                   double R, double tau_star, double tau, const ModeParams& mode);

}  // namespace branewave::modes
