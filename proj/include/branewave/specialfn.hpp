// Bessel, gamma and associated Legendre functions for the mode and
// transverse-spectrum solvers.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace branewave {

using cplx = std::complex<double>;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace specialfn {

// Gamma function for complex argument. Lanczos (g = 7) on Re z >= 1/2 and
// reflection below. Throws DomainError at the poles.
cplx gamma_complex(cplx z);
cplx lgamma_complex(cplx z);
// 1/Gamma(z), entire; exactly zero at the poles of Gamma.
cplx rgamma_complex(cplx z);

struct CylinderEval {
  double order;
  double argument;
  double j;
  double y;
  double j_prime;
  double y_prime;
};

// J_nu, Y_nu and their z-derivatives for real order nu in [0, 50] and
// z in (0, 1e4].
//   z < 2                : Temme series for Y_mu, |mu| <= 1/2
//   2 <= z < z_asym(nu)  : Steed's continued fractions
//   z >= z_asym(nu)      : Hankel expansion, z_asym = max(30, 1.2 nu^2)
// Orders above the reduced one come from upward recurrence on Y and the
// CF1 ratio on J.
CylinderEval bessel_eval(double nu, double z);

// Purely imaginary order nu = i s. Returns the real, numerically
// satisfactory pair
//   F_s(z) = Re J_{is}(z) / cosh(pi s / 2),
//   G_s(z) = Im J_{is}(z) / sinh(pi s / 2)   (= Y_0 at s = 0),
// which share the Wronskian F G' - F' G = 2/(pi z) with (J_nu, Y_nu). Any
// formula that depends on (J, Y) only through that Wronskian may use them
// unchanged. The fields j/y hold F/G.
// F + i G = e^{-pi s/2} H1_{is}(z). Routes:
//   Miller backward recurrence normalized by the Neumann series
//     (z/2)^nu = sum (nu+2k) Gamma(nu+k)/k! J_{nu+2k}(z)
//   while that sum cancels by less than a factor 30;
//   Hankel expansion for z >= max(30, 1.2 s^2);
//   otherwise phase-amplitude: |F + i G|^2 = 2/(pi z Im g), g = H1'/H1 from
//   the Steed-Temme fraction, with the phase integrated in z from a point
//   where the Miller route is well conditioned.
// Valid for s in [0, 50], z in (0, 1e4]; relative accuracy about 1e-13.
CylinderEval bessel_eval_imag(double s, double z);

// J_{is}(z) and J_{is+1}(z) by the Hankel or Miller route only; loses
// accuracy once z is large compared with s (use bessel_eval_imag there).
void bessel_j_imag_order(double s, double z, cplx& j0, cplx& j1);

struct LegendreEval {
  double degree;
  cplx order;
  double argument;
  cplx p;        // P^{-mu}_nu(x)
  cplx q;        // Olver's Q^{mu}_nu(x) = e^{-i pi mu} Q^mu_nu(x) / Gamma(nu+mu+1)
  cplx p_prime;  // d/dx
  cplx q_prime;
};

// Associated Legendre functions on the cut-free segment x > 1.
// P^{-mu}_nu comes from the Gauss series in w = (x-1)/(x+1) after a Pfaff
// transformation (two variants, the better conditioned one is kept).
// Olver's Q comes either from its 1/x^2 series or from the connection
//   Q^mu_nu = pi/(2 sin mu pi) [P^mu_nu/G(nu+mu+1) - P^{-mu}_nu/G(nu-mu+1)],
// whichever has the smaller cancellation estimate. When mu is within 0.1
// of an integer the connection is evaluated as a Cauchy mean over a circle
// in the mu-plane, since Q is entire in mu.
// xm1 = x - 1 may be passed separately to keep precision near x = 1.
LegendreEval legendre_eval(double nu, cplx mu, double x);
LegendreEval legendre_eval(double nu, cplx mu, double x, double xm1);

// P^{-mu}_nu(x) and its x-derivative only.
void legendre_p(double nu, cplx mu, double x, double xm1, cplx& p, cplx& dp);

// Regularized Gauss series F(a,b;c;z)/Gamma(c) for |z| < 1 with its
// z-derivative. cond receives max|term|/|sum|, a cancellation estimate.
// Terminates at relative term < 1e-17, throws ConvergenceError after 1e6
// terms.
void hyp2f1_regularized(cplx a, cplx b, cplx c, cplx z, cplx& f, cplx& df,
                        double* cond = nullptr);

}  // namespace specialfn
}  // namespace branewave
