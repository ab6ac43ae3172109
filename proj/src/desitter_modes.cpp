#include "branewave/desitter_modes.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "branewave/parallel.hpp"
#include "branewave/quadrature.hpp"

namespace branewave::modes {

namespace {

constexpr double kPi = std::numbers::pi;

// Real pair (J, Y) or (F, G) sharing the Wronskian 2/(pi z).
specialfn::CylinderEval cylinder(const ModeParams& mode, double z) {
  if (mode.imaginary_order()) return specialfn::bessel_eval_imag(mode.order_imag(), z);
  return specialfn::bessel_eval(mode.order_real(), z);
}

MultiplierSet small_argument(const ModeParams& mode, double delta) {
  MultiplierSet m;
  if (mode.imaginary_order()) {
    const double s = mode.order_imag();
    const double c = std::cos(s * delta), sn = std::sin(s * delta);
    m.a = c;
    m.b = sn / s;
    m.da = -s * sn;
    m.db = c;
  } else {
    const double nu = mode.order_real();
    if (nu == 0.0) {
      m.a = 1.0;
      m.b = delta;
      m.da = 0.0;
      m.db = 1.0;
    } else {
      const double c = std::cosh(nu * delta), sh = std::sinh(nu * delta);
      m.a = c;
      m.b = sh / nu;
      m.da = nu * sh;
      m.db = c;
    }
  }
  return m;
}

}  // namespace

ModeParams ModeParams::from_kappa(double kappa) {
  if (!std::isfinite(kappa)) throw std::invalid_argument("ModeParams: kappa must be finite");
  ModeParams p;
  p.kappa = kappa;
  const double d = 2.25 - kappa;
  p.bessel_order = (d >= 0.0) ? cplx(std::sqrt(d), 0.0) : cplx(0.0, std::sqrt(-d));
  return p;
}

MultiplierSet multipliers(const ModeParams& mode, double tau_star, double tau, double xi) {
  if (!std::isfinite(tau_star) || !std::isfinite(tau) || !std::isfinite(xi))
    throw std::invalid_argument("multipliers: non-finite argument");
  if (xi < 0.0) throw std::invalid_argument("multipliers: xi must be nonnegative");
  const double a = xi * std::exp(-tau_star);
  const double b = xi * std::exp(-tau);
  if (std::max(a, b) < kSmallArgument) return small_argument(mode, tau - tau_star);
  const auto ca = cylinder(mode, a);
  const auto cb = cylinder(mode, b);
  const double h = 0.5 * kPi;
  MultiplierSet m;
  m.a = h * a * (ca.y_prime * cb.j - ca.j_prime * cb.y);
  m.b = h * (ca.y * cb.j - ca.j * cb.y);
  m.da = -h * a * b * (ca.y_prime * cb.j_prime - ca.j_prime * cb.y_prime);
  m.db = -h * b * (ca.y * cb.j_prime - ca.j * cb.y_prime);
  return m;
}

void SpectralField::validate() const {
  if (u_hat.size() != xi_grid.size() || ut_hat.size() != xi_grid.size())
    throw std::invalid_argument("SpectralField: array lengths differ");
  for (std::size_t i = 0; i < xi_grid.size(); ++i) {
    if (!std::isfinite(xi_grid[i]) || xi_grid[i] < 0.0) throw std::invalid_argument("SpectralField: bad xi");
    if (i > 0 && !(xi_grid[i] > xi_grid[i - 1])) throw std::invalid_argument("SpectralField: xi not increasing");
    if (!std::isfinite(std::abs(u_hat[i])) || !std::isfinite(std::abs(ut_hat[i])))
      throw std::invalid_argument("SpectralField: non-finite sample");
  }
}

RadialQuadrature radial_quadrature(double xi_max, std::size_t panels, int order) {
  const quad::Composite c = quad::composite(quad::uniform_breaks(0.0, xi_max, panels), order);
  RadialQuadrature q;
  q.xi = c.x;
  q.weight.resize(c.x.size());
  for (std::size_t i = 0; i < c.x.size(); ++i) q.weight[i] = 4.0 * kPi * c.x[i] * c.x[i] * c.w[i];
  return q;
}

SpectralField make_field(const RadialQuadrature& q, double tau, const RadialProfile& u0, const RadialProfile& u1) {
  SpectralField f;
  f.xi_grid = q.xi;
  f.tau = tau;
  f.u_hat.reserve(q.xi.size());
  f.ut_hat.reserve(q.xi.size());
  for (double x : q.xi) {
    f.u_hat.push_back(u0(x));
    f.ut_hat.push_back(u1(x));
  }
  return f;
}

SpectralField evolve(const SpectralField& init, const ModeParams& mode, double tau) {
  init.validate();
  SpectralField out;
  out.xi_grid = init.xi_grid;
  out.tau = tau;
  out.u_hat.resize(init.xi_grid.size());
  out.ut_hat.resize(init.xi_grid.size());
  const double damp = std::exp(-1.5 * (tau - init.tau));
  for (std::size_t i = 0; i < init.xi_grid.size(); ++i) {
    const MultiplierSet m = multipliers(mode, init.tau, tau, init.xi_grid[i]);
    const cplx u0 = init.u_hat[i];
    const cplx w = init.ut_hat[i] + 1.5 * u0;
    const cplx u = damp * (m.a * u0 + m.b * w);
    out.u_hat[i] = u;
    out.ut_hat[i] = -1.5 * u + damp * (m.da * u0 + m.db * w);
  }
  return out;
}

EnergyValue energy(const SpectralField& state, const ModeParams& mode, const std::vector<double>& weights) {
  state.validate();
  if (weights.size() != state.xi_grid.size()) throw std::invalid_argument("energy: weight count mismatch");
  const double e2 = std::exp(-2.0 * state.tau);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double x = state.xi_grid[i];
    acc += weights[i] * (std::norm(state.ut_hat[i]) + (e2 * x * x + mode.kappa) * std::norm(state.u_hat[i]));
  }
  return EnergyValue{acc, mode.kappa < 0.0};
}

SpectralField profile_phi(const SpectralField& init, const ModeParams& mode) {
  if (mode.kappa != 0.0) throw std::invalid_argument("profile_phi: requires kappa = 0");
  init.validate();
  SpectralField out;
  out.xi_grid = init.xi_grid;
  out.tau = std::numeric_limits<double>::infinity();
  out.u_hat.resize(init.xi_grid.size());
  out.ut_hat.resize(init.xi_grid.size());
  const double et = std::exp(init.tau);
  for (std::size_t i = 0; i < init.xi_grid.size(); ++i) {
    const double xi = init.xi_grid[i];
    const double z = xi / et;
    // k1 = sqrt(pi/2) e^{tau*/2} xi^{-1/2} J_{1/2}(z) = sin z / z,
    // k2 = sqrt(pi/2) e^{3tau*/2} xi^{-3/2} J_{3/2}(z) = (sin z - z cos z)/z^3.
    double k1, k2;
    if (z < 1e-3) {
      const double z2 = z * z;
      k1 = 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
      k2 = 1.0 / 3.0 - z2 / 30.0 + z2 * z2 / 840.0;
    } else {
      const double c = std::sqrt(0.5 * kPi);
      k1 = c * std::sqrt(et / xi) * specialfn::bessel_eval(0.5, z).j;
      k2 = c * et * std::sqrt(et / xi) / xi * specialfn::bessel_eval(1.5, z).j;
    }
    const cplx phi = k1 * init.u_hat[i] + k2 * init.ut_hat[i];
    out.u_hat[i] = phi;
    out.ut_hat[i] = -xi * xi * phi;
  }
  return out;
}

double norm_full(const SpectralField& f, const std::vector<double>& weights, double s) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double p = 1.0 + f.xi_grid[i] * f.xi_grid[i];
    a += weights[i] * std::pow(p, s) * std::norm(f.u_hat[i]);
    b += weights[i] * std::pow(p, s - 1.0) * std::norm(f.ut_hat[i]);
  }
  return std::sqrt(a) + std::sqrt(b);
}

double norm_half(const SpectralField& f, const std::vector<double>& weights, double s) {
  return norm_full(f, weights, s - 0.5);
}

DecayFit decay_rate_fit(const ModeParams& mode, const SpectralField& init, const std::vector<double>& weights,
                        double tau_lo, double tau_hi, int samples, double s) {
  if (!(mode.kappa > 0.0)) throw std::invalid_argument("decay_rate_fit: requires kappa > 0");
  if (!(tau_hi - tau_lo >= 1.0) || samples < 3) throw std::invalid_argument("decay_rate_fit: insufficient window");
  if (weights.size() != init.xi_grid.size()) throw std::invalid_argument("decay_rate_fit: weight count mismatch");
  DecayFit fit;
  fit.tau_corrected = (mode.kappa == 2.25);
  double st = 0, sf = 0, sh = 0, stt = 0, stf = 0, sth = 0;
  for (int k = 0; k < samples; ++k) {
    const double t = tau_lo + (tau_hi - tau_lo) * k / (samples - 1.0);
    const SpectralField f = evolve(init, mode, t);
    double nf = norm_full(f, weights, s), nh = norm_half(f, weights, s);
    fit.taus.push_back(t);
    fit.full.push_back(nf);
    fit.half.push_back(nh);
    if (fit.tau_corrected) {
      nf /= t;
      nh /= t;
    }
    const double lf = std::log(nf), lh = std::log(nh);
    st += t;
    sf += lf;
    sh += lh;
    stt += t * t;
    stf += t * lf;
    sth += t * lh;
  }
  const double n = samples;
  const double den = n * stt - st * st;
  fit.slope_full = (n * stf - st * sf) / den;
  fit.slope_half = (n * sth - st * sh) / den;
  return fit;
}

std::vector<cplx> blowup_amplitude(const ModeParams& mode, const SpectralField& u1) {
  if (!(mode.kappa < 0.0)) throw std::invalid_argument("blowup_amplitude: requires kappa < 0");
  const double nu = mode.order_real();
  const double f = std::exp((1.5 - nu) * u1.tau) / (2.0 * nu);
  std::vector<cplx> out(u1.u_hat.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f * u1.ut_hat[i];
  return out;
}

std::vector<cplx> blowup_amplitude_exact(const ModeParams& mode, const SpectralField& u1) {
  if (!(mode.kappa < 0.0)) throw std::invalid_argument("blowup_amplitude_exact: requires kappa < 0");
  const double nu = mode.order_real();
  const double et = std::exp(-u1.tau);
  std::vector<cplx> out(u1.u_hat.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double xi = u1.xi_grid[i];
    const double z = xi * et;
    double coef;
    if (z < 1e-6) {
      coef = std::exp((1.5 - nu) * u1.tau) / (2.0 * nu);
    } else {
      coef = std::exp(1.5 * u1.tau + std::lgamma(nu) + (nu - 1.0) * std::log(2.0) - nu * std::log(xi)) *
             specialfn::bessel_eval(nu, z).j;
    }
    out[i] = coef * u1.ut_hat[i];
  }
  return out;
}

LeakageReport support_radius_check(const Grid3& grid, const std::vector<double>& u0, const std::vector<double>& u1,
                                   double R, double tau_star, double tau, const ModeParams& mode) {
  const std::size_t n = grid.n;
  const std::size_t total = n * n * n;
  if (n < 8 || n % 2 != 0 || !(grid.length > 0.0)) throw std::invalid_argument("support_radius_check: bad grid");
  if (u0.size() != total || u1.size() != total) throw std::invalid_argument("support_radius_check: field size");
  if (!(tau >= tau_star)) throw std::invalid_argument("support_radius_check: requires tau >= tau*");
  LeakageReport rep;
  rep.radius = R + std::exp(-tau_star) - std::exp(-tau);
  const double h = grid.spacing();
  rep.grid_too_coarse = (rep.radius + 8.0 * h > 0.5 * grid.length);

  bool all_zero = true;
  for (std::size_t i = 0; i < total && all_zero; ++i) all_zero = (u0[i] == 0.0 && u1[i] == 0.0);
  if (all_zero) return rep;

  const std::size_t nh = n / 2 + 1;
  const std::size_t ctotal = n * n * nh;
  const int ni = static_cast<int>(n);
  std::vector<double> real(total);
  auto* c0 = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ctotal));
  auto* c1 = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ctotal));
  if (!c0 || !c1) throw std::bad_alloc();
  fftw_plan fwd = fftw_plan_dft_r2c_3d(ni, ni, ni, real.data(), c0, FFTW_ESTIMATE);
  std::copy(u0.begin(), u0.end(), real.begin());
  fftw_execute_dft_r2c(fwd, real.data(), c0);
  std::copy(u1.begin(), u1.end(), real.begin());
  fftw_execute_dft_r2c(fwd, real.data(), c1);
  fftw_destroy_plan(fwd);

  // Multipliers depend on |k| only; cache them by the integer |m|^2.
  const double dk = 2.0 * kPi / grid.length;
  const std::size_t max_m2 = 3 * (n / 2) * (n / 2) + 1;
  std::vector<char> used(max_m2, 0);
  auto freq = [n](std::size_t i) { return (i <= n / 2) ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < nh; ++k) {
        const long a = freq(i), b = freq(j), c = static_cast<long>(k);
        used[static_cast<std::size_t>(a * a + b * b + c * c)] = 1;
      }
  std::vector<std::size_t> keys;
  for (std::size_t m2 = 0; m2 < max_m2; ++m2)
    if (used[m2]) keys.push_back(m2);
  std::vector<MultiplierSet> table(keys.size());
  parallel_for(keys.size(), [&](std::size_t q) {
    table[q] = multipliers(mode, tau_star, tau, dk * std::sqrt(static_cast<double>(keys[q])));
  });
  std::vector<std::size_t> slot(max_m2, 0);
  for (std::size_t q = 0; q < keys.size(); ++q) slot[keys[q]] = q;

  // Spectral resolution of the data: energy beyond 7/8 of the Nyquist shell.
  const double kmax = dk * static_cast<double>(n / 2);
  double e_all = 0.0, e_outer = 0.0;
  const double damp = std::exp(-1.5 * (tau - tau_star));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < nh; ++k) {
        const long a = freq(i), b = freq(j), c = static_cast<long>(k);
        const std::size_t m2 = static_cast<std::size_t>(a * a + b * b + c * c);
        const std::size_t idx = (i * n + j) * nh + k;
        const double e = c0[idx][0] * c0[idx][0] + c0[idx][1] * c0[idx][1] + c1[idx][0] * c1[idx][0] +
                         c1[idx][1] * c1[idx][1];
        e_all += e;
        if (dk * std::sqrt(static_cast<double>(m2)) > 0.875 * kmax) e_outer += e;
        const MultiplierSet& m = table[slot[m2]];
        for (int p = 0; p < 2; ++p) {
          const double v0 = c0[idx][p];
          const double w = c1[idx][p] + 1.5 * v0;
          c0[idx][p] = damp * (m.a * v0 + m.b * w);
        }
      }
  if (e_all > 0.0 && e_outer > 1e-14 * e_all) rep.grid_too_coarse = true;

  fftw_plan bwd = fftw_plan_dft_c2r_3d(ni, ni, ni, c0, real.data(), FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);
  fftw_free(c0);
  fftw_free(c1);

  const double norm = 1.0 / static_cast<double>(total);
  const double cut = rep.radius + h;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double v = std::fabs(real[(i * n + j) * n + k] * norm);
        rep.max_amplitude = std::max(rep.max_amplitude, v);
        const double x = grid.coord(i), y = grid.coord(j), z = grid.coord(k);
        if (std::sqrt(x * x + y * y + z * z) > cut) rep.leakage = std::max(rep.leakage, v);
      }
  return rep;
}

}  // namespace branewave::modes
