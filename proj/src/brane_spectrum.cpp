#include "branewave/brane_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "branewave/parallel.hpp"
#include "branewave/table_io.hpp"

namespace branewave::spectrum {

namespace {

constexpr double kPi = std::numbers::pi;

double sqr(double v) { return v * v; }

// P^{-mu}_nu at cosh(rho) with x - 1 = 2 sinh^2(rho/2) kept exact near rho = 0.
void legendre_at_rho(double nu, cplx mu, double rho, cplx& p, cplx& dp) {
  const double s = std::sinh(0.5 * rho);
  specialfn::legendre_p(nu, mu, std::cosh(rho), 2.0 * s * s, p, dp);
}

double x0_of(const BraneGeometry& g) { return -1.0 / g.alpha; }
double x0m1_of(const BraneGeometry& g) { return -1.0 / g.alpha - 1.0; }

// Deepest eigenvalue searched below the scan floor.
constexpr double kFloorLimit = 1e6;

}  // namespace

BraneGeometry BraneGeometry::from_alpha(double alpha) {
  if (!(alpha > -1.0 && alpha < 0.0)) throw DomainError("BraneGeometry: alpha must lie in (-1, 0)");
  BraneGeometry g;
  g.alpha = alpha;
  const double r = std::sqrt(1.0 - alpha * alpha);
  g.rho0 = std::log((1.0 + r) / (-alpha));
  g.y0 = std::log((1.0 - alpha + r) / (1.0 + alpha + r));
  g.gamma = std::sqrt(2.0 / (std::sinh(g.rho0) * std::cosh(g.rho0) - g.rho0));
  g.scalar_curvature = 12.0 * alpha * alpha / (1.0 - alpha * alpha);
  return g;
}

double y_from_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("y_from_rho: rho must be positive");
  // log coth(rho/2) = log1p(2/(e^rho - 1))
  return std::log1p(2.0 / std::expm1(rho));
}

double rho_from_y(double y) {
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("rho_from_y: y must be positive");
  return std::log1p(2.0 / std::expm1(y));
}

double x_from_rho(double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw DomainError("x_from_rho: rho must be nonnegative");
  return std::cosh(rho);
}

double rho_from_x(double x) {
  if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("rho_from_x: x must be at least 1");
  return std::acosh(x);
}

double xm1_from_y(double y) {
  if (!(y > 0.0)) throw DomainError("xm1_from_y: y must be positive");
  return 2.0 / std::expm1(2.0 * y);
}

TauRho tau_rho_from_tz(double t, double z) {
  if (!(z > 0.0) || !(t < -z)) throw DomainError("tau_rho_from_tz: requires t < -z < 0");
  const double d = (t - z) * (t + z);
  // sinh(rho) = e^{-tau}/z = sqrt(t^2 - z^2)/z
  return TauRho{-0.5 * std::log(d), std::asinh(std::sqrt(d) / z)};
}

TimeDepth tz_from_tau_rho(double tau, double rho) {
  if (!(rho > 0.0) || !std::isfinite(tau)) throw DomainError("tz_from_tau_rho: requires rho > 0");
  const double e = std::exp(-tau);
  return TimeDepth{-e / std::tanh(rho), e / std::sinh(rho)};
}

double brane_time(const BraneGeometry& g, double tau) {
  return -std::exp(-tau) / std::sqrt(1.0 - g.alpha * g.alpha);
}

OperatorSpec OperatorSpec::robin(double alpha, double M, double c) {
  OperatorSpec s;
  s.M = M;
  s.bc = Boundary::Robin;
  s.c = c;
  s.geometry = BraneGeometry::from_alpha(alpha);
  s.validate();
  return s;
}

OperatorSpec OperatorSpec::dirichlet(double alpha, double M) {
  OperatorSpec s;
  s.M = M;
  s.bc = Boundary::Dirichlet;
  s.c = 0.0;
  s.geometry = BraneGeometry::from_alpha(alpha);
  s.validate();
  return s;
}

double OperatorSpec::legendre_degree() const { return -0.5 + std::sqrt(M * M + 4.0); }

double OperatorSpec::robin_x_constant() const {
  const double r = std::sqrt(1.0 - geometry.alpha * geometry.alpha);
  return geometry.alpha / r * (c - 1.5 / r);
}

void OperatorSpec::validate() const {
  if (!(M >= 0.0) || !std::isfinite(M)) throw std::invalid_argument("OperatorSpec: M must be finite and >= 0");
  if (bc == Boundary::Robin && !std::isfinite(c)) throw std::invalid_argument("OperatorSpec: c must be finite");
  if (legendre_degree() > 10.0) throw std::invalid_argument("OperatorSpec: M too large (Legendre degree above 10)");
}

double transcendental_residual(double lambda, const OperatorSpec& spec) {
  if (!(lambda <= 2.25)) throw DomainError("transcendental_residual: lambda must be below 9/4");
  const double mu = std::sqrt(2.25 - lambda);
  const double nu = spec.legendre_degree();
  const double x0 = x0_of(spec.geometry), xm1 = x0m1_of(spec.geometry);
  cplx p, dp;
  specialfn::legendre_p(nu, mu, x0, xm1, p, dp);
  if (spec.bc == Boundary::Dirichlet) return p.real();
  cplx p1, dp1;
  specialfn::legendre_p(nu - 1.0, mu, x0, xm1, p1, dp1);
  const double a = spec.geometry.alpha;
  const double r = std::sqrt(1.0 - a * a);
  return (spec.c * r - 2.0 + std::sqrt(spec.M * spec.M + 4.0)) * p.real() + a * (nu - mu) * p1.real();
}

double derivative_form_residual(double lambda, const OperatorSpec& spec) {
  if (!(lambda <= 2.25)) throw DomainError("derivative_form_residual: lambda must be below 9/4");
  const double mu = std::sqrt(2.25 - lambda);
  const double nu = spec.legendre_degree();
  const double r0 = spec.geometry.rho0;
  cplx p, dp;
  specialfn::legendre_p(nu, mu, x0_of(spec.geometry), x0m1_of(spec.geometry), p, dp);
  const double sh = std::sinh(r0);
  const double w = std::pow(sh, -1.5) * p.real();
  if (spec.bc == Boundary::Dirichlet) return w;
  const double dw = std::pow(sh, -1.5) * (-1.5 / std::tanh(r0) * p.real() + sh * dp.real());
  return dw + spec.c * w;
}

RadialGrid make_radial_grid(const BraneGeometry& g, double eps_fraction, double panel_width, int order) {
  if (!(eps_fraction > 0.0 && eps_fraction < 1.0)) throw std::invalid_argument("make_radial_grid: eps_fraction");
  if (!(panel_width > 0.0)) throw std::invalid_argument("make_radial_grid: panel_width");
  const double y_max = y_from_rho(eps_fraction * g.rho0);
  const auto panels = static_cast<std::size_t>(std::ceil((y_max - g.y0) / panel_width));
  RadialGrid grid;
  grid.eps_fraction = eps_fraction;
  grid.y = quad::composite(quad::uniform_breaks(g.y0, y_max, std::max<std::size_t>(panels, 1)), order);
  const std::size_t n = grid.y.x.size();
  grid.rho.resize(n);
  grid.sinh_rho.resize(n);
  grid.h_weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid.rho[i] = rho_from_y(grid.y.x[i]);
    grid.sinh_rho[i] = 1.0 / std::sinh(grid.y.x[i]);
    grid.h_weight[i] = grid.y.w[i] * std::pow(grid.sinh_rho[i], 3);
  }
  return grid;
}

cplx h_inner(const RadialGrid& grid, const std::vector<cplx>& u, const std::vector<cplx>& v) {
  if (u.size() != grid.size() || v.size() != grid.size()) throw std::invalid_argument("h_inner: size mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += grid.h_weight[i] * u[i] * std::conj(v[i]);
  return acc;
}

double h_norm_sq(const RadialGrid& grid, const std::vector<cplx>& u) { return h_inner(grid, u, u).real(); }

std::vector<cplx> derivative_rho(const RadialGrid& grid, const std::vector<cplx>& u) {
  if (u.size() != grid.size()) throw std::invalid_argument("derivative_rho: size mismatch");
  std::vector<double> re(u.size()), im(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    re[i] = u[i].real();
    im[i] = u[i].imag();
  }
  const auto dre = quad::differentiate(grid.y, re);
  const auto dim = quad::differentiate(grid.y, im);
  std::vector<cplx> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = -cplx(dre[i], dim[i]) / grid.sinh_rho[i];
  return out;
}

double default_search_floor(double M) { return -std::max(10.0, 4.0 * M * M + 10.0); }

double eigenfunction_normalizer(const OperatorSpec& spec, double lambda) {
  if (!(lambda < 2.25)) throw DomainError("eigenfunction_normalizer: lambda must be below 9/4");
  const double mu = std::sqrt(2.25 - lambda);
  const double nu = spec.legendre_degree();
  const double y0 = spec.geometry.y0;
  // int_{y0}^inf P^{-mu}_nu(coth y)^2 dy; beyond y_end, P ~ C e^{-mu y} up to O(e^{-2y}).
  const double y_end = y0 + std::max(12.0, 40.0 / mu);
  std::vector<double> breaks{y0};
  double width = 0.25;
  while (breaks.back() < y_end) {
    breaks.push_back(std::min(y_end, breaks.back() + width));
    width = std::min(width * 1.2, std::max(0.25, 0.5 / mu));
  }
  const quad::Composite q = quad::composite(breaks, 16);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    cplx p, dp;
    specialfn::legendre_p(nu, mu, 1.0 / std::tanh(q.x[i]), xm1_from_y(q.x[i]), p, dp);
    acc += q.w[i] * p.real() * p.real();
  }
  cplx p, dp;
  specialfn::legendre_p(nu, mu, 1.0 / std::tanh(y_end), xm1_from_y(y_end), p, dp);
  acc += p.real() * p.real() / (2.0 * mu);
  return 1.0 / std::sqrt(acc);
}

double eigenfunction_value(const OperatorSpec& spec, double lambda, double normalizer, double rho) {
  cplx p, dp;
  legendre_at_rho(spec.legendre_degree(), std::sqrt(2.25 - lambda), rho, p, dp);
  return normalizer * std::pow(std::sinh(rho), -1.5) * p.real();
}

PointSpectrum point_spectrum(const OperatorSpec& spec, const RadialGrid& grid, double search_floor,
                             double scan_step) {
  spec.validate();
  if (!(search_floor < 2.25)) throw std::invalid_argument("point_spectrum: search_floor must be below 9/4");
  if (!(scan_step > 0.0)) throw std::invalid_argument("point_spectrum: scan_step must be positive");
  const double top = 2.25 - 1e-12;

  auto scan = [&](double h) {
    const auto n = static_cast<std::size_t>(std::ceil((top - search_floor) / h));
    std::vector<double> lam(n + 1), f(n + 1);
    for (std::size_t k = 0; k <= n; ++k) lam[k] = (k == n) ? top : search_floor + h * static_cast<double>(k);
    parallel_for(n + 1, [&](std::size_t k) { f[k] = transcendental_residual(lam[k], spec); });
    for (std::size_t k = 0; k <= n; ++k)
      if (!std::isfinite(f[k]))
        throw ConvergenceError("point_spectrum: non-finite residual at lambda = " + std::to_string(lam[k]));
    std::vector<std::pair<double, double>> brackets;
    for (std::size_t k = 0; k < n; ++k) {
      if (f[k] == 0.0) {
        brackets.emplace_back(lam[k], lam[k]);
      } else if (f[k + 1] != 0.0 && (f[k] < 0.0) != (f[k + 1] < 0.0)) {
        brackets.emplace_back(lam[k], lam[k + 1]);
      }
    }
    if (f[n] == 0.0) brackets.emplace_back(lam[n], lam[n]);
    return brackets;
  };

  double h = scan_step;
  auto brackets = scan(h);
  for (int round = 0; round < 6; ++round) {
    auto finer = scan(0.5 * h);
    h *= 0.5;
    const bool stable = finer.size() == brackets.size();
    brackets = std::move(finer);
    if (stable) break;
  }

  // The residual is positive as lambda -> -inf and L_0 >= 0, so L_c has at
  // most one eigenvalue below zero: a negative residual at the floor means
  // exactly one root below it, bracketed by doubling the floor.
  if (transcendental_residual(search_floor, spec) < 0.0) {
    double hi = search_floor, lo = 2.0 * search_floor - 1.0;
    for (;;) {
      const double f = transcendental_residual(lo, spec);
      if (f > 0.0) break;
      if (f == 0.0 || !std::isfinite(f) || lo < -kFloorLimit)
        throw ConvergenceError("point_spectrum: eigenvalue below the representable range");
      hi = lo;
      lo = 2.0 * lo;
    }
    brackets.insert(brackets.begin(), {lo, hi});
  }

  PointSpectrum ps;
  ps.search_floor = search_floor;
  ps.floor_residual = transcendental_residual(search_floor, spec);
  ps.scan_step = h;
  for (auto [lo, hi] : brackets) {
    double flo = transcendental_residual(lo, spec);
    while (hi > lo) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = transcendental_residual(mid, spec);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double fl = std::fabs(transcendental_residual(lo, spec));
    const double fh = std::fabs(transcendental_residual(hi, spec));
    const double root = (fh < fl) ? hi : lo;
    ps.eigenvalues.push_back(root);
    ps.residuals.push_back(std::min(fl, fh));
  }
  for (double lam : ps.eigenvalues) {
    const double g = eigenfunction_normalizer(spec, lam);
    ps.normalizers.push_back(g);
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = eigenfunction_value(spec, lam, g, grid.rho[i]);
    ps.samples.push_back(std::move(w));
  }
  return ps;
}

GeneralizedMode generalized_mode(const OperatorSpec& spec, double m) {
  if (!(m - 1.5 >= kThresholdGuard * (1.0 - 1e-9))) throw DomainError("generalized_mode: m inside the threshold guard band");
  GeneralizedMode g;
  g.m = m;
  g.sigma = std::sqrt((m - 1.5) * (m + 1.5));
  cplx p, dp;
  specialfn::legendre_p(spec.legendre_degree(), cplx(0.0, -g.sigma), x0_of(spec.geometry), x0m1_of(spec.geometry),
                        p, dp);
  const cplx d = (spec.bc == Boundary::Dirichlet) ? p : dp - spec.robin_x_constant() * p;
  g.phase = std::arg(d);
  g.amplitude = std::sqrt(2.0 * m / std::sinh(kPi * g.sigma));
  return g;
}

double generalized_value(const OperatorSpec& spec, const GeneralizedMode& mode, double rho) {
  cplx p, dp;
  legendre_at_rho(spec.legendre_degree(), cplx(0.0, -mode.sigma), rho, p, dp);
  const cplx rot = std::polar(1.0, -mode.phase) * p;
  return mode.amplitude * std::pow(std::sinh(rho), -1.5) * rot.imag();
}

std::vector<double> generalized_eigenfunction(const OperatorSpec& spec, double m, const std::vector<double>& rho) {
  const GeneralizedMode g = generalized_mode(spec, m);
  std::vector<double> out(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = generalized_value(spec, g, rho[i]);
  return out;
}

void upper_solution(const OperatorSpec& spec, double m, double y, cplx& phi, cplx& dphi) {
  const double sigma = std::sqrt((m - 1.5) * (m + 1.5));
  const double lambda = m * m;
  const cplx a = std::pow(4.0 * lambda - 9.0, -0.25) * specialfn::gamma_complex(cplx(1.0, -sigma));
  const double x = 1.0 / std::tanh(y);
  const double xm1 = xm1_from_y(y);
  cplx p, dp;
  specialfn::legendre_p(spec.legendre_degree(), cplx(0.0, -sigma), x, xm1, p, dp);
  phi = a * p;
  // dx/dy = -(x^2 - 1)
  dphi = -a * dp * (xm1 * (x + 1.0));
}

ContinuousGrid make_continuous_grid(double m_max, int order) {
  const double m_min = 1.5 + kThresholdGuard;
  if (!(m_max > m_min + 0.5)) throw std::invalid_argument("make_continuous_grid: m_max too small");
  const double s_lo = std::sqrt((m_min - 1.5) * (m_min + 1.5));
  const double s_hi = std::sqrt((m_max - 1.5) * (m_max + 1.5));
  std::vector<double> breaks{s_lo};
  double width = 0.05;
  while (breaks.back() < s_hi) {
    const double next = breaks.back() + width;
    breaks.push_back(next > s_hi - 0.25 * width ? s_hi : next);
    width = std::min(1.0, width * 1.5);
  }
  const quad::Composite q = quad::composite(breaks, order);
  ContinuousGrid cg;
  cg.m_max = m_max;
  // Threshold node at the guard edge. Below it S(m) w(rho; m^2) = sigma F(rho)
  // + O(sigma^3), so the band integral is that product at the edge times
  // (1/s_lo) int_0^{s_lo} sigma^2/m d sigma.
  cg.sigma.push_back(s_lo);
  cg.m.push_back(m_min);
  cg.weight.push_back(0.5 * (s_lo * m_min - 2.25 * std::asinh(s_lo / 1.5)) / s_lo);
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    const double s = q.x[i];
    const double m = std::sqrt(s * s + 2.25);
    cg.sigma.push_back(s);
    cg.m.push_back(m);
    cg.weight.push_back(q.w[i] * s / m);
  }
  return cg;
}

SpectralBasis build_basis(const OperatorSpec& spec, const BasisOptions& opt) {
  spec.validate();
  SpectralBasis b;
  b.spec = spec;
  b.grid = make_radial_grid(spec.geometry, opt.eps_fraction, opt.panel_width, opt.radial_order);
  const double floor = (opt.search_floor == 0.0) ? default_search_floor(spec.M) : opt.search_floor;
  b.point = point_spectrum(spec, b.grid, floor, opt.scan_step);
  b.continuous = make_continuous_grid(opt.m_max, opt.m_order);
  const std::size_t n = b.grid.size();
  b.w_cont.assign(b.continuous.m.size() * n, 0.0);
  parallel_for(b.continuous.m.size(), [&](std::size_t k) {
    const GeneralizedMode g = generalized_mode(spec, b.continuous.m[k]);
    for (std::size_t i = 0; i < n; ++i) b.w_cont[k * n + i] = generalized_value(spec, g, b.grid.rho[i]);
  });
  return b;
}

TowerCoefficients spectral_forward(const std::vector<cplx>& u, const SpectralBasis& basis) {
  const std::size_t n = basis.grid.size();
  if (u.size() != n) throw std::invalid_argument("spectral_forward: field does not match the radial grid");
  TowerCoefficients c;
  std::vector<cplx> ac(u);
  for (const auto& w : basis.point.samples) {
    cplx cj = 0.0;
    for (std::size_t i = 0; i < n; ++i) cj += basis.grid.h_weight[i] * u[i] * w[i];
    c.point.push_back(cj);
    for (std::size_t i = 0; i < n; ++i) ac[i] -= cj * w[i];
  }
  std::vector<cplx> wac(n);
  for (std::size_t i = 0; i < n; ++i) wac[i] = basis.grid.h_weight[i] * ac[i];
  const std::size_t nm = basis.continuous.m.size();
  c.continuous.resize(nm);
  for (std::size_t k = 0; k < nm; ++k) {
    const double* w = basis.column(k);
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += wac[i] * w[i];
    c.continuous[k] = s;
  }
  return c;
}

std::vector<cplx> spectral_inverse(const TowerCoefficients& coeffs, const SpectralBasis& basis) {
  const std::size_t n = basis.grid.size();
  if (coeffs.point.size() != basis.point.samples.size() || coeffs.continuous.size() != basis.continuous.m.size())
    throw std::invalid_argument("spectral_inverse: coefficient counts do not match the basis");
  std::vector<cplx> u(n, 0.0);
  for (std::size_t j = 0; j < coeffs.point.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) u[i] += coeffs.point[j] * basis.point.samples[j][i];
  for (std::size_t k = 0; k < coeffs.continuous.size(); ++k) {
    const cplx s = basis.continuous.weight[k] * coeffs.continuous[k];
    const double* w = basis.column(k);
    for (std::size_t i = 0; i < n; ++i) u[i] += s * w[i];
  }
  return u;
}

double coefficient_norm_sq(const TowerCoefficients& coeffs, const SpectralBasis& basis) {
  double acc = 0.0;
  for (const cplx& c : coeffs.point) acc += std::norm(c);
  for (std::size_t k = 0; k < coeffs.continuous.size(); ++k)
    acc += basis.continuous.weight[k] * std::norm(coeffs.continuous[k]);
  return acc;
}

double truncation_tail(const TowerCoefficients& coeffs, const SpectralBasis& basis) {
  double acc = 0.0;
  for (std::size_t k = 0; k < coeffs.continuous.size(); ++k)
    if (basis.continuous.m[k] > basis.continuous.m_max - 5.0)
      acc += basis.continuous.weight[k] * std::norm(coeffs.continuous[k]);
  return acc;
}

H1Equivalence h1_equivalence_check(const std::vector<cplx>& u, const std::vector<cplx>& du_drho,
                                   const SpectralBasis& basis) {
  const RadialGrid& g = basis.grid;
  if (du_drho.size() != g.size()) throw std::invalid_argument("h1_equivalence_check: derivative size mismatch");
  H1Equivalence r;
  r.a = 10.0 + (basis.point.eigenvalues.empty() ? 0.0 : std::fabs(basis.point.eigenvalues.front()));
  for (std::size_t i = 0; i < g.size(); ++i)
    r.h1_norm_sq += g.h_weight[i] * (r.a * std::norm(u[i]) + sqr(g.sinh_rho[i]) * std::norm(du_drho[i]));
  const TowerCoefficients c = spectral_forward(u, basis);
  for (std::size_t j = 0; j < c.point.size(); ++j) r.spectral_side += (r.a + basis.point.eigenvalues[j]) * std::norm(c.point[j]);
  for (std::size_t k = 0; k < c.continuous.size(); ++k)
    r.spectral_side +=
        basis.continuous.weight[k] * (r.a + sqr(basis.continuous.m[k])) * std::norm(c.continuous[k]);
  r.ratio = r.spectral_side / r.h1_norm_sq;
  return r;
}

void write_basis(const std::string& path, const SpectralBasis& b) {
  Table t;
  auto& h = t.header;
  h["kind"] = "spectral_basis";
  h["alpha"] = b.spec.geometry.alpha;
  h["M"] = b.spec.M;
  h["bc"] = (b.spec.bc == Boundary::Dirichlet) ? "dirichlet" : "robin";
  h["c"] = b.spec.c;
  h["eps_fraction"] = b.grid.eps_fraction;
  h["y_breaks"] = b.grid.y.breaks;
  h["y_order"] = b.grid.y.order;
  h["eigenvalues"] = b.point.eigenvalues;
  h["residuals"] = b.point.residuals;
  h["normalizers"] = b.point.normalizers;
  h["search_floor"] = b.point.search_floor;
  h["floor_residual"] = b.point.floor_residual;
  h["scan_step"] = b.point.scan_step;
  h["m_max"] = b.continuous.m_max;
  h["sigma"] = b.continuous.sigma;
  h["m"] = b.continuous.m;
  h["m_weight"] = b.continuous.weight;
  t.columns = {"y", "y_weight", "rho", "sinh_rho", "h_weight"};
  for (std::size_t j = 0; j < b.point.samples.size(); ++j) t.columns.push_back("point_" + std::to_string(j));
  for (std::size_t k = 0; k < b.continuous.m.size(); ++k) t.columns.push_back("cont_" + std::to_string(k));
  const std::size_t n = b.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row{b.grid.y.x[i], b.grid.y.w[i], b.grid.rho[i], b.grid.sinh_rho[i], b.grid.h_weight[i]};
    for (const auto& w : b.point.samples) row.push_back(w[i]);
    for (std::size_t k = 0; k < b.continuous.m.size(); ++k) row.push_back(b.w_cont[k * n + i]);
    t.add_row(std::move(row));
  }
  write_table(path, t);
}

SpectralBasis read_basis(const std::string& path) {
  const Table t = read_table(path);
  const auto& h = t.header;
  if (h.value("kind", "") != "spectral_basis") throw std::runtime_error("read_basis: not a basis table");
  SpectralBasis b;
  const double alpha = h.at("alpha").get<double>();
  const double M = h.at("M").get<double>();
  b.spec = (h.at("bc").get<std::string>() == "dirichlet") ? OperatorSpec::dirichlet(alpha, M)
                                                           : OperatorSpec::robin(alpha, M, h.at("c").get<double>());
  b.grid.eps_fraction = h.at("eps_fraction").get<double>();
  b.grid.y.breaks = h.at("y_breaks").get<std::vector<double>>();
  b.grid.y.order = h.at("y_order").get<int>();
  b.grid.y.x = t.column("y");
  b.grid.y.w = t.column("y_weight");
  b.grid.rho = t.column("rho");
  b.grid.sinh_rho = t.column("sinh_rho");
  b.grid.h_weight = t.column("h_weight");
  b.point.eigenvalues = h.at("eigenvalues").get<std::vector<double>>();
  b.point.residuals = h.at("residuals").get<std::vector<double>>();
  b.point.normalizers = h.at("normalizers").get<std::vector<double>>();
  b.point.search_floor = h.at("search_floor").get<double>();
  b.point.floor_residual = h.at("floor_residual").get<double>();
  b.point.scan_step = h.at("scan_step").get<double>();
  for (std::size_t j = 0; j < b.point.eigenvalues.size(); ++j) b.point.samples.push_back(t.column("point_" + std::to_string(j)));
  b.continuous.m_max = h.at("m_max").get<double>();
  b.continuous.sigma = h.at("sigma").get<std::vector<double>>();
  b.continuous.m = h.at("m").get<std::vector<double>>();
  b.continuous.weight = h.at("m_weight").get<std::vector<double>>();
  const std::size_t n = b.grid.size();
  b.w_cont.resize(b.continuous.m.size() * n);
  for (std::size_t k = 0; k < b.continuous.m.size(); ++k) {
    const auto col = t.column("cont_" + std::to_string(k));
    std::copy(col.begin(), col.end(), b.w_cont.begin() + static_cast<std::ptrdiff_t>(k * n));
  }
  return b;
}

}  // namespace branewave::spectrum
