#include "branewave/kk_tower.hpp"

#include <cmath>
#include <stdexcept>

#include "branewave/parallel.hpp"

namespace branewave::tower {

namespace {

double sqr(double v) { return v * v; }

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::vector<cplx> row_of(const std::vector<cplx>& f, std::size_t k, std::size_t n) {
  return std::vector<cplx>(f.begin() + static_cast<std::ptrdiff_t>(k * n),
                           f.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
}

void check_grid(const BulkState& s, const spectrum::RadialGrid& grid, const char* who) {
  if (s.cols() != grid.size()) throw std::invalid_argument(std::string(who) + ": state does not match the radial grid");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (s.rho[i] != grid.rho[i]) throw std::invalid_argument(std::string(who) + ": rho nodes differ from the basis grid");
}

modes::SpectralField empty_field(const std::vector<double>& xi, double tau) {
  modes::SpectralField f;
  f.xi_grid = xi;
  f.u_hat.assign(xi.size(), 0.0);
  f.ut_hat.assign(xi.size(), 0.0);
  f.tau = tau;
  return f;
}

// u(rho0) by the interpolant of the first y panel at y0.
cplx boundary_value(const spectrum::RadialGrid& grid, const std::vector<cplx>& row) {
  std::vector<double> re(row.size()), im(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) {
    re[i] = row[i].real();
    im[i] = row[i].imag();
  }
  const double y0 = grid.y.breaks.front();
  return {quad::interpolate(grid.y, re, y0), quad::interpolate(grid.y, im, y0)};
}

double weighted_row(const BulkState& s, const std::vector<double>& radial_weight, const std::vector<cplx>& f,
                    double xi_power) {
  const std::size_t n = s.cols();
  double acc = 0.0;
  for (std::size_t k = 0; k < s.rows(); ++k) {
    double row = 0.0;
    for (std::size_t i = 0; i < n; ++i) row += radial_weight[i] * std::norm(f[k * n + i]);
    acc += s.xi_weight[k] * std::pow(s.xi[k], xi_power) * row;
  }
  return acc;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

void BulkState::validate() const {
  if (xi.size() != xi_weight.size()) throw std::invalid_argument("BulkState: xi weights do not match the xi grid");
  if (u.size() != rows() * cols() || ut.size() != u.size())
    throw std::invalid_argument("BulkState: sample arrays do not match the grids");
  for (std::size_t k = 0; k < xi.size(); ++k) {
    if (!std::isfinite(xi[k]) || xi[k] < 0.0 || (k > 0 && !(xi[k] > xi[k - 1])))
      throw std::invalid_argument("BulkState: xi grid must be nonnegative and strictly increasing");
    if (!std::isfinite(xi_weight[k])) throw std::invalid_argument("BulkState: non-finite xi weight");
  }
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (!(rho[i] > 0.0) || !std::isfinite(rho[i]) || (i > 0 && !(rho[i] < rho[i - 1])))
      throw std::invalid_argument("BulkState: rho grid must follow the y grid, positive and decreasing");
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!finite(u[i]) || !finite(ut[i])) throw std::invalid_argument("BulkState: non-finite sample");
  if (!std::isfinite(tau)) throw std::invalid_argument("BulkState: non-finite tau");
}

BulkState make_state(const modes::RadialQuadrature& q, const spectrum::RadialGrid& grid, double tau,
                     const BulkProfile& u0, const BulkProfile& u1) {
  BulkState s;
  s.xi = q.xi;
  s.xi_weight = q.weight;
  s.rho = grid.rho;
  s.tau = tau;
  const std::size_t n = grid.size();
  s.u.resize(s.rows() * n);
  s.ut.resize(s.rows() * n);
  for (std::size_t k = 0; k < s.rows(); ++k)
    for (std::size_t i = 0; i < n; ++i) {
      s.u[k * n + i] = u0(s.xi[k], s.rho[i]);
      s.ut[k * n + i] = u1(s.xi[k], s.rho[i]);
    }
  s.validate();
  return s;
}

TowerCoefficients decompose(const BulkState& state, const spectrum::SpectralBasis& basis) {
  state.validate();
  check_grid(state, basis.grid, "decompose");
  const std::size_t n = state.cols();
  const std::size_t np = basis.point.eigenvalues.size();
  const std::size_t nm = basis.continuous.m.size();
  TowerCoefficients c;
  c.xi = state.xi;
  c.xi_weight = state.xi_weight;
  c.tau = state.tau;
  c.point.assign(np, empty_field(state.xi, state.tau));
  c.continuous.assign(nm, empty_field(state.xi, state.tau));
  parallel_for(state.rows(), [&](std::size_t k) {
    const auto fu = spectrum::spectral_forward(row_of(state.u, k, n), basis);
    const auto ft = spectrum::spectral_forward(row_of(state.ut, k, n), basis);
    for (std::size_t j = 0; j < np; ++j) {
      c.point[j].u_hat[k] = fu.point[j];
      c.point[j].ut_hat[k] = ft.point[j];
    }
    for (std::size_t m = 0; m < nm; ++m) {
      c.continuous[m].u_hat[k] = fu.continuous[m];
      c.continuous[m].ut_hat[k] = ft.continuous[m];
    }
  });
  return c;
}

TowerCoefficients evolve_tower(const TowerCoefficients& coeffs, const spectrum::SpectralBasis& basis, double tau) {
  const std::size_t np = basis.point.eigenvalues.size();
  const std::size_t nm = basis.continuous.m.size();
  if (coeffs.point.size() != np || coeffs.continuous.size() != nm)
    throw std::invalid_argument("evolve_tower: coefficients do not match the basis");
  TowerCoefficients out;
  out.xi = coeffs.xi;
  out.xi_weight = coeffs.xi_weight;
  out.tau = tau;
  out.point.resize(np);
  out.continuous.resize(nm);
  parallel_for(np + nm, [&](std::size_t idx) {
    if (idx < np) {
      out.point[idx] = modes::evolve(coeffs.point[idx], modes::ModeParams::from_kappa(basis.point.eigenvalues[idx]), tau);
    } else {
      const std::size_t m = idx - np;
      out.continuous[m] =
          modes::evolve(coeffs.continuous[m], modes::ModeParams::from_kappa(sqr(basis.continuous.m[m])), tau);
    }
  });
  return out;
}

BulkState reconstruct(const TowerCoefficients& coeffs, const spectrum::SpectralBasis& basis) {
  const std::size_t np = basis.point.eigenvalues.size();
  const std::size_t nm = basis.continuous.m.size();
  if (coeffs.point.size() != np || coeffs.continuous.size() != nm)
    throw std::invalid_argument("reconstruct: coefficients do not match the basis");
  const std::size_t n = basis.grid.size();
  BulkState s;
  s.xi = coeffs.xi;
  s.xi_weight = coeffs.xi_weight;
  s.rho = basis.grid.rho;
  s.tau = coeffs.tau;
  s.u.resize(s.rows() * n);
  s.ut.resize(s.rows() * n);
  parallel_for(s.rows(), [&](std::size_t k) {
    spectrum::TowerCoefficients cu, ct;
    cu.point.resize(np);
    ct.point.resize(np);
    cu.continuous.resize(nm);
    ct.continuous.resize(nm);
    for (std::size_t j = 0; j < np; ++j) {
      cu.point[j] = coeffs.point[j].u_hat[k];
      ct.point[j] = coeffs.point[j].ut_hat[k];
    }
    for (std::size_t m = 0; m < nm; ++m) {
      cu.continuous[m] = coeffs.continuous[m].u_hat[k];
      ct.continuous[m] = coeffs.continuous[m].ut_hat[k];
    }
    const auto u = spectrum::spectral_inverse(cu, basis);
    const auto ut = spectrum::spectral_inverse(ct, basis);
    std::copy(u.begin(), u.end(), s.u.begin() + static_cast<std::ptrdiff_t>(k * n));
    std::copy(ut.begin(), ut.end(), s.ut.begin() + static_cast<std::ptrdiff_t>(k * n));
  });
  s.validate();
  return s;
}

double x0_norm_sq(const BulkState& s, const spectrum::RadialGrid& grid, const std::vector<cplx>& field) {
  check_grid(s, grid, "x0_norm_sq");
  if (field.size() != s.rows() * s.cols()) throw std::invalid_argument("x0_norm_sq: field size");
  return weighted_row(s, grid.h_weight, field, 0.0);
}

double x1_norm_sq(const BulkState& s, const spectrum::RadialGrid& grid, const std::vector<cplx>& field) {
  check_grid(s, grid, "x1_norm_sq");
  if (field.size() != s.rows() * s.cols()) throw std::invalid_argument("x1_norm_sq: field size");
  const std::size_t n = s.cols();
  std::vector<cplx> d(field.size());
  for (std::size_t k = 0; k < s.rows(); ++k) {
    const auto dk = spectrum::derivative_rho(grid, row_of(field, k, n));
    for (std::size_t i = 0; i < n; ++i) d[k * n + i] = grid.sinh_rho[i] * dk[i];
  }
  return weighted_row(s, grid.h_weight, field, 0.0) + weighted_row(s, grid.h_weight, field, 2.0) +
         weighted_row(s, grid.h_weight, d, 0.0);
}

double bulk_energy(const BulkState& s, const spectrum::SpectralBasis& basis) {
  s.validate();
  const spectrum::RadialGrid& grid = basis.grid;
  check_grid(s, grid, "bulk_energy");
  const auto& spec = basis.spec;
  const std::size_t n = s.cols();
  const double decay = std::exp(-2.0 * s.tau);
  const double s0 = std::sinh(spec.geometry.rho0);
  const double boundary = spec.bc == spectrum::Boundary::Robin ? spec.c * std::pow(s0, 4) : 0.0;
  std::vector<double> rows(s.rows(), 0.0);
  parallel_for(s.rows(), [&](std::size_t k) {
    const auto u = row_of(s.u, k, n);
    const auto du = spectrum::derivative_rho(grid, u);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sh2 = sqr(grid.sinh_rho[i]);
      acc += grid.h_weight[i] * (std::norm(s.ut[k * n + i]) + decay * sqr(s.xi[k]) * std::norm(u[i]) +
                                 sh2 * std::norm(du[i]) + sqr(spec.M) * sh2 * std::norm(u[i]));
    }
    if (boundary != 0.0) acc += boundary * std::norm(boundary_value(grid, u));
    rows[k] = s.xi_weight[k] * acc;
  });
  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

EnergyReport energy_report(const BulkState& state, const TowerCoefficients& coeffs,
                           const spectrum::SpectralBasis& basis) {
  EnergyReport r;
  r.total = bulk_energy(state, basis);
  const std::size_t np = basis.point.eigenvalues.size();
  const std::size_t nm = basis.continuous.m.size();
  if (coeffs.point.size() != np || coeffs.continuous.size() != nm)
    throw std::invalid_argument("energy_report: coefficients do not match the basis");
  for (std::size_t j = 0; j < np; ++j)
    r.per_mode.push_back(
        modes::energy(coeffs.point[j], modes::ModeParams::from_kappa(basis.point.eigenvalues[j]), coeffs.xi_weight).value);
  std::vector<double> cont(nm, 0.0);
  parallel_for(nm, [&](std::size_t m) {
    cont[m] = basis.continuous.weight[m] *
              modes::energy(coeffs.continuous[m], modes::ModeParams::from_kappa(sqr(basis.continuous.m[m])),
                            coeffs.xi_weight)
                  .value;
  });
  double integral = 0.0;
  for (std::size_t m = 0; m < nm; ++m) {
    integral += cont[m];
    if (basis.continuous.m[m] > basis.continuous.m_max - 5.0) r.tail += cont[m];
  }
  r.per_mode.push_back(integral);
  for (double e : r.per_mode) r.mode_sum += e;
  r.discrepancy = std::fabs(r.total - r.mode_sum);
  return r;
}

double tower_h1_size(const TowerCoefficients& coeffs, const spectrum::SpectralBasis& basis) {
  auto mode_h1 = [&](const modes::SpectralField& f, double kappa) {
    double acc = 0.0;
    for (std::size_t k = 0; k < f.xi_grid.size(); ++k)
      acc += coeffs.xi_weight[k] *
             (std::norm(f.ut_hat[k]) + (1.0 + sqr(f.xi_grid[k]) + std::fabs(kappa)) * std::norm(f.u_hat[k]));
    return acc;
  };
  double total = 0.0;
  for (std::size_t j = 0; j < coeffs.point.size(); ++j) total += mode_h1(coeffs.point[j], basis.point.eigenvalues[j]);
  for (std::size_t m = 0; m < coeffs.continuous.size(); ++m)
    total += basis.continuous.weight[m] * mode_h1(coeffs.continuous[m], sqr(basis.continuous.m[m]));
  return total;
}

modes::SpectralField graviton_extract(const BulkState& state, const spectrum::SpectralBasis& basis) {
  const auto& spec = basis.spec;
  if (spec.M != 0.0 || spec.bc != spectrum::Boundary::Robin || spec.c != 0.0)
    throw std::invalid_argument("graviton_extract: requires M = 0 and c = 0 with the Robin condition");
  state.validate();
  check_grid(state, basis.grid, "graviton_extract");
  const std::size_t n = state.cols();
  const double g2 = sqr(spec.geometry.gamma);
  modes::SpectralField phi = empty_field(state.xi, state.tau);
  for (std::size_t k = 0; k < state.rows(); ++k) {
    cplx a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a += basis.grid.h_weight[i] * state.u[k * n + i];
      b += basis.grid.h_weight[i] * state.ut[k * n + i];
    }
    phi.u_hat[k] = g2 * a;
    phi.ut_hat[k] = g2 * b;
  }
  return phi;
}

std::vector<double> default_schedule(double tau_star, double span, int points) {
  if (points < 2 || !(span > 0.0)) throw std::invalid_argument("default_schedule: need span > 0 and points >= 2");
  std::vector<double> taus(static_cast<std::size_t>(points));
  const double base = span + 1.0;
  for (int k = 0; k < points; ++k)
    taus[static_cast<std::size_t>(k)] = tau_star + std::pow(base, static_cast<double>(k) / (points - 1)) - 1.0;
  return taus;
}

std::vector<ResidualSample> graviton_residual(const BulkState& init, const spectrum::SpectralBasis& basis,
                                              const std::vector<double>& taus) {
  graviton_extract(init, basis);  // rejects operators without a graviton
  const TowerCoefficients c0 = decompose(init, basis);
  std::vector<ResidualSample> out;
  for (double tau : taus) {
    const TowerCoefficients ct = evolve_tower(c0, basis, tau);
    const BulkState full = reconstruct(ct, basis);
    // u - u_phi: the tower without its lambda = 0 term, which is the graviton.
    TowerCoefficients rest = ct;
    for (std::size_t j = 0; j < rest.point.size(); ++j)
      if (basis.point.eigenvalues[j] == 0.0) rest.point[j] = empty_field(ct.xi, tau);
    const BulkState diff = reconstruct(rest, basis);
    ResidualSample r;
    r.tau = tau;
    r.residual = std::sqrt(x1_norm_sq(diff, basis.grid, diff.u)) + std::sqrt(x0_norm_sq(full, basis.grid, full.ut));
    std::vector<cplx> combo(diff.u.size());
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = diff.ut[i] + 1.5 * diff.u[i];
    r.dekaa_scaled = std::exp(1.5 * tau) * std::sqrt(x0_norm_sq(diff, basis.grid, combo));
    out.push_back(r);
  }
  return out;
}

modes::SpectralField brane_trace_profile(const modes::SpectralField& phi_init) {
  return modes::profile_phi(phi_init, modes::ModeParams::from_kappa(0.0));
}

HorizonFit horizon_energy(const std::vector<BulkState>& history, const spectrum::SpectralBasis& basis) {
  if (history.size() < 2) throw std::invalid_argument("horizon_energy: need at least two states");
  const spectrum::RadialGrid& grid = basis.grid;
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = grid.h_weight[i] / std::tanh(grid.rho[i]);
  HorizonFit fit;
  for (const BulkState& s : history) {
    check_grid(s, grid, "horizon_energy");
    fit.taus.push_back(s.tau);
    fit.t.push_back(spectrum::brane_time(basis.spec.geometry, s.tau));
    fit.energy.push_back(std::exp(2.0 * s.tau) * weighted_row(s, w, s.u, 2.0));
  }
  const modes::SpectralField phi = brane_trace_profile(graviton_extract(history.front(), basis));
  double g2 = 0.0;
  for (std::size_t k = 0; k < phi.xi_grid.size(); ++k)
    g2 += history.front().xi_weight[k] * sqr(phi.xi_grid[k]) * std::norm(phi.u_hat[k]);
  fit.phi_norm = std::sqrt(g2);
  const double ref = std::sqrt(weighted_row(history.front(), grid.h_weight, history.front().u, 2.0));
  fit.phi_zero = !(fit.phi_norm >= 1e-10 * ref) || ref == 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < fit.t.size(); ++i)
    if (fit.energy[i] > 0.0) {
      lx.push_back(std::log(std::fabs(fit.t[i])));
      ly.push_back(std::log(fit.energy[i]));
    }
  fit.exponent = lx.size() >= 2 ? least_squares_slope(lx, ly) : 0.0;
  return fit;
}

void write_state(const std::string& path, const BulkState& s, const nlohmann::json& meta) {
  s.validate();
  Table t;
  t.header = meta;
  t.header["tau"] = s.tau;
  t.header["xi"] = s.xi;
  t.header["xi_weight"] = s.xi_weight;
  t.header["rho"] = s.rho;
  t.columns = {"xi", "rho", "u_re", "u_im", "ut_re", "ut_im"};
  const std::size_t n = s.cols();
  for (std::size_t k = 0; k < s.rows(); ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const cplx u = s.u[k * n + i], ut = s.ut[k * n + i];
      t.add_row({s.xi[k], s.rho[i], u.real(), u.imag(), ut.real(), ut.imag()});
    }
  write_table(path, t);
}

}  // namespace branewave::tower
