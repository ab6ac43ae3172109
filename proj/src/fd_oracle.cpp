#include "branewave/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "branewave/kk_tower.hpp"

namespace branewave::fd {

namespace {

double sqr(double v) { return v * v; }

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const cplx& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Growth of max |v| beyond this factor of its initial size aborts a run.
constexpr double kGrowthLimit = 1e12;

}  // namespace

void FdConfig::validate(const spectrum::OperatorSpec& spec) const {
  spec.validate();
  const double rho0 = spec.geometry.rho0;
  if (!(rho_min > 0.0 && rho_min < rho0)) throw std::invalid_argument("fd config: rho_min must lie in (0, rho0)");
  if (n_rho < 8) throw std::invalid_argument("fd config: n_rho must be at least 8");
  if (scheme_order != 2) throw std::invalid_argument("fd config: only scheme_order = 2 is implemented");
  if (!(safety > 0.0 && safety <= 0.9)) throw std::invalid_argument("fd config: safety must lie in (0, 0.9]");
  if (!(dt >= 0.0) || dt > max_stable_dt(spec, *this))
    throw std::invalid_argument("fd config: dt exceeds the stability bound safety * h / sinh(rho0)");
}

double max_stable_dt(const spectrum::OperatorSpec& spec, const FdConfig& cfg) {
  const double h = (spec.geometry.rho0 - cfg.rho_min) / static_cast<double>(cfg.n_rho - 1);
  return cfg.safety * h / std::sinh(spec.geometry.rho0);
}

FdGrid make_fd_grid(const spectrum::OperatorSpec& spec, const FdConfig& cfg) {
  cfg.validate(spec);
  FdGrid g;
  const std::size_t n = cfg.n_rho;
  const double rho0 = spec.geometry.rho0;
  g.h = (rho0 - cfg.rho_min) / static_cast<double>(n - 1);
  g.rho.resize(n);
  g.mass.resize(n);
  g.sinh2.resize(n);
  g.flux.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    g.rho[i] = (i + 1 == n) ? rho0 : cfg.rho_min + g.h * static_cast<double>(i);
    g.sinh2[i] = sqr(std::sinh(g.rho[i]));
    g.mass[i] = g.sinh2[i] * g.h * ((i == 0 || i + 1 == n) ? 0.5 : 1.0);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) g.flux[i] = std::pow(std::sinh(0.5 * (g.rho[i] + g.rho[i + 1])), 4) / g.h;
  g.dirichlet = spec.bc == spectrum::Boundary::Dirichlet;
  g.boundary = g.dirichlet ? 0.0 : spec.c * std::pow(std::sinh(rho0), 4);
  return g;
}

std::vector<cplx> apply_operator(const FdGrid& g, const spectrum::OperatorSpec& spec, const std::vector<cplx>& u) {
  const std::size_t n = g.rho.size();
  if (u.size() != n) throw std::invalid_argument("apply_operator: size mismatch");
  std::vector<cplx> out(n, 0.0);
  const double m2 = sqr(spec.M);
  for (std::size_t i = 0; i < n; ++i) {
    cplx div = 0.0;  // F_{i+1/2} - F_{i-1/2}
    if (i + 1 < n) div += g.flux[i] * (u[i + 1] - u[i]);
    if (i > 0) div -= g.flux[i - 1] * (u[i] - u[i - 1]);
    if (i + 1 == n) div -= g.boundary * u[i];
    out[i] = -div / g.mass[i] + m2 * g.sinh2[i] * u[i];
  }
  if (g.dirichlet) out[n - 1] = 0.0;
  return out;
}

FdState make_fd_state(const FdGrid& g, double tau, const RadialData& u0, const RadialData& u1) {
  FdState s;
  s.rho = g.rho;
  s.tau = tau;
  s.u.resize(g.rho.size());
  s.ut.resize(g.rho.size());
  for (std::size_t i = 0; i < g.rho.size(); ++i) {
    s.u[i] = u0(g.rho[i]);
    s.ut[i] = u1(g.rho[i]);
  }
  if (g.dirichlet) s.u.back() = s.ut.back() = 0.0;
  return s;
}

FdSolver::FdSolver(const spectrum::OperatorSpec& spec, const FdConfig& cfg, double xi, const FdState& init, double dt)
    : spec_(spec), grid_(make_fd_grid(spec, cfg)), xi_(xi), dt_(dt), tau_(init.tau) {
  if (!(dt > 0.0)) throw std::invalid_argument("FdSolver: dt must be positive");
  if (!(dt <= max_stable_dt(spec, cfg) * (1.0 + 1e-12)))
    throw std::invalid_argument("FdSolver: dt exceeds the stability bound");
  if (init.u.size() != grid_.rho.size() || init.ut.size() != grid_.rho.size())
    throw std::invalid_argument("FdSolver: state does not match the grid");
  const double e = std::exp(1.5 * init.tau);
  const std::size_t n = grid_.rho.size();
  std::vector<cplx> v0(n), dv0(n);
  for (std::size_t i = 0; i < n; ++i) {
    v0[i] = e * init.u[i];
    dv0[i] = e * (init.ut[i] + 1.5 * init.u[i]);
  }
  // Taylor start: v(dt) = v + dt v' + dt^2/2 v''; v_prev is then the
  // reflected value so that state() at step 0 reproduces the data.
  const auto a0 = accel(v0, init.tau);
  v_prev_.resize(n);
  v_cur_ = v0;
  for (std::size_t i = 0; i < n; ++i) v_prev_[i] = v0[i] - dt * dv0[i] + 0.5 * dt * dt * a0[i];
  limit_ = kGrowthLimit * std::max({max_abs(v0), dt * max_abs(dv0), 1e-300});
}

std::vector<cplx> FdSolver::accel(const std::vector<cplx>& v, double tau) const {
  auto out = apply_operator(grid_, spec_, v);
  const double shift = std::exp(-2.0 * tau) * xi_ * xi_ - 2.25;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = -(out[i] + shift * v[i]);
  if (grid_.dirichlet) out.back() = 0.0;
  return out;
}

void FdSolver::step() {
  const auto a = accel(v_cur_, tau_);
  const double dt2 = dt_ * dt_;
  for (std::size_t i = 0; i < v_cur_.size(); ++i) {
    const cplx next = 2.0 * v_cur_[i] - v_prev_[i] + dt2 * a[i];
    v_prev_[i] = v_cur_[i];
    v_cur_[i] = next;
  }
  tau_ += dt_;
  const double m = max_abs(v_cur_);
  if (!std::isfinite(m) || m > limit_)
    throw ConvergenceError("FdSolver: solution grew beyond the stability limit at tau = " + std::to_string(tau_));
}

FdState FdSolver::state() const {
  const auto a = accel(v_cur_, tau_);
  const double dt2 = dt_ * dt_;
  const double e = std::exp(-1.5 * tau_);
  FdState s;
  s.rho = grid_.rho;
  s.tau = tau_;
  s.u.resize(v_cur_.size());
  s.ut.resize(v_cur_.size());
  for (std::size_t i = 0; i < v_cur_.size(); ++i) {
    const cplx next = 2.0 * v_cur_[i] - v_prev_[i] + dt2 * a[i];
    const cplx dv = (next - v_prev_[i]) / (2.0 * dt_);
    s.u[i] = e * v_cur_[i];
    s.ut[i] = e * dv - 1.5 * s.u[i];
  }
  return s;
}

FdRun run(const spectrum::OperatorSpec& spec, const FdConfig& cfg, double xi, const FdState& init, double tau_end,
          std::size_t stride) {
  cfg.validate(spec);
  if (!(tau_end > init.tau)) throw std::invalid_argument("fd run: tau_end must exceed the initial tau");
  const double dt_max = cfg.dt > 0.0 ? cfg.dt : max_stable_dt(spec, cfg);
  FdRun r;
  r.steps = static_cast<std::size_t>(std::ceil((tau_end - init.tau) / dt_max));
  r.dt = (tau_end - init.tau) / static_cast<double>(r.steps);
  FdSolver solver(spec, cfg, xi, init, r.dt);
  r.history.push_back(solver.state());
  for (std::size_t k = 1; k <= r.steps; ++k) {
    solver.step();
    if (k == r.steps || (stride > 0 && k % stride == 0)) r.history.push_back(solver.state());
  }
  r.history.back().tau = tau_end;
  return r;
}

double discrete_energy(const FdGrid& g, const spectrum::OperatorSpec& spec, double xi, const FdState& s) {
  const auto lu = apply_operator(g, spec, s.u);
  const double k2 = std::exp(-2.0 * s.tau) * xi * xi;
  double e = 0.0;
  for (std::size_t i = 0; i < g.rho.size(); ++i)
    e += g.mass[i] * (std::norm(s.ut[i]) + k2 * std::norm(s.u[i]) + (lu[i] * std::conj(s.u[i])).real());
  return e;
}

EnergyAudit energy_audit(const FdRun& r, const spectrum::OperatorSpec& spec, const FdConfig& cfg, double xi) {
  if (r.history.size() != r.steps + 1)
    throw std::invalid_argument("energy_audit: the history must hold every step (stride 1)");
  const FdGrid g = make_fd_grid(spec, cfg);
  std::vector<double> e(r.history.size());
  for (std::size_t n = 0; n < e.size(); ++n) e[n] = discrete_energy(g, spec, xi, r.history[n]);
  EnergyAudit a;
  for (double v : e) a.scale = std::max(a.scale, std::fabs(v));
  for (std::size_t n = 0; n + 1 < e.size(); ++n) a.max_increase = std::max(a.max_increase, e[n + 1] - e[n]);
  for (std::size_t n = 1; n + 1 < e.size(); ++n) {
    const FdState& s = r.history[n];
    AuditSample q;
    q.tau = s.tau;
    q.energy = e[n];
    q.boundary_energy = g.boundary * std::norm(s.u.back());
    q.rate = (e[n + 1] - e[n - 1]) / (2.0 * r.dt);
    const double k2 = std::exp(-2.0 * s.tau) * xi * xi;
    for (std::size_t i = 0; i < g.rho.size(); ++i)
      q.dissipation -= g.mass[i] * (6.0 * std::norm(s.ut[i]) + 2.0 * k2 * std::norm(s.u[i]));
    q.residual = q.rate - q.dissipation;
    a.max_residual = std::max(a.max_residual, std::fabs(q.residual));
    a.samples.push_back(q);
  }
  return a;
}

Comparison compare_with_spectral(const FdState& fd, const FdGrid& g, const spectrum::RadialGrid& rg,
                                 const std::vector<cplx>& spectral_u) {
  if (spectral_u.size() != rg.size()) throw std::invalid_argument("compare_with_spectral: spectral size mismatch");
  if (fd.u.size() != g.rho.size()) throw std::invalid_argument("compare_with_spectral: fd size mismatch");
  std::vector<double> re(rg.size()), im(rg.size());
  for (std::size_t i = 0; i < rg.size(); ++i) {
    re[i] = spectral_u[i].real();
    im[i] = spectral_u[i].imag();
  }
  const double rho_lo = rg.rho.back();
  double err = 0.0, ref = 0.0;
  Comparison c;
  for (std::size_t i = 0; i < g.rho.size(); ++i) {
    if (g.rho[i] < rho_lo) continue;
    const double y = spectrum::y_from_rho(g.rho[i]);
    const cplx s(quad::interpolate(rg.y, re, y), quad::interpolate(rg.y, im, y));
    err += g.mass[i] * std::norm(fd.u[i] - s);
    ref += g.mass[i] * std::norm(s);
    ++c.nodes;
  }
  c.reference_norm = std::sqrt(ref);
  c.relative_error = ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
  return c;
}

std::vector<cplx> spectral_solution(const spectrum::SpectralBasis& basis, double xi, double tau_star, double tau_end,
                                    const RadialData& u0, const RadialData& u1) {
  modes::RadialQuadrature q;
  q.xi = {xi};
  q.weight = {1.0};
  const tower::BulkState s = tower::make_state(
      q, basis.grid, tau_star, [&](double, double rho) { return u0(rho); }, [&](double, double rho) { return u1(rho); });
  const auto c = tower::evolve_tower(tower::decompose(s, basis), basis, tau_end);
  return tower::reconstruct(c, basis).u;
}

ConvergenceStudy convergence_study(const spectrum::SpectralBasis& basis, const FdConfig& cfg, double xi,
                                   double tau_star, double tau_end, const RadialData& u0, const RadialData& u1,
                                   int levels) {
  if (levels < 2) throw std::invalid_argument("convergence_study: need at least two levels");
  const auto ref = spectral_solution(basis, xi, tau_star, tau_end, u0, u1);
  ConvergenceStudy st;
  FdConfig c = cfg;
  for (int k = 0; k < levels; ++k) {
    const FdGrid g = make_fd_grid(basis.spec, c);
    const FdRun r = run(basis.spec, c, xi, make_fd_state(g, tau_star, u0, u1), tau_end);
    st.n_rho.push_back(c.n_rho);
    st.error.push_back(compare_with_spectral(r.history.back(), g, basis.grid, ref).relative_error);
    if (k > 0) st.order.push_back(std::log2(st.error[k - 1] / st.error[k]));
    c.n_rho = 2 * c.n_rho - 1;
    if (c.dt > 0.0) c.dt *= 0.5;
  }
  return st;
}

void write_history(const std::string& path, const FdRun& r, const nlohmann::json& meta) {
  Table t;
  t.header = meta;
  t.header["dt"] = r.dt;
  t.header["steps"] = r.steps;
  t.columns = {"tau", "rho", "u_re", "u_im", "ut_re", "ut_im"};
  for (const FdState& s : r.history)
    for (std::size_t i = 0; i < s.rho.size(); ++i)
      t.add_row({s.tau, s.rho[i], s.u[i].real(), s.u[i].imag(), s.ut[i].real(), s.ut[i].imag()});
  write_table(path, t);
}

}  // namespace branewave::fd
