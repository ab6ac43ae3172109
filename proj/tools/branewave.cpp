// Batch front-end. Exit 0 on success, 1 on a configuration error (nothing
// written), 2 on a numerical failure (diagnostic.json written to --out).
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "branewave/brane_spectrum.hpp"
#include "branewave/desitter_modes.hpp"
#include "branewave/fd_oracle.hpp"
#include "branewave/kk_tower.hpp"
#include "branewave/table_io.hpp"
#include "scenario.hpp"

namespace {

using branewave::cplx;
using branewave::Table;
using branewave::cli::ConfigError;
using branewave::cli::Scenario;
namespace spectrum = branewave::spectrum;
namespace modes = branewave::modes;
namespace tower = branewave::tower;
namespace fd = branewave::fd;

std::string out_path(const Scenario& s, const std::string& name) {
  return (std::filesystem::path(s.out) / name).string();
}

Table new_table(const Scenario& s, const std::string& kind) {
  Table t;
  t.header["config"] = s.to_json();
  t.header["table"] = kind;
  return t;
}

spectrum::OperatorSpec operator_of(const Scenario& s) {
  return s.dirichlet ? spectrum::OperatorSpec::dirichlet(s.alpha, s.M) : spectrum::OperatorSpec::robin(s.alpha, s.M, s.c);
}

spectrum::SpectralBasis basis_of(const Scenario& s) {
  spectrum::BasisOptions opt;
  opt.m_max = s.m_max;
  opt.m_order = s.m_order;
  return spectrum::build_basis(operator_of(s), opt);
}

// Smooth bump (1 + c1 t + c2 t^2)(1 - t^2)^8 in y = log coth(rho/2), of
// half-width 1 to 1.5, starting 0.02 to 1.02 above y0: vanishes near rho0.
struct Bump {
  double lo = 0.0, hi = 1.0, amp = 1.0, c1 = 0.0, c2 = 0.0;
  double operator()(double rho) const {
    const double y = spectrum::y_from_rho(rho);
    const double t = (2.0 * y - lo - hi) / (hi - lo);
    if (std::fabs(t) >= 1.0) return 0.0;
    return amp * (1.0 + c1 * t + c2 * t * t) * std::pow(1.0 - t * t, 8);
  }
};

Bump random_bump(std::mt19937_64& rng, double y0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Bump b;
  const double half = 1.0 + 0.5 * u(rng);
  b.lo = y0 + 0.02 + u(rng);
  b.hi = b.lo + 2.0 * half;
  b.amp = 0.5 + u(rng);
  b.c1 = u(rng) - 0.5;
  b.c2 = u(rng) - 0.5;
  return b;
}

// Smooth bump in rho spanning [0.1 to 0.25, 0.93 to 0.98] rho0: resolved by
// the uniform grid of the finite-difference oracle.
struct RhoBump {
  double lo = 0.0, hi = 1.0, amp = 1.0, c1 = 0.0, c2 = 0.0;
  double operator()(double rho) const {
    const double t = (2.0 * rho - lo - hi) / (hi - lo);
    if (std::fabs(t) >= 1.0) return 0.0;
    return amp * (1.0 + c1 * t + c2 * t * t) * std::pow(1.0 - t * t, 8);
  }
};

RhoBump random_rho_bump(std::mt19937_64& rng, double rho0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RhoBump b;
  b.lo = rho0 * (0.1 + 0.15 * u(rng));
  b.hi = rho0 * (0.93 + 0.05 * u(rng));
  b.amp = 0.5 + u(rng);
  b.c1 = u(rng) - 0.5;
  b.c2 = u(rng) - 0.5;
  return b;
}

void run_modes(const Scenario& s) {
  const modes::ModeParams mode = modes::ModeParams::from_kappa(s.kappa);
  if (s.profile) {
    std::vector<double> xi(201);
    for (std::size_t k = 0; k < xi.size(); ++k) xi[k] = s.xi_max * static_cast<double>(k) / 200.0;
    modes::SpectralField init;
    init.xi_grid = xi;
    init.u_hat.assign(xi.size(), 1.0);
    init.ut_hat.assign(xi.size(), 0.0);
    init.tau = s.tau_star;
    const modes::SpectralField phi = modes::profile_phi(init, mode);
    Table t = new_table(s, "limit profile for unit u0_hat, u1_hat = 0");
    t.columns = {"xi", "phi_re", "phi_im", "closed_form"};
    const double scale = std::exp(-s.tau_star);
    for (std::size_t k = 0; k < xi.size(); ++k) {
      const double z = scale * xi[k];
      const double closed = z == 0.0 ? 1.0 : std::sin(z) / z;
      t.add_row({xi[k], phi.u_hat[k].real(), phi.u_hat[k].imag(), closed});
    }
    branewave::write_table(out_path(s, "modes_profile.csv"), t);
    return;
  }
  const auto q = modes::radial_quadrature(s.xi_max, static_cast<std::size_t>(s.xi_panels), s.xi_order);
  const modes::SpectralField init = modes::make_field(
      q, s.tau_star, [](double xi) { return cplx(std::exp(-0.5 * xi * xi)); }, [](double) { return cplx(0.0); });
  Table t = new_table(s, "mode evolution of u0_hat = exp(-xi^2/2), u1_hat = 0");
  t.columns = {"tau", "energy", "norm_full", "norm_half"};
  t.header["indefinite_energy"] = s.kappa < 0.0;
  for (double tau : tower::default_schedule(s.tau_star, s.resolved_tau_end() - s.tau_star)) {
    const modes::SpectralField f = modes::evolve(init, mode, tau);
    t.add_row({tau, modes::energy(f, mode, q.weight).value, modes::norm_full(f, q.weight, 1.0),
               modes::norm_half(f, q.weight, 1.0)});
  }
  branewave::write_table(out_path(s, "modes_evolution.csv"), t);
}

void run_spectrum(const Scenario& s) {
  const spectrum::OperatorSpec spec = operator_of(s);
  const spectrum::RadialGrid grid = spectrum::make_radial_grid(spec.geometry);
  const spectrum::PointSpectrum ps = spectrum::point_spectrum(spec, grid, spectrum::default_search_floor(s.M));
  Table t = new_table(s, "point spectrum");
  t.header["search_floor"] = ps.search_floor;
  t.header["floor_residual"] = ps.floor_residual;
  t.header["scan_step"] = ps.scan_step;
  t.header["rho0"] = spec.geometry.rho0;
  t.header["gamma"] = spec.geometry.gamma;
  t.columns = {"eigenvalue", "residual", "derivative_residual", "normalizer"};
  for (std::size_t j = 0; j < ps.eigenvalues.size(); ++j)
    t.add_row({ps.eigenvalues[j], ps.residuals[j], spectrum::derivative_form_residual(ps.eigenvalues[j], spec),
               ps.normalizers[j]});
  branewave::write_table(out_path(s, "spectrum.csv"), t);
}

void run_tower(const Scenario& s) {
  const spectrum::SpectralBasis basis = basis_of(s);
  std::mt19937_64 rng(s.seed);
  const Bump b0 = random_bump(rng, basis.spec.geometry.y0);
  const Bump b1 = random_bump(rng, basis.spec.geometry.y0);
  const auto q = modes::radial_quadrature(s.xi_max, static_cast<std::size_t>(s.xi_panels), s.xi_order);
  const tower::BulkState init = tower::make_state(
      q, basis.grid, s.tau_star, [&](double xi, double rho) { return cplx(std::exp(-xi * xi) * b0(rho)); },
      [&](double xi, double rho) { return cplx(xi * std::exp(-xi * xi) * b1(rho)); });
  const tower::TowerCoefficients c0 = tower::decompose(init, basis);
  const tower::BulkState back = tower::reconstruct(c0, basis);
  std::vector<cplx> diff(init.u.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = init.u[i] - back.u[i];
  const double roundtrip =
      std::sqrt(tower::x0_norm_sq(init, basis.grid, diff) / tower::x0_norm_sq(init, basis.grid, init.u));
  const tower::EnergyReport e0 = tower::energy_report(init, c0, basis);
  const double tau_end = s.resolved_tau_end();
  const tower::TowerCoefficients c1 = tower::evolve_tower(c0, basis, tau_end);
  const tower::BulkState fin = tower::reconstruct(c1, basis);
  const tower::EnergyReport e1 = tower::energy_report(fin, c1, basis);

  Table sum = new_table(s, "tower energy summary");
  sum.columns = {"tau", "total", "mode_sum", "discrepancy", "tail", "roundtrip_x0"};
  sum.add_row({s.tau_star, e0.total, e0.mode_sum, e0.discrepancy, e0.tail, roundtrip});
  sum.add_row({tau_end, e1.total, e1.mode_sum, e1.discrepancy, e1.tail, std::nan("")});
  branewave::write_table(out_path(s, "tower_summary.csv"), sum);

  Table modes_t = new_table(s, "per-mode energies; the last row is the continuum integral");
  modes_t.columns = {"index", "kappa", "energy_start", "energy_end"};
  for (std::size_t j = 0; j < e0.per_mode.size(); ++j) {
    const bool point = j < basis.point.eigenvalues.size();
    modes_t.add_row({static_cast<double>(j), point ? basis.point.eigenvalues[j] : std::nan(""), e0.per_mode[j],
                     e1.per_mode[j]});
  }
  branewave::write_table(out_path(s, "tower_modes.csv"), modes_t);
  tower::write_state(out_path(s, "tower_state.csv"), fin, s.to_json());
}

void run_graviton(const Scenario& s) {
  const spectrum::SpectralBasis basis = basis_of(s);
  std::mt19937_64 rng(s.seed);
  const Bump b0 = random_bump(rng, basis.spec.geometry.y0);
  const Bump b1 = random_bump(rng, basis.spec.geometry.y0);
  const auto q = modes::radial_quadrature(s.xi_max, static_cast<std::size_t>(s.xi_panels), s.xi_order);
  const tower::BulkState init = tower::make_state(
      q, basis.grid, s.tau_star, [&](double xi, double rho) { return cplx(std::exp(-xi * xi) * (0.7 + b0(rho))); },
      [&](double xi, double rho) { return cplx(0.3 * xi * std::exp(-xi * xi) * b1(rho)); });
  const auto taus = tower::default_schedule(s.tau_star, s.resolved_tau_end() - s.tau_star);
  const auto res = tower::graviton_residual(init, basis, taus);
  Table rt = new_table(s, "graviton residual");
  rt.columns = {"tau", "residual", "dekaa_scaled"};
  for (const auto& r : res) rt.add_row({r.tau, r.residual, r.dekaa_scaled});
  branewave::write_table(out_path(s, "graviton_residual.csv"), rt);

  // Late part of the schedule: the fit targets the asymptotic regime.
  const tower::TowerCoefficients c0 = tower::decompose(init, basis);
  std::vector<tower::BulkState> history;
  for (double tau : taus)
    if (tau >= s.tau_star + 4.0) history.push_back(tower::reconstruct(tower::evolve_tower(c0, basis, tau), basis));
  const tower::HorizonFit fit = tower::horizon_energy(history, basis);
  Table ht = new_table(s, "horizon energy");
  ht.header["exponent"] = fit.exponent;
  ht.header["phi_zero"] = fit.phi_zero;
  ht.header["phi_norm"] = fit.phi_norm;
  ht.columns = {"tau", "t", "energy"};
  for (std::size_t i = 0; i < fit.taus.size(); ++i) ht.add_row({fit.taus[i], fit.t[i], fit.energy[i]});
  branewave::write_table(out_path(s, "horizon_energy.csv"), ht);
  if (fit.phi_zero) std::cerr << "warning: the limit profile vanishes; the horizon lower bound does not apply\n";
}

void run_oracle_check(const Scenario& s) {
  const spectrum::SpectralBasis basis = basis_of(s);
  fd::FdConfig cfg;
  cfg.n_rho = static_cast<std::size_t>(s.n_rho);
  cfg.rho_min = s.rho_min;
  std::mt19937_64 rng(s.seed);
  const double tau_end = s.resolved_tau_end();
  Table t = new_table(s, "finite-difference oracle against the spectral tower");
  t.columns = {"trial", "xi", "error_n", "error_2n", "order", "audit_residual", "audit_scale", "max_increase"};
  for (int trial = 0; trial < s.trials; ++trial) {
    const RhoBump b0 = random_rho_bump(rng, basis.spec.geometry.rho0);
    const RhoBump b1 = random_rho_bump(rng, basis.spec.geometry.rho0);
    const fd::RadialData u0 = [&](double rho) { return cplx(b0(rho)); };
    const fd::RadialData u1 = [&](double rho) { return cplx(0.5 * b1(rho)); };
    for (double xi : {0.0, 1.0}) {
      const auto st = fd::convergence_study(basis, cfg, xi, s.tau_star, tau_end, u0, u1, 2);
      const fd::FdGrid g = fd::make_fd_grid(basis.spec, cfg);
      const fd::FdRun r = fd::run(basis.spec, cfg, xi, fd::make_fd_state(g, s.tau_star, u0, u1), tau_end, 1);
      const fd::EnergyAudit a = fd::energy_audit(r, basis.spec, cfg, xi);
      t.add_row({static_cast<double>(trial), xi, st.error[0], st.error[1], st.order[0], a.max_residual, a.scale,
                 a.max_increase});
    }
  }
  branewave::write_table(out_path(s, "oracle_check.csv"), t);
}

void write_diagnostic(const Scenario& s, const std::string& kind, const std::string& what) {
  nlohmann::json j;
  j["status"] = "numerical failure";
  j["error_type"] = kind;
  j["message"] = what;
  j["config"] = s.to_json();
  std::ofstream out(out_path(s, "diagnostic.json"));
  out << j.dump(2) << "\n";
}

int config_error(const std::string& field, const std::string& what) {
  nlohmann::json j;
  j["status"] = "config error";
  j["field"] = field;
  j["message"] = what;
  std::cerr << j.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon fields near a De Sitter brane: modes, spectrum, tower, graviton, oracle-check"};
  app.require_subcommand(1, 1);
  const std::vector<std::string> keys = {"alpha", "M", "c", "kappa", "tau-star", "tau-end", "out", "seed",
                                         "xi-max", "xi-panels", "xi-order", "m-max", "m-order", "n-rho",
                                         "rho-min", "trials"};
  std::map<std::string, std::string> values;
  std::string config_path;
  bool profile = false;
  std::map<std::string, CLI::Option*> opts;
  std::vector<CLI::App*> subs;
  for (const char* name : {"modes", "spectrum", "tower", "graviton", "oracle-check"}) {
    CLI::App* sub = app.add_subcommand(name);
    for (const auto& k : keys) opts[std::string(name) + "/" + k] = sub->add_option("--" + k, values[k]);
    sub->add_option("--config", config_path, "JSON object or key = value lines");
    if (std::string(name) == "modes") sub->add_flag("--profile", profile, "limit profile table for kappa = 0");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return config_error("arguments", e.what());
  }

  Scenario s;
  try {
    for (CLI::App* sub : subs) {
      if (!sub->parsed()) continue;
      s.command = sub->get_name();
      if (!config_path.empty()) branewave::cli::apply_config_file(s, config_path);
      for (const auto& k : keys)
        if (opts[s.command + "/" + k]->count() > 0) branewave::cli::apply_key(s, k, values[k]);
      if (profile) s.profile = true;
    }
    s.validate();
  } catch (const ConfigError& e) {
    return config_error(e.field, e.what());
  }

  std::error_code ec;
  std::filesystem::create_directories(s.out, ec);
  if (ec) return config_error("out", "cannot create output directory: " + ec.message());
  try {
    if (s.command == "modes") run_modes(s);
    if (s.command == "spectrum") run_spectrum(s);
    if (s.command == "tower") run_tower(s);
    if (s.command == "graviton") run_graviton(s);
    if (s.command == "oracle-check") run_oracle_check(s);
  } catch (const branewave::ConvergenceError& e) {
    write_diagnostic(s, "convergence", e.what());
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const branewave::DomainError& e) {
    write_diagnostic(s, "domain", e.what());
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    write_diagnostic(s, "runtime", e.what());
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
