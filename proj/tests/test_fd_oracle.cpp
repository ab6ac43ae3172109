#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "branewave/desitter_modes.hpp"
#include "branewave/fd_oracle.hpp"
#include "branewave/table_io.hpp"
#include "support.hpp"

using namespace branewave;
using namespace branewave::fd;
using spectrum::OperatorSpec;
using spectrum::SpectralBasis;
using testing_support::YBump;

namespace {

const SpectralBasis& basis_massive() {
  static const SpectralBasis b = spectrum::build_basis(OperatorSpec::robin(-0.5, 1.0, 0.5));
  return b;
}

double h_norm(const FdGrid& g, const std::vector<cplx>& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += g.mass[i] * std::norm(u[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("configuration is validated") {
  const OperatorSpec s = OperatorSpec::robin(-0.5, 0.0, 0.0);
  FdConfig cfg;
  CHECK_NOTHROW(cfg.validate(s));
  FdConfig bad = cfg;
  bad.rho_min = 0.0;
  CHECK_THROWS_AS(bad.validate(s), std::invalid_argument);
  bad = cfg;
  bad.rho_min = 2.0;
  CHECK_THROWS_AS(bad.validate(s), std::invalid_argument);
  bad = cfg;
  bad.n_rho = 4;
  CHECK_THROWS_AS(bad.validate(s), std::invalid_argument);
  bad = cfg;
  bad.scheme_order = 4;
  CHECK_THROWS_AS(bad.validate(s), std::invalid_argument);
  bad = cfg;
  bad.safety = 1.0;
  CHECK_THROWS_AS(bad.validate(s), std::invalid_argument);
  // A step above the stability bound is rejected up front.
  bad = cfg;
  bad.dt = 1.01 * max_stable_dt(s, cfg) / cfg.safety;
  CHECK_THROWS_AS(bad.validate(s), std::invalid_argument);
  const FdGrid g = make_fd_grid(s, cfg);
  CHECK(max_stable_dt(s, cfg) == doctest::Approx(cfg.safety * g.h / std::sinh(s.geometry.rho0)));
  CHECK(g.rho.front() == cfg.rho_min);
  CHECK(g.rho.back() == doctest::Approx(s.geometry.rho0).epsilon(1e-15));
}

TEST_CASE("discrete operator is symmetric in the mass inner product") {
  for (const OperatorSpec& s : {OperatorSpec::robin(-0.5, 1.0, -0.7), OperatorSpec::dirichlet(-0.3, 0.5)}) {
    FdConfig cfg;
    cfg.n_rho = 60;
    const FdGrid g = make_fd_grid(s, cfg);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N;
    std::vector<cplx> a(g.rho.size()), b(g.rho.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = {N(rng), N(rng)};
      b[i] = {N(rng), N(rng)};
    }
    if (g.dirichlet) a.back() = b.back() = 0.0;
    const auto la = apply_operator(g, s, a), lb = apply_operator(g, s, b);
    cplx ab = 0.0, ba = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ab += g.mass[i] * la[i] * std::conj(b[i]);
      ba += g.mass[i] * a[i] * std::conj(lb[i]);
    }
    CHECK(std::abs(ab - ba) < 1e-10 * std::abs(ab));
  }
}

TEST_CASE("rho-independent data solve u'' + 3u' = 0") {
  const OperatorSpec s = OperatorSpec::robin(-0.5, 0.0, 0.0);
  double prev = INFINITY;
  for (std::size_t n : {100, 200, 400}) {
    FdConfig cfg;
    cfg.n_rho = n;
    const FdGrid g = make_fd_grid(s, cfg);
    const double u0 = 0.7, u1 = -1.3, ts = 0.4;
    const FdRun r = run(s, cfg, 0.0, make_fd_state(g, ts, [&](double) { return cplx(u0); }, [&](double) { return cplx(u1); }), ts + 2.0);
    const FdState& e = r.history.back();
    const double exact = u0 + u1 / 3.0 * (1.0 - std::exp(-6.0));
    double err = 0.0, spread = 0.0;
    for (const cplx& v : e.u) {
      err = std::max(err, std::abs(v - exact));
      spread = std::max(spread, std::abs(v - e.u.front()));
    }
    CHECK(spread < 1e-12);
    CHECK(err < 10.0 * r.dt * r.dt);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("eigenmode data follow the Klein-Gordon mode of mass lambda") {
  const OperatorSpec s = OperatorSpec::robin(-0.5, 0.0, -1.0);
  const double lam = spectrum::point_spectrum(s, spectrum::make_radial_grid(s.geometry), -20.0).eigenvalues.at(0);
  const double nrm = spectrum::eigenfunction_normalizer(s, lam);
  FdConfig cfg;
  const FdGrid g = make_fd_grid(s, cfg);
  const auto w = [&](double rho) { return cplx(spectrum::eigenfunction_value(s, lam, nrm, rho)); };
  const FdRun r = run(s, cfg, 0.0, make_fd_state(g, 0.0, w, [](double) { return cplx(0.0); }), 2.0);
  const modes::SpectralField m =
      modes::evolve(testing_support::point_field(0.0, 1.0, 0.0, 0.0), modes::ModeParams::from_kappa(lam), 2.0);
  std::vector<cplx> diff(g.rho.size()), exact(g.rho.size());
  for (std::size_t i = 0; i < g.rho.size(); ++i) {
    exact[i] = m.u_hat[0] * w(g.rho[i]);
    diff[i] = r.history.back().u[i] - exact[i];
  }
  const double rel = h_norm(g, diff) / h_norm(g, exact);
  MESSAGE("lambda = " << lam << ", growth " << std::abs(m.u_hat[0]) << ", FD relative error " << rel);
  CHECK(rel < 1e-3);
}

TEST_CASE("FD and spectral solutions agree and converge at order 2") {
  const SpectralBasis& b = basis_massive();
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const testing_support::RhoBump p = testing_support::random_rho_bump(rng, b.spec.geometry.rho0);
    const testing_support::RhoBump q = testing_support::random_rho_bump(rng, b.spec.geometry.rho0);
    const RadialData u0 = [&](double rho) { return cplx(p(rho)); };
    const RadialData u1 = [&](double rho) { return cplx(0.0, q(rho)); };
    for (double xi : {0.0, 1.0}) {
      FdConfig cfg;
      const FdGrid g = make_fd_grid(b.spec, cfg);
      const FdRun r = run(b.spec, cfg, xi, make_fd_state(g, 0.3, u0, u1), 2.3);
      const auto ref = spectral_solution(b, xi, 0.3, 2.3, u0, u1);
      worst = std::max(worst, compare_with_spectral(r.history.back(), g, b.grid, ref).relative_error);
    }
  }
  MESSAGE("FD vs spectral at 400 nodes: " << worst);
  CHECK(worst < 1e-2);

  const YBump p{b.spec.geometry.y0 + 0.2, b.spec.geometry.y0 + 2.4, 1.0, 0.3, 0.0};
  const ConvergenceStudy c = convergence_study(
      b, FdConfig{}, 1.0, 0.0, 2.0, [&](double rho) { return cplx(p(rho)); }, [](double) { return cplx(0.0); }, 3);
  REQUIRE(c.order.size() == 2);
  CHECK(c.n_rho[1] == 2 * c.n_rho[0] - 1);
  for (std::size_t k = 1; k < c.error.size(); ++k) {
    MESSAGE("n = " << c.n_rho[k] << ": error " << c.error[k] << ", order " << c.order[k - 1]);
    CHECK(c.error[k] < c.error[k - 1]);
    CHECK(c.order[k - 1] == doctest::Approx(2.0).epsilon(0.15));
  }
}

TEST_CASE("energy audit closes and energy decreases for c >= 0") {
  const FdConfig cfg;
  {
    const OperatorSpec s = OperatorSpec::robin(-0.5, 0.0, 0.0);
    const FdGrid g = make_fd_grid(s, cfg);
    const FdRun r = run(s, cfg, 1.0, make_fd_state(g, 0.0, [](double) { return cplx(0.0); }, [](double) { return cplx(0.0); }), 0.5, 1);
    const EnergyAudit a = energy_audit(r, s, cfg, 1.0);
    CHECK(a.max_residual == 0.0);
    CHECK(a.scale == 0.0);
  }
  std::mt19937_64 rng(17);
  for (const OperatorSpec& s :
       {OperatorSpec::robin(-0.5, 0.0, 0.0), OperatorSpec::robin(-0.5, 1.5, 2.0), OperatorSpec::dirichlet(-0.7, 0.5)}) {
    const double y0 = s.geometry.y0;
    const YBump p = testing_support::random_bump(rng, y0), q = testing_support::random_bump(rng, y0);
    // Data reaching the brane exercise the boundary term. The bump is flat at
    // y0, so e^{-c (rho - rho0)} times it satisfies d_rho u + c u = 0 there.
    const YBump edge{y0 - 1.25, y0 + 1.25, 1.0, 0.0, 0.0};
    const RadialData u0 = [&](double rho) {
      const double e = s.bc == spectrum::Boundary::Robin ? std::exp(-s.c * (rho - s.geometry.rho0)) * edge(rho) : 0.0;
      return cplx(p(rho) + e);
    };
    const RadialData u1 = [&](double rho) { return cplx(q(rho), 0.0); };
    for (std::size_t n : {200, 400}) {
      FdConfig c2 = cfg;
      c2.n_rho = n;
      const FdGrid g = make_fd_grid(s, c2);
      const FdRun r = run(s, c2, 1.5, make_fd_state(g, 0.0, u0, u1), 1.5, 1);
      const EnergyAudit a = energy_audit(r, s, c2, 1.5);
      const double budget = 10.0 * (r.dt * r.dt + g.h * g.h) * a.scale;
      MESSAGE("n = " << n << ": balance residual " << a.max_residual << " of budget " << budget << ", largest increase "
                     << a.max_increase);
      CHECK(a.max_residual < budget);
      CHECK(a.max_increase <= 1e-12 * a.scale);
      for (const auto& smp : a.samples) CHECK(smp.dissipation <= 0.0);
    }
  }
}

TEST_CASE("unstable steps are refused and runaway growth aborts") {
  FdConfig cfg;
  cfg.n_rho = 100;
  {
    const OperatorSpec s = OperatorSpec::robin(-0.5, 0.0, 0.0);
    const FdGrid g = make_fd_grid(s, cfg);
    const FdState init = make_fd_state(g, 0.0, [](double) { return cplx(1.0); }, [](double) { return cplx(0.0); });
    CHECK_THROWS_AS(FdSolver(s, cfg, 0.0, init, 1.01 * max_stable_dt(s, cfg)), std::invalid_argument);
    CHECK_THROWS_AS(FdSolver(s, cfg, 0.0, init, 0.0), std::invalid_argument);
  }
  // c = -30 carries an eigenvalue near -900: growth past 1e12 within a few units of tau.
  const OperatorSpec s = OperatorSpec::robin(-0.5, 0.0, -30.0);
  const FdGrid g = make_fd_grid(s, cfg);
  const FdState init = make_fd_state(g, 0.0, [](double) { return cplx(1.0); }, [](double) { return cplx(0.0); });
  CHECK_THROWS_AS(run(s, cfg, 0.0, init, 10.0), ConvergenceError);
}

TEST_CASE("run histories are portable tables") {
  const OperatorSpec s = OperatorSpec::robin(-0.5, 0.0, 0.0);
  FdConfig cfg;
  cfg.n_rho = 20;
  const FdGrid g = make_fd_grid(s, cfg);
  const FdRun r = run(s, cfg, 0.5, make_fd_state(g, 0.0, [](double rho) { return cplx(rho); }, [](double) { return cplx(0.0, 1.0); }), 0.2, 5);
  const auto path = std::filesystem::temp_directory_path() / "branewave_history.csv";
  write_history(path.string(), r, {{"kind", "fd_history"}});
  const Table t = read_table(path.string());
  std::filesystem::remove(path);
  CHECK(t.header["kind"] == "fd_history");
  CHECK(t.columns == std::vector<std::string>{"tau", "rho", "u_re", "u_im", "ut_re", "ut_im"});
  CHECK(t.rows.size() == r.history.size() * g.rho.size());
  CHECK(t.column("u_re")[3] == r.history[0].u[3].real());
  CHECK(t.column("tau").back() == r.history.back().tau);
}
