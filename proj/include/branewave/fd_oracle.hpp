// Finite-difference oracle for one spatial frequency xi of
//   u_tt + 3 u_t + e^{-2 tau} xi^2 u + L u = 0,  L = -sinh^{-2} d_rho(sinh^4 d_rho) + M^2 sinh^2,
// on a uniform rho grid [rho_min, rho0].
//
// Space: divergence form with half-cell mass weights sinh^2(rho_i) h, fluxes
// sinh^4(rho_{i+1/2}) (u_{i+1} - u_i)/h, zero flux at rho_min and the Robin
// flux -c sinh^4(rho0) u_N at rho0 (u_N = 0 for Dirichlet). The discrete
// operator is symmetric in the mass inner product.
// Time: leapfrog on v = e^{3 tau/2} u, v'' + (e^{-2 tau} xi^2 + L_h - 9/4) v = 0,
// first step by Taylor expansion. Second order in (h, dt).
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "branewave/brane_spectrum.hpp"
#include "branewave/table_io.hpp"

namespace branewave::fd {

struct FdConfig {
  double rho_min = 0.005;
  std::size_t n_rho = 400;
  double dt = 0.0;       // 0 selects the largest allowed step
  int scheme_order = 2;  // only 2 is implemented
  double safety = 0.5;   // dt <= safety * h / sinh(rho0)

  // Throws std::invalid_argument unless 0 < rho_min < rho0, n_rho >= 8,
  // scheme_order = 2, 0 < safety <= 0.9 and dt within the bound.
  void validate(const spectrum::OperatorSpec& spec) const;
};

struct FdGrid {
  std::vector<double> rho;
  std::vector<double> mass;   // sinh^2(rho_i) h, halved at both ends
  std::vector<double> flux;   // sinh^4(rho_{i+1/2}) / h, size n - 1
  std::vector<double> sinh2;
  double h = 0.0;
  double boundary = 0.0;      // c sinh^4(rho0), 0 for Dirichlet
  bool dirichlet = false;
};
FdGrid make_fd_grid(const spectrum::OperatorSpec& spec, const FdConfig& cfg);

// Largest step of the stability bound, safety * h / sinh(rho0).
double max_stable_dt(const spectrum::OperatorSpec& spec, const FdConfig& cfg);

// L_h u on the grid.
std::vector<cplx> apply_operator(const FdGrid& g, const spectrum::OperatorSpec& spec, const std::vector<cplx>& u);

struct FdState {
  std::vector<double> rho;
  std::vector<cplx> u;
  std::vector<cplx> ut;
  double tau = 0.0;
};
using RadialData = std::function<cplx(double rho)>;
FdState make_fd_state(const FdGrid& g, double tau, const RadialData& u0, const RadialData& u1);

class FdSolver {
 public:
  // dt is taken as given; it must respect the stability bound.
  FdSolver(const spectrum::OperatorSpec& spec, const FdConfig& cfg, double xi, const FdState& init, double dt);
  // Advances by dt. Throws ConvergenceError if max |v| turns non-finite or
  // exceeds 1e12 times its initial size (instability).
  void step();
  // Current state; u_tau from the centered difference of v.
  FdState state() const;
  double tau() const { return tau_; }
  double dt() const { return dt_; }
  const FdGrid& grid() const { return grid_; }

 private:
  std::vector<cplx> accel(const std::vector<cplx>& v, double tau) const;
  spectrum::OperatorSpec spec_;
  FdGrid grid_;
  double xi_;
  double dt_;
  double tau_;
  double limit_ = 0.0;
  std::vector<cplx> v_prev_;
  std::vector<cplx> v_cur_;
};

struct FdRun {
  std::vector<FdState> history;  // initial state, every stride-th step, final state
  double dt = 0.0;
  std::size_t steps = 0;
};
// Runs from init.tau to tau_end with dt = (tau_end - tau)/ceil(.../dt_max).
// stride 0 records only the initial and final states.
FdRun run(const spectrum::OperatorSpec& spec, const FdConfig& cfg, double xi, const FdState& init, double tau_end,
          std::size_t stride = 0);

// sum mass (|u_t|^2 + e^{-2 tau} xi^2 |u|^2) + <L_h u, u>, which includes the
// boundary term c sinh^4(rho0) |u_N|^2.
double discrete_energy(const FdGrid& g, const spectrum::OperatorSpec& spec, double xi, const FdState& s);

struct AuditSample {
  double tau = 0.0;
  double energy = 0.0;
  double boundary_energy = 0.0;  // c sinh^4(rho0) |u_N|^2, part of energy
  double rate = 0.0;             // centered dE/dtau
  double dissipation = 0.0;      // -sum mass (6 |u_t|^2 + 2 e^{-2 tau} xi^2 |u|^2) <= 0
  double residual = 0.0;         // rate - dissipation
};
struct EnergyAudit {
  std::vector<AuditSample> samples;  // interior history points
  double max_residual = 0.0;
  double scale = 0.0;                // max energy over the run
  double max_increase = 0.0;         // largest E(n+1) - E(n), 0 when nonincreasing
};
// Needs a history recorded at every step (stride 1).
EnergyAudit energy_audit(const FdRun& r, const spectrum::OperatorSpec& spec, const FdConfig& cfg, double xi);

// Relative discrete H error of the FD solution against a field sampled on
// the spectral radial grid, on FD nodes inside the spectral grid, with the
// spectral field interpolated panelwise in y.
struct Comparison {
  double relative_error = 0.0;
  double reference_norm = 0.0;
  std::size_t nodes = 0;
};
Comparison compare_with_spectral(const FdState& fd, const FdGrid& g, const spectrum::RadialGrid& rg,
                                 const std::vector<cplx>& spectral_u);

// Spectral solution at tau_end for data (u0, u1) at tau_star at one xi, on
// the basis grid.
std::vector<cplx> spectral_solution(const spectrum::SpectralBasis& basis, double xi, double tau_star, double tau_end,
                                    const RadialData& u0, const RadialData& u1);

struct ConvergenceStudy {
  std::vector<std::size_t> n_rho;
  std::vector<double> error;  // against the spectral solution
  std::vector<double> order;  // order[k-1] = log2(error[k-1]/error[k]) for k >= 1
};
// FD runs on n_rho, 2 n_rho - 1, ... (nested grids, h halved each level)
// with the step scaled with h, each compared with the spectral solution.
ConvergenceStudy convergence_study(const spectrum::SpectralBasis& basis, const FdConfig& cfg, double xi,
                                   double tau_star, double tau_end, const RadialData& u0, const RadialData& u1,
                                   int levels = 3);

// History as a table with columns tau, rho, u_re, u_im, ut_re, ut_im.
void write_history(const std::string& path, const FdRun& r, const nlohmann::json& meta);

}  // namespace branewave::fd
