// Kaluza-Klein tower of the bulk problem
//   d_tau^2 u + 3 d_tau u - e^{-2 tau} Lap_x u + L_c u = 0:
// each transverse eigenmode carries a Klein-Gordon field of mass kappa on the
// Steady State Universe, kappa = lambda_j (point) or m^2 (continuum).
//
// A BulkState samples u_hat(xi, rho) on (radial xi nodes) x (radial grid of
// the spectral basis), row-major in xi. Norms use the xi weights 4 pi xi^2 dxi
// and the H weights of the basis grid.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "branewave/brane_spectrum.hpp"
#include "branewave/desitter_modes.hpp"
#include "branewave/table_io.hpp"

namespace branewave::tower {

struct BulkState {
  std::vector<double> xi;
  std::vector<double> xi_weight;
  std::vector<double> rho;
  std::vector<cplx> u;   // index k * rho.size() + i
  std::vector<cplx> ut;
  double tau = 0.0;

  std::size_t rows() const { return xi.size(); }
  std::size_t cols() const { return rho.size(); }
  // Throws std::invalid_argument on size mismatch, non-monotone grids or
  // non-finite samples.
  void validate() const;
};

using BulkProfile = std::function<cplx(double xi, double rho)>;
BulkState make_state(const modes::RadialQuadrature& q, const spectrum::RadialGrid& grid, double tau,
                     const BulkProfile& u0, const BulkProfile& u1);

struct TowerCoefficients {
  std::vector<double> xi;
  std::vector<double> xi_weight;
  std::vector<modes::SpectralField> point;       // one field per eigenvalue
  std::vector<modes::SpectralField> continuous;  // one field per m node
  double tau = 0.0;
};

// Per xi row: C_j and S(Pi_ac .)(m_k) of u and of d_tau u.
TowerCoefficients decompose(const BulkState& state, const spectrum::SpectralBasis& basis);
// Mode j evolves with kappa = lambda_j, node k with kappa = m_k^2; no mixing.
TowerCoefficients evolve_tower(const TowerCoefficients& coeffs, const spectrum::SpectralBasis& basis, double tau);
BulkState reconstruct(const TowerCoefficients& coeffs, const spectrum::SpectralBasis& basis);

// ||u||_{X^0}^2 and ||u||_{X^1}^2 = ||u||^2 + ||grad_x u||^2 + ||sinh(rho) d_rho u||^2.
double x0_norm_sq(const BulkState& s, const spectrum::RadialGrid& grid, const std::vector<cplx>& field);
double x1_norm_sq(const BulkState& s, const spectrum::RadialGrid& grid, const std::vector<cplx>& field);

// Bulk energy
//   int sinh^2 |u_tau|^2 + e^{-2 tau} sinh^2 |grad u|^2 + sinh^4 |u_rho|^2
//       + M^2 sinh^4 |u|^2 d rho dx + c sinh^4(rho0) int |u(rho0)|^2 dx
// (boundary term absent for Dirichlet), with u(rho0) extrapolated from the
// first y panel.
double bulk_energy(const BulkState& s, const spectrum::SpectralBasis& basis);

struct EnergyReport {
  double total = 0.0;
  std::vector<double> per_mode;   // point modes, then the continuum integral as last entry
  double mode_sum = 0.0;
  double discrepancy = 0.0;       // |total - mode_sum|
  double tail = 0.0;              // continuum energy on m in [m_max - 5, m_max]
};
EnergyReport energy_report(const BulkState& state, const TowerCoefficients& coeffs,
                           const spectrum::SpectralBasis& basis);

// Mixed H^1 size of the tower: per mode int |d_tau u|^2 + (1 + |xi|^2 + |kappa|)|u|^2 d xi,
// summed over point modes and integrated in dm over the continuum.
double tower_h1_size(const TowerCoefficients& coeffs, const spectrum::SpectralBasis& basis);

// Initial data of the graviton for M = c = 0: gamma^2 int u sinh^2 rho d rho
// per xi row (u_hat) and the same of d_tau u (ut_hat). Throws
// std::invalid_argument unless (M, c) = (0, 0) with a Robin condition.
modes::SpectralField graviton_extract(const BulkState& state, const spectrum::SpectralBasis& basis);

// 17 points tau* + 13^{k/16} - 1, k = 0..16, on [tau*, tau* + 12].
std::vector<double> default_schedule(double tau_star, double span = 12.0, int points = 17);

struct ResidualSample {
  double tau = 0.0;
  double residual = 0.0;       // ||(u - u_phi)(tau)||_{X^1} + ||d_tau u(tau)||_{X^0}
  double dekaa_scaled = 0.0;   // e^{3 tau/2} ||(d_tau + 3/2)(u - u_phi)(tau)||_{X^0}
};
std::vector<ResidualSample> graviton_residual(const BulkState& init, const spectrum::SpectralBasis& basis,
                                              const std::vector<double>& taus);

// Trace of the graviton at tau = +inf from its data at tau*.
modes::SpectralField brane_trace_profile(const modes::SpectralField& phi_init);

struct HorizonFit {
  std::vector<double> taus;
  std::vector<double> t;        // bulk time on the brane
  std::vector<double> energy;   // E_p
  double exponent = 0.0;        // slope of log E_p against log |t|
  bool phi_zero = false;        // the limit profile vanishes: the lower bound does not apply
  double phi_norm = 0.0;        // ||grad phi||_{L^2}
};

// E_p(tau) = e^{2 tau} int int |grad_x u|^2 sinh(rho) cosh(rho) d rho dx for each
// state of the history, and the least-squares exponent over the history.
// phi_zero is set when ||grad phi|| < 1e-10 times the gradient size of the
// first state.
HorizonFit horizon_energy(const std::vector<BulkState>& history, const spectrum::SpectralBasis& basis);

// State snapshot as a portable table with the grids and tau in its header.
void write_state(const std::string& path, const BulkState& s, const nlohmann::json& meta);

}  // namespace branewave::tower
