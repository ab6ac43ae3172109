// Geometry of a De Sitter brane z = alpha t in the Poincare patch of AdS5 and
// the spectral theory of the transverse operator
//   L = -sinh^{-2}(rho) d_rho (sinh^4(rho) d_rho) + M^2 sinh^2(rho)
// on (0, rho0] with d_rho w + c w = 0 (Robin) or w = 0 (Dirichlet) at rho0,
// acting in H = L^2((0, rho0), sinh^2(rho) d rho).
//
// Radial quadrature lives in y = log coth(rho/2): cosh rho = coth y,
// sinh rho = 1/sinh y, and sinh^2 rho d rho = sinh^3 rho dy, so
// v(y) = sinh^{3/2}(rho) u(rho) is an isometry onto L^2(y0, inf).
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "branewave/quadrature.hpp"
#include "branewave/specialfn.hpp"

namespace branewave::spectrum {

struct BraneGeometry {
  double alpha = -0.5;
  double rho0 = 0.0;              // log((1 + sqrt(1 - alpha^2)) / (-alpha)); cosh rho0 = -1/alpha
  double y0 = 0.0;                // log coth(rho0 / 2)
  double gamma = 0.0;             // (int_0^rho0 sinh^2)^{-1/2} = sqrt(2/(sinh rho0 cosh rho0 - rho0))
  double scalar_curvature = 0.0;  // 12 alpha^2 / (1 - alpha^2)

  // Throws DomainError unless -1 < alpha < 0.
  static BraneGeometry from_alpha(double alpha);
};

// Coordinate maps. Each throws DomainError outside its domain.
double y_from_rho(double rho);    // rho > 0
double rho_from_y(double y);      // y > 0
double x_from_rho(double rho);    // cosh rho
double rho_from_x(double x);      // x >= 1
double xm1_from_y(double y);      // cosh rho - 1 = 2/(e^{2y} - 1) without cancellation

// Bulk point (t, z) with t < -z < 0 and the adapted coordinates
//   t = -coth(rho) e^{-tau},  z = e^{-tau}/sinh(rho),  tau = -log(t^2 - z^2)/2.
struct TauRho {
  double tau;
  double rho;
};
struct TimeDepth {
  double t;
  double z;
};
TauRho tau_rho_from_tz(double t, double z);
TimeDepth tz_from_tau_rho(double tau, double rho);
// Bulk time on the brane at brane time tau: -e^{-tau}/sqrt(1 - alpha^2).
double brane_time(const BraneGeometry& g, double tau);

enum class Boundary { Robin, Dirichlet };

struct OperatorSpec {
  double M = 0.0;
  Boundary bc = Boundary::Robin;
  double c = 0.0;  // ignored for Dirichlet
  BraneGeometry geometry;

  static OperatorSpec robin(double alpha, double M, double c);
  static OperatorSpec dirichlet(double alpha, double M);

  // -1/2 + sqrt(M^2 + 4); satisfies nu (nu + 1) = M^2 + 15/4.
  double legendre_degree() const;
  // K with P'(x0) - K P(x0) the Robin combination in x = cosh rho:
  // alpha/sqrt(1 - alpha^2) (c - 3/(2 sqrt(1 - alpha^2))).
  double robin_x_constant() const;
  // Throws std::invalid_argument for M < 0, non-finite c or M too large for
  // the Legendre evaluator (degree above 10).
  void validate() const;
};

// Left side of the eigenvalue condition for lambda < 9/4, mu = sqrt(9/4 - lambda):
//   Robin:     (c sqrt(1-alpha^2) - 2 + sqrt(M^2+4)) P^{-mu}_nu(x0)
//                + alpha (nu - mu) P^{-mu}_{nu-1}(x0)
//   Dirichlet: P^{-mu}_nu(x0)
// with nu the Legendre degree and x0 = -1/alpha.
double transcendental_residual(double lambda, const OperatorSpec& spec);

// The same condition in derivative form, d_rho w + c w at rho0 for
// w = sinh^{-3/2}(rho) P^{-mu}_nu(cosh rho) (w itself for Dirichlet).
double derivative_form_residual(double lambda, const OperatorSpec& spec);

// Quadrature nodes in y on [y0, y_max], y_max = y(eps_fraction * rho0).
struct RadialGrid {
  quad::Composite y;
  std::vector<double> rho;
  std::vector<double> sinh_rho;
  std::vector<double> h_weight;  // y-weight times sinh^3 rho: H inner product weight
  double eps_fraction = 1e-3;

  std::size_t size() const { return rho.size(); }
};
RadialGrid make_radial_grid(const BraneGeometry& g, double eps_fraction = 1e-3, double panel_width = 0.25,
                            int order = 16);

// <u, v>_H = int u conj(v) sinh^2 rho d rho by the grid quadrature.
cplx h_inner(const RadialGrid& grid, const std::vector<cplx>& u, const std::vector<cplx>& v);
double h_norm_sq(const RadialGrid& grid, const std::vector<cplx>& u);
// d/d rho = -d/dy / sinh(rho), panelwise spectral differentiation.
std::vector<cplx> derivative_rho(const RadialGrid& grid, const std::vector<cplx>& u);

// Default lower end of the eigenvalue scan: -max(10, 4 M^2 + 10).
double default_search_floor(double M);

struct PointSpectrum {
  std::vector<double> eigenvalues;            // ascending
  std::vector<double> residuals;              // transcendental residual at each eigenvalue
  std::vector<double> normalizers;            // gamma_j, w = gamma_j sinh^{-3/2} P^{-mu}_nu(cosh rho)
  std::vector<std::vector<double>> samples;   // w(rho_i; lambda_j) on the radial grid
  double search_floor = 0.0;
  double floor_residual = 0.0;                // residual at the floor, for extending the scan
  double scan_step = 0.0;                     // final scan resolution
};

// Brackets every sign change of the residual on [floor, 9/4) at step
// scan_step, halving the step until the count is stable, then bisects to
// machine precision. A negative residual at the floor signals the single
// eigenvalue L_c can have below it (c < 0); it is bracketed by doubling the
// floor. Throws ConvergenceError if the residual is not finite somewhere in
// the scan or that eigenvalue lies below -1e6.
PointSpectrum point_spectrum(const OperatorSpec& spec, const RadialGrid& grid, double search_floor,
                             double scan_step = 1e-3);

// Unit-H-norm eigenfunction for an eigenvalue lambda < 9/4.
double eigenfunction_normalizer(const OperatorSpec& spec, double lambda);
double eigenfunction_value(const OperatorSpec& spec, double lambda, double normalizer, double rho);

// Real generalized eigenfunction for m > 3/2, sigma = sqrt(m^2 - 9/4), with
// spectral amplitude normalized so that Parseval holds in dm:
//   w = sqrt(2m / sinh(pi sigma)) sinh^{-3/2}(rho) Im(e^{-i arg D} P^{i sigma}_nu(cosh rho)),
//   D = P'(x0) - K P(x0)  (Robin),  D = P(x0)  (Dirichlet).
// Im(e^{-i arg D} P) is the real solution meeting the boundary condition.
struct GeneralizedMode {
  double m = 0.0;
  double sigma = 0.0;
  double phase = 0.0;      // arg D
  double amplitude = 0.0;  // sqrt(2m / sinh(pi sigma))
};
// Guard band: m - 3/2 below this is rejected.
inline constexpr double kThresholdGuard = 1e-3;
GeneralizedMode generalized_mode(const OperatorSpec& spec, double m);
double generalized_value(const OperatorSpec& spec, const GeneralizedMode& mode, double rho);
std::vector<double> generalized_eigenfunction(const OperatorSpec& spec, double m, const std::vector<double>& rho);

// The upper solution phi = (4 lambda - 9)^{-1/4} Gamma(1 - i sigma) P^{i sigma}_nu(coth y)
// and its y-derivative; phi d_y conj(phi) - conj(phi) d_y phi = -i.
void upper_solution(const OperatorSpec& spec, double m, double y, cplx& phi, cplx& dphi);

// Quadrature in m over [3/2 + guard, m_max], integrated in sigma with
// dm = (sigma/m) d sigma; panels graded toward the threshold. The first node
// sits on the guard edge and carries the band [3/2, 3/2 + guard] through the
// threshold law |S(m)|^2 ~ sigma, so no eigenfunction inside the band is
// ever evaluated.
struct ContinuousGrid {
  std::vector<double> sigma;
  std::vector<double> m;
  std::vector<double> weight;  // dm weights
  double m_max = 40.0;
};
ContinuousGrid make_continuous_grid(double m_max = 40.0, int order = 12);

struct SpectralBasis {
  OperatorSpec spec;
  RadialGrid grid;
  PointSpectrum point;
  ContinuousGrid continuous;
  std::vector<double> w_cont;  // w(rho_i; m_k^2) at index k * grid.size() + i

  const double* column(std::size_t k) const { return w_cont.data() + k * grid.size(); }
};

struct BasisOptions {
  double eps_fraction = 1e-3;
  double panel_width = 0.25;
  int radial_order = 16;
  double m_max = 40.0;
  int m_order = 12;
  double search_floor = 0.0;  // 0 selects default_search_floor(M)
  double scan_step = 1e-3;
};
SpectralBasis build_basis(const OperatorSpec& spec, const BasisOptions& opt = {});

struct TowerCoefficients {
  std::vector<cplx> point;       // C_j
  std::vector<cplx> continuous;  // S(Pi_ac u)(m_k)
};

// C_j = <u, w_j>_H and S(m_k) = <Pi_ac u, w(.; m_k^2)>_H.
TowerCoefficients spectral_forward(const std::vector<cplx>& u, const SpectralBasis& basis);
// sum_j C_j w_j + sum_k weight_k S_k w(.; m_k^2) on the radial grid.
std::vector<cplx> spectral_inverse(const TowerCoefficients& coeffs, const SpectralBasis& basis);
// sum |C_j|^2 + int |S|^2 dm over the truncated grid.
double coefficient_norm_sq(const TowerCoefficients& coeffs, const SpectralBasis& basis);
// int_{m_max - 5}^{m_max} |S|^2 dm: a proxy for the truncated tail.
double truncation_tail(const TowerCoefficients& coeffs, const SpectralBasis& basis);

struct H1Equivalence {
  double a = 0.0;              // 10 + |lowest eigenvalue| (10 if there is none)
  double h1_norm_sq = 0.0;     // A ||u||_H^2 + ||sinh(rho) u'||_H^2
  double spectral_side = 0.0;  // sum (A + lambda_j)|C_j|^2 + int (A + m^2)|S|^2 dm
  double ratio = 0.0;          // spectral_side / h1_norm_sq
};
H1Equivalence h1_equivalence_check(const std::vector<cplx>& u, const std::vector<cplx>& du_drho,
                                   const SpectralBasis& basis);

// Portable table form of a basis; reading it back reproduces every number.
void write_basis(const std::string& path, const SpectralBasis& basis);
SpectralBasis read_basis(const std::string& path);

}  // namespace branewave::spectrum
