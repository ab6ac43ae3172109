// Gauss-Legendre rules, composite panels and panel-local interpolation.
#pragma once

#include <cstddef>
#include <vector>

namespace branewave::quad {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [-1, 1]; nodes ascending. Newton iteration
// on the three-term recurrence, exact to a few ulp for n <= 200.
Rule gauss_legendre(int n);

// Composite rule: an n-point Gauss rule on every [breaks[k], breaks[k+1]].
// Nodes are ascending; panel k owns nodes [k*n, (k+1)*n).
struct Composite {
  std::vector<double> breaks;
  int order = 0;
  std::vector<double> x;
  std::vector<double> w;
  std::size_t panels() const { return breaks.empty() ? 0 : breaks.size() - 1; }
};

Composite composite(const std::vector<double>& breaks, int n);

// Breaks a = b_0 < ... < b_k = b with uniform spacing.
std::vector<double> uniform_breaks(double a, double b, std::size_t panels);

// Breaks clustered at a: widths grow geometrically by `ratio` starting from
// `first`, the last panel is clipped at b.
std::vector<double> graded_breaks(double a, double b, double first, double ratio);

// d/dx of samples f(x_i) on a composite grid by differentiating the
// degree n-1 interpolant on each panel.
std::vector<double> differentiate(const Composite& grid, const std::vector<double>& f);

// Interpolant of panel-wise samples evaluated at t (clamped to the grid).
double interpolate(const Composite& grid, const std::vector<double>& f, double t);

}  // namespace branewave::quad
