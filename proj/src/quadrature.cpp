#include "branewave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace branewave::quad {

Rule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  Rule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (t * p0 - p1) / (t * t - 1.0);
      const double dt = p0 / dp;
      t -= dt;
      if (std::fabs(dt) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - t * t) * dp * dp);
    // t is the i-th largest root; store ascending and mirror.
    r.x[static_cast<std::size_t>(n - 1 - i)] = t;
    r.x[static_cast<std::size_t>(i)] = -t;
    r.w[static_cast<std::size_t>(n - 1 - i)] = w;
    r.w[static_cast<std::size_t>(i)] = w;
  }
  if (n % 2 == 1) r.x[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

Composite composite(const std::vector<double>& breaks, int n) {
  if (breaks.size() < 2) throw std::invalid_argument("composite: need at least one panel");
  const Rule g = gauss_legendre(n);
  Composite c;
  c.breaks = breaks;
  c.order = n;
  c.x.reserve((breaks.size() - 1) * static_cast<std::size_t>(n));
  c.w.reserve(c.x.capacity());
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    if (!(b > a)) throw std::invalid_argument("composite: breaks must increase");
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
      c.x.push_back(mid + half * g.x[static_cast<std::size_t>(i)]);
      c.w.push_back(half * g.w[static_cast<std::size_t>(i)]);
    }
  }
  return c;
}

std::vector<double> uniform_breaks(double a, double b, std::size_t panels) {
  if (panels == 0 || !(b > a)) throw std::invalid_argument("uniform_breaks: bad interval");
  std::vector<double> out(panels + 1);
  for (std::size_t k = 0; k <= panels; ++k) out[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(panels);
  out.back() = b;
  return out;
}

std::vector<double> graded_breaks(double a, double b, double first, double ratio) {
  if (!(b > a) || !(first > 0.0) || !(ratio >= 1.0)) throw std::invalid_argument("graded_breaks: bad arguments");
  std::vector<double> out{a};
  double width = first;
  while (out.back() + width < b - 0.25 * width) {
    out.push_back(out.back() + width);
    width *= ratio;
  }
  out.push_back(b);
  return out;
}

namespace {

// Barycentric weights of the nodes of one panel.
std::vector<double> bary_weights(const double* x, int n) {
  std::vector<double> lam(static_cast<std::size_t>(n), 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) lam[static_cast<std::size_t>(j)] /= (x[j] - x[k]);
  return lam;
}

}  // namespace

std::vector<double> differentiate(const Composite& grid, const std::vector<double>& f) {
  if (f.size() != grid.x.size()) throw std::invalid_argument("differentiate: size mismatch");
  const int n = grid.order;
  std::vector<double> df(f.size(), 0.0);
  for (std::size_t p = 0; p < grid.panels(); ++p) {
    const std::size_t off = p * static_cast<std::size_t>(n);
    const double* x = grid.x.data() + off;
    const std::vector<double> lam = bary_weights(x, n);
    for (int i = 0; i < n; ++i) {
      double diag = 0.0, acc = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dij = lam[static_cast<std::size_t>(j)] / lam[static_cast<std::size_t>(i)] / (x[i] - x[j]);
        acc += dij * f[off + static_cast<std::size_t>(j)];
        diag -= dij;
      }
      df[off + static_cast<std::size_t>(i)] = acc + diag * f[off + static_cast<std::size_t>(i)];
    }
  }
  return df;
}

double interpolate(const Composite& grid, const std::vector<double>& f, double t) {
  if (f.size() != grid.x.size()) throw std::invalid_argument("interpolate: size mismatch");
  const auto& b = grid.breaks;
  t = std::clamp(t, b.front(), b.back());
  std::size_t p = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), t) - b.begin());
  p = (p == 0) ? 0 : p - 1;
  p = std::min(p, grid.panels() - 1);
  const int n = grid.order;
  const std::size_t off = p * static_cast<std::size_t>(n);
  const double* x = grid.x.data() + off;
  const std::vector<double> lam = bary_weights(x, n);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d = t - x[j];
    if (d == 0.0) return f[off + static_cast<std::size_t>(j)];
    const double q = lam[static_cast<std::size_t>(j)] / d;
    num += q * f[off + static_cast<std::size_t>(j)];
    den += q;
  }
  return num / den;
}

}  // namespace branewave::quad
