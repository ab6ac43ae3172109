#include "branewave/specialfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace branewave::specialfn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-16;
constexpr double kFpMin = 1e-300;
constexpr int kMaxSeriesTerms = 1000000;

// sin(pi z) with the integer part removed first so zeros are exact.
cplx sin_pi(cplx z) {
  const double n = std::round(z.real());
  const cplx r = std::sin(kPi * (z - n));
  return (static_cast<long long>(n) % 2 == 0) ? r : -r;
}

bool is_nonpositive_integer(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;

// log Gamma(z) for Re z >= 1/2.
cplx lgamma_right(cplx z) {
  z -= 1.0;
  cplx s = kLanczos[0];
  for (int i = 1; i < 9; ++i) s += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(s);
}

}  // namespace

cplx lgamma_complex(cplx z) {
  if (is_nonpositive_integer(z)) throw DomainError("lgamma_complex: pole");
  if (z.real() >= 0.5) return lgamma_right(z);
  return std::log(kPi) - std::log(sin_pi(z)) - lgamma_right(1.0 - z);
}

cplx gamma_complex(cplx z) {
  if (is_nonpositive_integer(z)) throw DomainError("gamma_complex: pole");
  if (z.real() >= 0.5) return std::exp(lgamma_right(z));
  return kPi / (sin_pi(z) * std::exp(lgamma_right(1.0 - z)));
}

cplx rgamma_complex(cplx z) {
  if (is_nonpositive_integer(z)) return 0.0;
  if (z.real() >= 0.5) return std::exp(-lgamma_right(z));
  return sin_pi(z) * std::exp(lgamma_right(1.0 - z)) / kPi;
}

// ---------------------------------------------------------------- Bessel

namespace {

// 1/Gamma(1+m) = sum_k kRg[k] m^k.
constexpr std::array<double, 29> kRg = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19};

// Temme's auxiliary gammas for |m| <= 1/2:
// g1 = (1/G(1-m) - 1/G(1+m)) / (2m), g2 = (1/G(1-m) + 1/G(1+m)) / 2.
void temme_gammas(double m, double& g1, double& g2, double& gp, double& gm) {
  const double m2 = m * m;
  g1 = 0.0;
  g2 = 0.0;
  double pw = 1.0;
  for (std::size_t k = 0; k + 1 < kRg.size(); k += 2) {
    g2 += kRg[k] * pw;
    g1 -= kRg[k + 1] * pw;
    pw *= m2;
  }
  gp = g2 - m * g1;  // 1/Gamma(1+m)
  gm = g2 + m * g1;  // 1/Gamma(1-m)
}

// Hankel expansion pieces: P and Q with the phase omega.
bool hankel_pq(cplx nu, double z, cplx& P, cplx& Q) {
  const cplx mu = 4.0 * nu * nu;
  P = 1.0;
  Q = 0.0;
  cplx term = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 400; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * z);
    const double mag = std::abs(term);
    if (mag > prev) return false;
    prev = mag;
    const int r = k % 4;
    if (r == 1) Q += term;
    else if (r == 2) P -= term;
    else if (r == 3) Q -= term;
    else P += term;
    if (mag < 1e-17 * std::abs(P)) return true;
    if (mag == 0.0) return true;
  }
  return false;
}

double hankel_threshold(double order_sq) { return std::max(30.0, 1.2 * order_sq); }

bool bessel_hankel(double nu, double z, CylinderEval& out) {
  cplx P0, Q0, P1, Q1;
  if (!hankel_pq(nu, z, P0, Q0) || !hankel_pq(nu + 1.0, z, P1, Q1)) return false;
  const double amp = std::sqrt(2.0 / (kPi * z));
  const double w0 = z - (0.5 * nu + 0.25) * kPi;
  const double w1 = w0 - 0.5 * kPi;
  const double j0 = amp * (P0.real() * std::cos(w0) - Q0.real() * std::sin(w0));
  const double y0 = amp * (P0.real() * std::sin(w0) + Q0.real() * std::cos(w0));
  const double j1 = amp * (P1.real() * std::cos(w1) - Q1.real() * std::sin(w1));
  const double y1 = amp * (P1.real() * std::sin(w1) + Q1.real() * std::cos(w1));
  out.j = j0;
  out.y = y0;
  out.j_prime = nu / z * j0 - j1;
  out.y_prime = nu / z * y0 - y1;
  return true;
}

// Temme series (z < 2) or Steed's CF2 (z >= 2) for the reduced order,
// CF1 for J'/J, recurrences for the requested order.
void bessel_steed(double nu, double z, CylinderEval& out) {
  constexpr double kXmin = 2.0;
  constexpr int kMaxIt = 2000000;
  const int nl = (z < kXmin) ? static_cast<int>(nu + 0.5)
                             : std::max(0, static_cast<int>(nu - z + 1.5));
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / z;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / kPi;

  int isign = 1;
  double h = nu * xi;
  if (h < kFpMin) h = kFpMin;
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int i = 0;
  for (; i < kMaxIt; ++i) {
    b += xi2;
    d = b - d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  if (i >= kMaxIt) throw ConvergenceError("bessel_eval: CF1 did not converge");

  double rjl = isign * kFpMin;
  double rjpl = h * rjl;
  const double rjl1 = rjl;
  const double rjp1 = rjpl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
  }
  // (rjl, rjpl) is proportional to (J_xmu, J'_xmu); the scale comes from the
  // Wronskian without dividing by rjl, which vanishes at zeros of J_xmu.
  const double nrm = std::max(std::fabs(rjl), std::fabs(rjpl));
  rjl /= nrm;
  rjpl /= nrm;

  double scale, rymu, rymup, ry1;
  if (z < kXmin) {
    const double x2 = 0.5 * z;
    const double pimu = kPi * xmu;
    const double fct = (std::fabs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    double dd = -std::log(x2);
    double e = xmu * dd;
    const double fct2 = (std::fabs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    double g1, g2, gp, gm;
    temme_gammas(xmu, g1, g2, gp, gm);
    double ff = 2.0 / kPi * fct * (g1 * std::cosh(e) + g2 * fct2 * dd);
    e = std::exp(e);
    double p = e / (gp * kPi);
    double q = 1.0 / (e * kPi * gm);
    const double pimu2 = 0.5 * pimu;
    const double fct3 = (std::fabs(pimu2) < kEps) ? 1.0 : std::sin(pimu2) / pimu2;
    const double r = kPi * pimu2 * fct3 * fct3;
    double cc = 1.0;
    dd = -x2 * x2;
    double sum = ff + r * q;
    double sum1 = p;
    int k = 1;
    for (; k < kMaxIt; ++k) {
      ff = (k * ff + p + q) / (k * static_cast<double>(k) - xmu2);
      cc *= dd / k;
      p /= (k - xmu);
      q /= (k + xmu);
      const double del = cc * (ff + r * q);
      sum += del;
      const double del1 = cc * p - k * del;
      sum1 += del1;
      if (std::fabs(del) < (1.0 + std::fabs(sum)) * kEps) break;
    }
    if (k >= kMaxIt) throw ConvergenceError("bessel_eval: Temme series did not converge");
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = xmu * xi * rymu - ry1;
    scale = w / (rjl * rymup - rjpl * rymu);
  } else {
    double a = 0.25 - xmu2;
    double p = -0.5 * xi;
    double q = 1.0;
    const double br = 2.0 * z;
    double bi = 2.0;
    double fct = a * xi / (p * p + q * q);
    double cr = br + q * fct;
    double ci = bi + p * fct;
    double den = br * br + bi * bi;
    double dr = br / den;
    double di = -bi / den;
    double dlr = cr * dr - ci * di;
    double dli = cr * di + ci * dr;
    double temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    int k = 1;
    for (; k < kMaxIt; ++k) {
      a += 2 * k;
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::fabs(dr) + std::fabs(di) < kFpMin) dr = kFpMin;
      fct = a / (cr * cr + ci * ci);
      cr = br + cr * fct;
      ci = bi - ci * fct;
      if (std::fabs(cr) + std::fabs(ci) < kFpMin) cr = kFpMin;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      temp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = temp;
      if (std::fabs(dlr - 1.0) + std::fabs(dli) < kEps) break;
    }
    if (k >= kMaxIt) throw ConvergenceError("bessel_eval: CF2 did not converge");
    const double t = p * rjl - rjpl;
    scale = std::sqrt(w / (t * t / q + q * rjl * rjl));
    rymu = scale * t / q;
    rymup = p * rymu + q * scale * rjl;
    ry1 = xmu * xi * rymu - rymup;
  }
  out.j = (rjl1 / nrm) * scale;
  out.j_prime = (rjp1 / nrm) * scale;
  for (int l = 1; l <= nl; ++l) {
    const double rytemp = (xmu + l) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = rytemp;
  }
  out.y = rymu;
  out.y_prime = nu * xi * rymu - ry1;
}

}  // namespace

CylinderEval bessel_eval(double nu, double z) {
  if (!(z > 0.0) || !(z <= 1e4)) throw DomainError("bessel_eval: argument outside (0, 1e4]");
  if (!(nu >= 0.0) || !(nu <= 50.0)) throw DomainError("bessel_eval: order outside [0, 50]");
  CylinderEval out{nu, z, 0.0, 0.0, 0.0, 0.0};
  if (z >= hankel_threshold(nu * nu) && bessel_hankel(nu, z, out)) return out;
  bessel_steed(nu, z, out);
  return out;
}

namespace {

// J_{is}(z) and J_{is+1}(z) by Miller backward recurrence normalized with
// the Neumann series. cond receives sum|terms|/|sum| of that series; the
// relative error of the result is about cond * 1e-16.
void imag_order_miller(double s, double z, cplx& j0, cplx& j1, double& cond) {
  const cplx nu(0.0, s);
  // Start index: past the turning point, far enough that |J_N| < 1e-20
  // relative to the O(1) values near n ~ z.
  const double base = std::max(z, s) + 10.0;
  int n_start = static_cast<int>(base);
  for (;; ++n_start) {
    const double n = n_start;
    const double logj = n * std::log(std::max(z, 1e-300) * std::numbers::e / (2.0 * n)) -
                        0.5 * std::log(2.0 * kPi * n);
    if (logj < -46.0) break;
    if (n_start > 10000000) throw ConvergenceError("bessel_j_imag_order: start index");
  }
  n_start += 8;

  cplx f_next = 0.0;   // f_{n+1}
  cplx f_cur = 1e-30;  // f_n
  cplx f1 = 0.0;
  cplx norm = 0.0;
  const double rz = 2.0 / z;
  // Coefficients (nu + 2k) Gamma(nu + k)/k! for k >= 1 are accumulated by
  // recurrence from c_1 = Gamma(nu + 1); the k = 0 weight is Gamma(nu + 1).
  // They are needed in increasing k while the recurrence runs downward, so
  // the even-indexed f values are stored.
  std::vector<cplx> f_even(static_cast<std::size_t>(n_start / 2 + 2));
  std::vector<double> f_scale_exp(f_even.size(), 0.0);
  double log_scale = 0.0;  // accumulated rescaling (natural log)
  for (int n = n_start; n >= 0; --n) {
    if (n % 2 == 0) {
      f_even[static_cast<std::size_t>(n / 2)] = f_cur;
      f_scale_exp[static_cast<std::size_t>(n / 2)] = log_scale;
    }
    if (n == 0) break;
    const cplx f_prev = rz * (nu + static_cast<double>(n)) * f_cur - f_next;
    f_next = f_cur;
    f_cur = f_prev;
    const double mag = std::abs(f_cur);
    if (mag > 1e250) {
      f_cur *= 1e-250;
      f_next *= 1e-250;
      log_scale += 250.0 * std::log(10.0);
    }
  }
  f1 = f_next;
  const cplx g1 = gamma_complex(nu + 1.0);
  norm = g1 * f_even[0];
  double abs_sum = std::abs(norm);
  cplx ck = g1;  // Gamma(nu + k)/k!, k = 1
  for (std::size_t k = 1; k < f_even.size(); ++k) {
    if (k > 1) ck *= (nu + static_cast<double>(k) - 1.0) / static_cast<double>(k);
    const double rel = f_scale_exp[k] - log_scale;
    if (rel < -700.0) continue;
    const cplx term = (nu + 2.0 * static_cast<double>(k)) * ck * f_even[k] * std::exp(rel);
    norm += term;
    abs_sum += std::abs(term);
  }
  cond = abs_sum / std::abs(norm);
  const cplx zpow = std::exp(nu * std::log(0.5 * z));
  j0 = zpow * f_even[0] / norm;
  j1 = zpow * f1 / norm;
}

bool imag_order_hankel(double s, double z, cplx& j0, cplx& j1) {
  const cplx nu(0.0, s);
  cplx P0, Q0, P1, Q1;
  if (!hankel_pq(nu, z, P0, Q0) || !hankel_pq(nu + 1.0, z, P1, Q1)) return false;
  const double amp = std::sqrt(2.0 / (kPi * z));
  const cplx w0 = z - (0.5 * nu + 0.25) * kPi;
  const cplx w1 = w0 - 0.5 * kPi;
  j0 = amp * (P0 * std::cos(w0) - Q0 * std::sin(w0));
  j1 = amp * (P1 * std::cos(w1) - Q1 * std::sin(w1));
  return true;
}

// H1'/H1 for order i s by the Steed-Temme continued fraction
//   -1/(2z) + i + (i/z) a_1/(b_1 + a_2/(b_2 + ...)),
//   a_k = (2k-1)^2/4 + s^2,  b_k = 2(z + i k).
// Converges for z >= 2.
cplx imag_order_cf2(double s, double z) {
  constexpr double kTiny = 1e-300;
  cplx f = kTiny, c = f, d = 0.0;
  for (int k = 1; k <= 1000000; ++k) {
    const double a = 0.25 * (2.0 * k - 1.0) * (2.0 * k - 1.0) + s * s;
    const cplx b(2.0 * z, 2.0 * k);
    d = b + a * d;
    if (d == 0.0) d = kTiny;
    c = b + a / c;
    if (c == 0.0) c = kTiny;
    d = 1.0 / d;
    const cplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return cplx(-0.5 / z, 1.0) + cplx(0.0, 1.0 / z) * f;
  }
  throw ConvergenceError("bessel_eval_imag: CF2 did not converge");
}

// 20-point Gauss-Legendre rule on [-1, 1].
struct GaussRule20 {
  std::array<double, 20> x{}, w{};
  GaussRule20() {
    constexpr int n = 20;
    for (int i = 0; i < n; ++i) {
      double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
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
      x[i] = t;
      w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

CylinderEval imag_pair_from_j(double s, double z, cplx j0, cplx j1) {
  const cplx jp = cplx(0.0, s) / z * j0 - j1;
  const double ch = std::cosh(0.5 * kPi * s);
  const double sh = std::sinh(0.5 * kPi * s);
  return CylinderEval{s, z, j0.real() / ch, j0.imag() / sh, jp.real() / ch, jp.imag() / sh};
}

}  // namespace

void bessel_j_imag_order(double s, double z, cplx& j0, cplx& j1) {
  if (!(z > 0.0)) throw DomainError("bessel_j_imag_order: argument must be positive");
  if (z >= hankel_threshold(s * s) && imag_order_hankel(s, z, j0, j1)) return;
  double cond = 0.0;
  imag_order_miller(s, z, j0, j1, cond);
}

CylinderEval bessel_eval_imag(double s, double z) {
  if (!(z > 0.0) || !(z <= 1e4)) throw DomainError("bessel_eval_imag: argument outside (0, 1e4]");
  if (!(s >= 0.0) || !(s <= 50.0)) throw DomainError("bessel_eval_imag: order outside [0, 50]");
  if (s < 1e-6) {
    CylinderEval r = bessel_eval(0.0, z);
    r.order = s;
    return r;
  }
  cplx j0, j1;
  if (z >= hankel_threshold(s * s) && imag_order_hankel(s, z, j0, j1))
    return imag_pair_from_j(s, z, j0, j1);
  double cond = 0.0;
  imag_order_miller(s, z, j0, j1, cond);
  if (cond <= 30.0) return imag_pair_from_j(s, z, j0, j1);

  // Phase-amplitude continuation. h = F + i G = e^{-pi s/2} H1_{is}(z)
  // satisfies |h|^2 = 2/(pi z Im g) and d(arg h)/dz = Im g with g = H1'/H1,
  // so only the phase needs to be carried from a well-conditioned start.
  double za = std::max(2.0, 0.5 * s);
  imag_order_miller(s, za, j0, j1, cond);
  while (cond > 30.0 && za > 2.0) {
    za = std::max(2.0, 0.5 * za);
    imag_order_miller(s, za, j0, j1, cond);
  }
  if (cond > 1e3) throw ConvergenceError("bessel_eval_imag: no well-conditioned start");
  const CylinderEval start = imag_pair_from_j(s, za, j0, j1);
  double phase = std::atan2(start.y, start.j);
  static const GaussRule20 rule;
  double lo = za;
  while (lo < z) {
    const double hi = std::min(z, 1.5 * lo);
    const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int i = 0; i < 20; ++i) acc += rule.w[i] * imag_order_cf2(s, mid + half * rule.x[i]).imag();
    phase += half * acc;
    lo = hi;
  }
  const cplx g = imag_order_cf2(s, z);
  const cplx h = std::polar(std::sqrt(2.0 / (kPi * z * g.imag())), phase);
  const cplx hp = g * h;
  return CylinderEval{s, z, h.real(), h.imag(), hp.real(), hp.imag()};
}

// ---------------------------------------------------------- Hypergeometric

void hyp2f1_regularized(cplx a, cplx b, cplx c, cplx z, cplx& f, cplx& df, double* cond) {
  if (!(std::abs(z) < 1.0)) throw DomainError("hyp2f1_regularized: |z| must be < 1");
  int k0 = 0;
  cplx t;
  if (is_nonpositive_integer(c)) {
    // Leading terms vanish; the series starts at k0 = 1 - c.
    k0 = static_cast<int>(1.0 - c.real());
    t = 1.0;
    for (int k = 0; k < k0; ++k) t *= (a + static_cast<double>(k)) * (b + static_cast<double>(k)) * z / static_cast<double>(k + 1);
  } else {
    t = rgamma_complex(c);
  }
  if (z == 0.0) {
    f = (k0 == 0) ? t : 0.0;
    df = a * b * rgamma_complex(c + 1.0);
    if (cond) *cond = 1.0;
    return;
  }
  cplx sum = 0.0;
  cplx dsum = 0.0;  // sum of k t_k, divided by z at the end
  double maxabs = 0.0;
  int quiet = 0;
  for (int k = k0; k < kMaxSeriesTerms; ++k) {
    sum += t;
    dsum += static_cast<double>(k) * t;
    const double at = std::abs(t);
    maxabs = std::max(maxabs, at);
    const cplx ratio = (a + static_cast<double>(k)) * (b + static_cast<double>(k)) * z /
                       (static_cast<double>(k + 1) * (c + static_cast<double>(k)));
    t *= ratio;
    if (t == 0.0) {
      quiet = 2;
    } else if (std::abs(ratio) < 1.0) {
      const double a_next = std::abs(t);
      const bool small_f = a_next <= 1e-17 * std::abs(sum);
      const bool small_d = a_next * (k + 1) <= 1e-17 * std::abs(dsum);
      quiet = (small_f && small_d) ? quiet + 1 : 0;
    } else {
      quiet = 0;
    }
    if (quiet >= 2) {
      f = sum;
      df = dsum / z;
      if (cond) *cond = (std::abs(sum) > 0.0) ? maxabs / std::abs(sum) : 1.0;
      return;
    }
  }
  throw ConvergenceError("hyp2f1_regularized: term cap reached");
}

// ---------------------------------------------------------------- Legendre

namespace {

struct PEval {
  cplx p, dp;
  double cond;
};

// P^{-mu}_nu(x) from one of two Pfaff forms in w = (x-1)/(x+1):
//   A: w^{mu/2} ((1+x)/2)^nu       F(mu-nu, -nu; 1+mu; w)/G(1+mu)
//   B: w^{mu/2} ((1+x)/2)^{-nu-1}  F(nu+1, 1+mu+nu; 1+mu; w)/G(1+mu)
PEval legendre_p_form(double nu, cplx mu, double x, double xm1, bool form_b) {
  const double xp1 = x + 1.0;
  const double w = xm1 / xp1;
  const double lhalf = std::log(0.5 * xp1);
  const cplx logw_half = 0.5 * mu * (std::log(xm1) - std::log(xp1));
  cplx f, df;
  double cond = 1.0;
  cplx pref;
  cplx dlogpref;
  if (!form_b) {
    hyp2f1_regularized(mu - nu, -nu, 1.0 + mu, w, f, df, &cond);
    pref = std::exp(logw_half + nu * lhalf);
    dlogpref = mu / (xm1 * xp1) + nu / xp1;
  } else {
    hyp2f1_regularized(nu + 1.0, 1.0 + mu + nu, 1.0 + mu, w, f, df, &cond);
    pref = std::exp(logw_half - (nu + 1.0) * lhalf);
    dlogpref = mu / (xm1 * xp1) - (nu + 1.0) / xp1;
  }
  const double dwdx = 2.0 / (xp1 * xp1);
  return PEval{pref * f, pref * (dlogpref * f + df * dwdx), cond};
}

PEval legendre_p_best(double nu, cplx mu, double x, double xm1) {
  if (nu < -0.5) nu = -nu - 1.0;
  const double w = xm1 / (x + 1.0);
  PEval best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  bool have = false;
  // Form B needs about 40/(1 - w) terms, affordable for x up to 1e4.
  if (w <= 0.9999) {
    try {
      best = legendre_p_form(nu, mu, x, xm1, true);
      have = true;
      if (best.cond < 10.0) return best;
    } catch (const ConvergenceError&) {
    }
  }
  try {
    PEval a = legendre_p_form(nu, mu, x, xm1, false);
    if (!have || a.cond < best.cond) best = a;
    have = true;
  } catch (const ConvergenceError&) {
    if (!have) throw;
  }
  return best;
}

struct QEval {
  cplx q, dq;
  double err;  // estimated relative error
};

// Q from the 1/x^2 series.
QEval olver_q_large_x(double nu, cplx mu, double x, double xm1) {
  const double z = 1.0 / (x * x);
  cplx f, df;
  double cond = 1.0;
  hyp2f1_regularized(0.5 * nu + 0.5 * mu + 1.0, 0.5 * nu + 0.5 * mu + 0.5, nu + 1.5, z, f, df, &cond);
  const double x2m1 = xm1 * (x + 1.0);
  const cplx logpref = 0.5 * std::log(kPi) + 0.5 * mu * std::log(x2m1) -
                       (nu + 1.0) * std::log(2.0) - (nu + mu + 1.0) * std::log(x);
  const cplx pref = std::exp(logpref);
  const cplx dlogpref = mu * x / x2m1 - (nu + mu + 1.0) / x;
  const double dzdx = -2.0 / (x * x * x);
  return QEval{pref * f, pref * (dlogpref * f + df * dzdx), cond * 1e-16};
}

// Q from the connection formula at a point mu away from the integers.
QEval olver_q_connection(double nu, cplx mu, double x, double xm1) {
  const PEval pm = legendre_p_best(nu, -mu, x, xm1);  // P^{mu}
  const PEval pp = legendre_p_best(nu, mu, x, xm1);   // P^{-mu}
  const cplx r1 = rgamma_complex(nu + mu + 1.0);
  const cplx r2 = rgamma_complex(nu - mu + 1.0);
  const cplx pre = kPi / (2.0 * sin_pi(mu));
  const cplx t1 = pm.p * r1;
  const cplx t2 = pp.p * r2;
  const cplx q = pre * (t1 - t2);
  const cplx dq = pre * (pm.dp * r1 - pp.dp * r2);
  const double big = std::max(std::abs(t1), std::abs(t2));
  const double diff = std::abs(t1 - t2);
  const double cancel = (diff > 0.0) ? big / diff : std::numeric_limits<double>::infinity();
  return QEval{q, dq, 1e-16 * cancel * std::max(pm.cond, pp.cond)};
}

QEval olver_q_small_x(double nu, cplx mu, double x, double xm1) {
  const double n = std::round(mu.real());
  const cplx off = mu - n;
  if (std::abs(off) >= 0.1) return olver_q_connection(nu, mu, x, xm1);
  // Cauchy mean over |zeta - n| = r; Q is entire in mu.
  constexpr int kPoints = 48;
  constexpr double kRadius = 0.3;
  cplx q = 0.0, dq = 0.0;
  double err = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    const double th = 2.0 * kPi * (k + 0.5) / kPoints;
    const cplx e = std::polar(kRadius, th);
    const cplx zeta = n + e;
    const QEval v = olver_q_connection(nu, zeta, x, xm1);
    const cplx wgt = e / (e - off);
    q += v.q * wgt;
    dq += v.dq * wgt;
    err = std::max(err, v.err * std::abs(v.q));
  }
  q /= static_cast<double>(kPoints);
  dq /= static_cast<double>(kPoints);
  return QEval{q, dq, (std::abs(q) > 0.0) ? err / std::abs(q) : err};
}

}  // namespace

void legendre_p(double nu, cplx mu, double x, double xm1, cplx& p, cplx& dp) {
  if (!(xm1 > 0.0)) throw DomainError("legendre_p: x must exceed 1");
  const PEval r = legendre_p_best(nu, mu, x, xm1);
  p = r.p;
  dp = r.dp;
}

LegendreEval legendre_eval(double nu, cplx mu, double x, double xm1) {
  if (!(xm1 > 0.0) || !std::isfinite(x)) throw DomainError("legendre_eval: x must exceed 1");
  LegendreEval out{nu, mu, x, 0.0, 0.0, 0.0, 0.0};
  legendre_p(nu, mu, x, xm1, out.p, out.p_prime);

  // The 1/x^2 series needs about 40/log(x^2) terms times a slow factor.
  const double lz = 2.0 * std::log1p(xm1);
  const bool large_ok = lz * 2e5 > 40.0;
  QEval best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  if (large_ok) {
    try {
      best = olver_q_large_x(nu, mu, x, xm1);
    } catch (const ConvergenceError&) {
    }
  }
  if (best.err > 1e-14) {
    const QEval alt = olver_q_small_x(nu, mu, x, xm1);
    if (alt.err < best.err) best = alt;
  }
  if (!std::isfinite(best.err)) throw ConvergenceError("legendre_eval: no convergent route for Q");
  out.q = best.q;
  out.q_prime = best.dq;
  return out;
}

LegendreEval legendre_eval(double nu, cplx mu, double x) {
  return legendre_eval(nu, mu, x, x - 1.0);
}

}  // namespace branewave::specialfn
