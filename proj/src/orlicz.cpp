#include "orlfb/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orlfb/errors.hpp"
#include "orlfb/numerics.hpp"

namespace orlfb {

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InvalidParameter("log_grid: need 0 < lo < hi, n >= 2");
  std::vector<double> out(static_cast<size_t>(n));
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

NFunction make_power(double p) {
  if (!(p > 1.0)) throw InvalidParameter("make_power: requires p > 1");
  NFunction nf;
  nf.g = [p](double t) { return std::pow(t, p - 1.0); };
  nf.g_prime = [p](double t) { return (p - 1.0) * std::pow(t, p - 2.0); };
  nf.G = [p](double t) { return std::pow(t, p) / p; };
  nf.g_inv_closed = [p](double y) { return std::pow(y, 1.0 / (p - 1.0)); };
  nf.delta = p - 1.0;
  nf.g0 = p - 1.0;
  nf.label = "power(p=" + std::to_string(p) + ")";
  nf.kind = NFunction::Kind::Power;
  nf.terms = {{1.0, p}};
  return nf;
}

NFunction make_sum_powers(const std::vector<std::pair<double, double>>& coeffs) {
  if (coeffs.empty()) throw InvalidParameter("make_sum_powers: empty coefficient list");
  for (const auto& [a, p] : coeffs) {
    if (!(a > 0.0)) throw InvalidParameter("make_sum_powers: coefficients must be positive");
    if (!(p > 1.0)) throw InvalidParameter("make_sum_powers: exponents must exceed 1");
  }
  NFunction nf;
  auto terms = coeffs;
  nf.g = [terms](double t) {
    double s = 0.0;
    for (const auto& [a, p] : terms) s += a * std::pow(t, p - 1.0);
    return s;
  };
  nf.g_prime = [terms](double t) {
    double s = 0.0;
    for (const auto& [a, p] : terms) s += a * (p - 1.0) * std::pow(t, p - 2.0);
    return s;
  };
  nf.G = [terms](double t) {
    double s = 0.0;
    for (const auto& [a, p] : terms) s += a * std::pow(t, p) / p;
    return s;
  };
  double pmin = coeffs.front().second;
  double pmax = pmin;
  for (const auto& [a, p] : coeffs) {
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  nf.delta = pmin - 1.0;
  nf.g0 = pmax - 1.0;
  nf.label = "sum_powers(" + std::to_string(coeffs.size()) + " terms)";
  nf.kind = NFunction::Kind::SumPowers;
  nf.terms = coeffs;
  // The analytic constants are a weighted-mean argument; cross-check by sampling.
  const auto rep = verify_condition(nf, 1e-3, 1e3, 200);
  if (!rep.ok)
    throw PropertyViolation("make_sum_powers: sampled t g'/g leaves [" + std::to_string(nf.delta) +
                            ", " + std::to_string(nf.g0) + "]");
  return nf;
}

NFunction make_custom(std::function<double(double)> g, std::function<double(double)> g_prime,
                      std::function<double(double)> G, double delta, double g0,
                      std::string label) {
  if (!(delta > 0.0) || !(g0 >= delta)) throw InvalidParameter("make_custom: need 0 < delta <= g0");
  NFunction nf;
  nf.g = std::move(g);
  nf.g_prime = std::move(g_prime);
  nf.G = std::move(G);
  nf.delta = delta;
  nf.g0 = g0;
  nf.label = std::move(label);
  nf.kind = NFunction::Kind::Custom;
  return nf;
}

double g_inverse(const NFunction& nf, double y) {
  if (!(y >= 0.0)) throw InvalidParameter("g_inverse: y must be >= 0");
  if (y == 0.0) return 0.0;
  if (nf.g_inv_closed) return (*nf.g_inv_closed)(y);

  constexpr double t_max = 1e15;
  double hi = 1.0;
  while (nf.g(hi) < y) {
    hi *= 2.0;
    if (hi > t_max) throw RangeError("g_inverse: no bracket within [0, 1e15]");
  }
  double lo = (hi == 1.0) ? 0.0 : 0.5 * hi;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (nf.g(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    const double gp = nf.g_prime(t);
    if (!(gp > 0.0) || !std::isfinite(gp)) break;
    const double tn = t - (nf.g(t) - y) / gp;
    if (!(tn >= lo) || !(tn <= hi)) break;
    t = tn;
  }
  return t;
}

double G_tilde(const NFunction& nf, double t) {
  if (!(t >= 0.0)) throw InvalidParameter("G_tilde: t must be >= 0");
  if (t == 0.0) return 0.0;
  // Substituting s = t tau^4 removes the root-type singularity of g^{-1} at
  // the origin (the transformed integrand vanishes at least like tau^3).
  return adaptive_simpson(
      [&nf, t](double tau) { return 4.0 * t * tau * tau * tau * g_inverse(nf, t * tau * tau * tau * tau); },
      0.0, 1.0, 1e-8);
}

double phi(const NFunction& nf, double t) {
  if (!(t >= 0.0)) throw InvalidParameter("phi: t must be >= 0");
  if (t == 0.0) return 0.0;
  return nf.g(t) * t - nf.G(t);
}

ConditionReport verify_condition(const NFunction& nf, double t_lo, double t_hi, int n) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || n < 2)
    throw InvalidParameter("verify_condition: need 0 < t_lo < t_hi and n >= 2");
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = -std::numeric_limits<double>::infinity();
  for (double t : log_grid(t_lo, t_hi, n)) {
    const double r = t * nf.g_prime(t) / nf.g(t);
    if (!std::isfinite(r)) throw NumericError("verify_condition: non-finite ratio at t=" + std::to_string(t));
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  constexpr double tol = 1e-9;
  return {rmin, rmax, rmin >= nf.delta - tol && rmax <= nf.g0 + tol};
}

GPropertyReport check_g_properties(const NFunction& nf, std::span<const double> s_grid,
                                   std::span<const double> t_grid) {
  if (s_grid.empty() || t_grid.empty())
    throw InvalidParameter("check_g_properties: empty sample grid");
  GPropertyReport rep;
  rep.g1_margin = -std::numeric_limits<double>::infinity();
  rep.g3_margin = -std::numeric_limits<double>::infinity();
  constexpr double tiny = 1e-300;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw InvalidParameter("check_g_properties: grids must be positive");
    const double gt = nf.g(t);
    const double Gt = nf.G(t);
    const double m3 = std::max(t * gt / (1.0 + nf.g0) - Gt, Gt - t * gt) / std::max(Gt, tiny);
    if (m3 > rep.g3_margin) rep.g3_margin = m3;
    for (double s : s_grid) {
      if (!(s > 0.0)) throw InvalidParameter("check_g_properties: grids must be positive");
      const double gst = nf.g(s * t);
      const double sa = std::pow(s, nf.delta);
      const double sb = std::pow(s, nf.g0);
      const double lo = std::min(sa, sb) * gt;
      const double hi = std::max(sa, sb) * gt;
      const double m1 = std::max(lo - gst, gst - hi) / std::max(gst, tiny);
      if (m1 > rep.g1_margin) {
        rep.g1_margin = m1;
        rep.witness_s = s;
        rep.witness_t = t;
      }
    }
  }
  constexpr double tol = 1e-9;
  rep.ok = rep.g1_margin <= tol && rep.g3_margin <= tol;
  return rep;
}

CondiReport check_condi(const NFunction& nf, double t0) {
  if (!(t0 > 0.0)) throw InvalidParameter("check_condi: t0 must be positive");
  constexpr int decades = 8;
  constexpr int per_decade = 16;
  double k_hat = nf.g(t0) / t0;
  double k_first = k_hat;
  double k_last = 0.0;
  for (int d = 0; d < decades; ++d) {
    double wmax = 0.0;
    for (int j = 1; j <= per_decade; ++j) {
      const double t = t0 * std::pow(10.0, -(d + static_cast<double>(j) / per_decade));
      const double v = nf.g(t) / t;
      if (!std::isfinite(v)) return {std::numeric_limits<double>::infinity(), false};
      wmax = std::max(wmax, v);
    }
    if (d == 0) k_first = std::max(k_first, wmax);
    if (d == decades - 1) k_last = wmax;
    k_hat = std::max(k_hat, wmax);
  }
  const bool divergent = k_last > 10.0 * std::max(k_first, 1e-300);
  return {k_hat, !divergent};
}

double luxemburg_norm(std::span<const double> values, std::span<const double> weights,
                      const NFunction& nf) {
  if (values.size() != weights.size() || values.empty())
    throw InvalidParameter("luxemburg_norm: values/weights size mismatch");
  double vmax = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw InvalidParameter("luxemburg_norm: negative weight");
    if (!std::isfinite(values[i])) throw InvalidParameter("luxemburg_norm: non-finite value");
    if (weights[i] > 0.0) vmax = std::max(vmax, std::abs(values[i]));
  }
  if (vmax == 0.0) return 0.0;

  auto S = [&](double k) {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i)
      if (weights[i] > 0.0) s += weights[i] * nf.G(std::abs(values[i]) / k);
    return s;
  };

  // S is strictly decreasing in k where positive, so a bracket always exists.
  double hi = vmax;
  for (int i = 0; i < 2000 && S(hi) > 1.0; ++i) hi *= 2.0;
  double lo = hi;
  for (int i = 0; i < 2000 && S(lo) < 1.0; ++i) lo *= 0.5;
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double s = S(mid);
    if (std::abs(s - 1.0) <= 1e-10 && hi - lo <= 1e-12 * hi) break;
    if (s > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return mid;
}

}  // namespace orlfb
