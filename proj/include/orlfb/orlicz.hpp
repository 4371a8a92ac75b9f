#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace orlfb {

/// An N-function pair (G, g) with g = G' strictly increasing, g(0+) = 0, and
/// structure constants delta <= t g'(t)/g(t) <= g0 for all t > 0.
///
/// Instances are immutable after construction and safe to share across
/// threads. Built-in constructors provide closed-form G (and g^{-1} where one
/// exists); the structure constants are set analytically and cross-checked by
/// sampling at construction time.
struct NFunction {
  enum class Kind { Power, SumPowers, Custom };

  std::function<double(double)> g;        ///< g(t) for t >= 0
  std::function<double(double)> g_prime;  ///< g'(t) for t > 0
  std::function<double(double)> G;        ///< G(t) for t >= 0, G' = g
  /// Closed-form inverse of g, when the constructor can provide one.
  std::optional<std::function<double(double)>> g_inv_closed;
  double delta = 0.0;  ///< lower structure constant, > 0
  double g0 = 0.0;     ///< upper structure constant, >= delta
  std::string label;

  Kind kind = Kind::Custom;
  /// Construction terms (a_i, p_i); a single (1, p) for Kind::Power.
  std::vector<std::pair<double, double>> terms;
};

/// g(t) = t^{p-1}, G(t) = t^p / p, delta = g0 = p - 1. Requires p > 1.
NFunction make_power(double p);

/// g(t) = sum a_i t^{p_i - 1} with delta = min p_i - 1, g0 = max p_i - 1.
/// Requires a nonempty list with all a_i > 0 and p_i > 1.
NFunction make_sum_powers(const std::vector<std::pair<double, double>>& coeffs);

/// Wraps user-supplied callables with declared structure constants. The
/// constants are taken on faith; use verify_condition to check them.
NFunction make_custom(std::function<double(double)> g, std::function<double(double)> g_prime,
                      std::function<double(double)> G, double delta, double g0,
                      std::string label);

/// Solves g(t) = y for t >= 0. Uses the closed-form inverse when available,
/// otherwise a geometrically grown bracket with bisection and a short Newton
/// polish. Returns 0 for y = 0; throws RangeError if no bracket exists below
/// t = 1e15.
double g_inverse(const NFunction& nf, double y);

/// G~(t) = integral_0^t g^{-1}(s) ds by adaptive quadrature (rtol 1e-8).
double G_tilde(const NFunction& nf, double t);

/// Phi(t) = g(t) t - G(t); nonnegative and nondecreasing by convexity of G.
double phi(const NFunction& nf, double t);

struct ConditionReport {
  double delta_hat = 0.0;  ///< min sampled t g'/g
  double g0_hat = 0.0;     ///< max sampled t g'/g
  bool ok = false;         ///< sampled range within [delta - tol, g0 + tol]
};

/// Samples t g'(t)/g(t) log-uniformly on [t_lo, t_hi] (n points) and checks
/// the declared constants. Throws NumericError on non-finite evaluations.
ConditionReport verify_condition(const NFunction& nf, double t_lo, double t_hi, int n);

struct GPropertyReport {
  double g1_margin = 0.0;  ///< worst relative violation of (g1); <= tol when ok
  double g3_margin = 0.0;  ///< worst relative violation of (g3)
  double witness_s = 0.0;  ///< (s, t) attaining the worst margin
  double witness_t = 0.0;
  bool ok = false;
};

/// Checks pointwise, within relative tolerance 1e-9, that
///   (g1)  min{s^delta, s^g0} g(t) <= g(st) <= max{s^delta, s^g0} g(t)
///   (g3)  t g(t)/(1 + g0) <= G(t) <= t g(t)
/// on the given positive sample grids.
GPropertyReport check_g_properties(const NFunction& nf, std::span<const double> s_grid,
                                   std::span<const double> t_grid);

struct CondiReport {
  double k_hat = 0.0;  ///< sup of g(t)/t over the sampled (0, t0]
  bool ok = false;     ///< false when g(t)/t diverges as t -> 0
};

/// Checks whether g(t) <= k t holds near zero: samples g(t)/t geometrically
/// down to 1e-8 t0 and flags divergence when the per-decade sup keeps growing
/// (by more than 10x between the first and last sampled decades).
CondiReport check_condi(const NFunction& nf, double t0);

/// Luxemburg norm of a weighted sample set: the k > 0 with
/// sum_i w_i G(|u_i|/k) = 1, located by bisection; 0 for the zero field.
double luxemburg_norm(std::span<const double> values, std::span<const double> weights,
                      const NFunction& nf);

/// n log-uniformly spaced points on [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace orlfb
