#pragma once

#include <vector>

#include "orlfb/mesh.hpp"
#include "orlfb/orlicz.hpp"

namespace orlfb {

/// A point on the zero level set with the inward unit normal (the direction
/// of increasing u, pointing into the positive phase).
struct FBPoint {
  Vec2 p;
  Vec2 nu;
};

struct FreeBoundary {
  std::vector<FBPoint> points;
};

/// Locates the interface of {u > theta_pos}: interpolated zero crossings in
/// 1D, marching-squares segment midpoints in 2D. Throws NoFreeBoundary when
/// the positivity set is empty or fills the domain.
FreeBoundary extract_fb(const ScalarField& f, double theta_pos);

struct LambdaStats {
  std::vector<double> samples;  ///< |grad u| at p + d*nu, one per usable FB point
  double mean = 0.0;
  double cv = 0.0;  ///< coefficient of variation
  int skipped = 0;  ///< FB points whose sample fell outside the domain
};

/// Samples |grad u| a distance d inside the positive phase from each FB
/// point. Requires d in [h, 5h].
LambdaStats estimate_lambda(const ScalarField& f, const FreeBoundary& fb, double d);

/// Fraction of the ball B_r(point) occupied by the positive phase, one entry
/// per radius; NaN where the ball leaves the domain. Ratios are relative to
/// the discrete ball measure, hence always in [0, 1].
std::vector<double> density_ratios(const ScalarField& f, Vec2 point, const std::vector<double>& radii,
                                   double theta_pos);

/// Nondegeneracy values v(r) = (1/r) (mean of u^gamma over B_r)^{1/gamma};
/// NaN where the ball leaves the domain.
std::vector<double> nondegeneracy(const ScalarField& f, Vec2 point, const std::vector<double>& radii,
                                  double gamma);

struct GrowthStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  std::vector<double> deciles;  ///< 0%, 10%, ..., 100% quantiles of u/dist
  int count = 0;
};

/// Ratios u(x)/dist(x, FB) over positive-phase nodes.
GrowthStats linear_growth(const ScalarField& f, const FreeBoundary& fb, double theta_pos);

struct BlowupFit {
  double rho = 0.0;
  double lambda = 0.0;      ///< fitted slope, > 0
  Vec2 nu;                  ///< fitted inward normal (toward the positive phase)
  double residual = 0.0;    ///< RMS misfit of u(p + rho x)/rho against lambda (x . nu)^+
  int stencil_used = 0;     ///< sample points that stayed inside the domain
  int stencil_total = 0;
};

/// Rescales u around an FB point at each scale rho and fits the half-plane
/// profile lambda (x . nu)^+ over the unit-ball stencil (closed-form slope for
/// a fixed direction; coarse angular sweep plus golden-section refinement for
/// the direction).
std::vector<BlowupFit> blowup_fit(const ScalarField& f, Vec2 point,
                                  const std::vector<double>& rho_list);

/// Mean over the positive-phase cells of B_r(point) of
/// (Phi(lambda_ref) - Phi(|grad u|))^+, one entry per radius.
std::vector<double> phi_average(const ScalarField& f, const NFunction& nf, Vec2 point,
                                const std::vector<double>& radii, double lambda_ref,
                                double theta_pos);

struct ResidualReport {
  std::vector<double> values;  ///< per node; NaN where not evaluated
  double sup = 0.0;
  int count = 0;
};

/// Discrete divergence of the flux g(|grad u|) grad u / |grad u| (the
/// energy-gradient form scaled by the node measure), evaluated at interior
/// nodes of the positive phase more than 3h from the free boundary whose
/// incident cells are all positive.
ResidualReport l_residual(const ScalarField& f, const NFunction& nf, double theta_pos);

struct AnalyzeOptions {
  double d = -1.0;                 ///< lambda sampling offset; auto: 2h
  std::vector<double> radii;       ///< auto: {4h, 8h, 16h}
  std::vector<double> rho_list;    ///< auto: {8h, 4h, 2h}
  double gamma = 1.0;
  int subsample = 24;              ///< FB points used for blow-up and Phi averages
};

struct FBReport {
  std::vector<FBPoint> fb;
  LambdaStats lambda;
  double lambda_d_h = 0.0;    ///< mean lambda at offset h (sensitivity)
  double lambda_d_3h = 0.0;   ///< mean lambda at offset 3h
  double q_u_mean = 0.0;      ///< g(lambda mean)
  std::vector<double> radii;
  std::vector<std::vector<double>> density;        ///< [point][radius]
  std::vector<std::vector<double>> nondegeneracy;  ///< [point][radius]
  std::vector<int> blowup_points;                  ///< indices into fb
  std::vector<std::vector<BlowupFit>> blowup;      ///< [sampled point][rho]
  std::vector<double> phi_avg;                     ///< per radius, mean over sampled points
  double theta_pos = 0.0;
};

/// Runs the full diagnostic battery on a field.
FBReport analyze(const ScalarField& f, const NFunction& nf, double theta_pos,
                 AnalyzeOptions opts = {});

}  // namespace orlfb
