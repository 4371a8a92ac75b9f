#include "orlfb/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "orlfb/errors.hpp"

namespace orlfb {

using nlohmann::json;

json nfunction_to_json(const NFunction& nf) {
  json j;
  switch (nf.kind) {
    case NFunction::Kind::Power:
      j["kind"] = "power";
      j["p"] = nf.terms.front().second;
      break;
    case NFunction::Kind::SumPowers: {
      j["kind"] = "sum_powers";
      json terms = json::array();
      for (const auto& [a, p] : nf.terms) terms.push_back(json::array({a, p}));
      j["terms"] = terms;
      break;
    }
    case NFunction::Kind::Custom:
      throw InvalidParameter("nfunction_to_json: custom N-functions are not serializable");
  }
  return j;
}

NFunction nfunction_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power") return make_power(j.at("p").get<double>());
  if (kind == "sum_powers") {
    std::vector<std::pair<double, double>> terms;
    for (const auto& t : j.at("terms")) terms.emplace_back(t.at(0).get<double>(), t.at(1).get<double>());
    return make_sum_powers(terms);
  }
  throw InvalidParameter("nfunction_from_json: unknown kind '" + kind + "'");
}

Grid grid_from_json(const json& j) {
  const std::string domain = j.at("domain").get<std::string>();
  const int n = j.at("n").get<int>();
  const json& d = j.at("dirichlet");
  const std::string dk = d.at("kind").get<std::string>();

  if (domain == "interval") {
    double x0 = 0.0, x1 = 1.0;
    if (j.contains("extent")) {
      x0 = j["extent"].at(0).get<double>();
      x1 = j["extent"].at(1).get<double>();
    }
    double left = 0.0, right = 0.0;
    if (dk == "const") {
      left = right = d.at("value").get<double>();
    } else if (dk == "left_right") {
      left = d.at("left").get<double>();
      right = d.at("right").get<double>();
    } else {
      throw InvalidParameter("grid_from_json: interval dirichlet kind must be const or left_right");
    }
    return Grid::interval(x0, x1, n, left, right);
  }

  if (domain == "square") {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (j.contains("extent")) {
      x0 = j["extent"].at(0).get<double>();
      x1 = j["extent"].at(1).get<double>();
      y0 = j["extent"].at(2).get<double>();
      y1 = j["extent"].at(3).get<double>();
    }
    std::function<double(Vec2)> phi;
    if (dk == "const") {
      const double v = d.at("value").get<double>();
      phi = [v](Vec2) { return v; };
    } else if (dk == "edges") {
      const double l = d.at("left").get<double>();
      const double r = d.at("right").get<double>();
      const double b = d.at("bottom").get<double>();
      const double t = d.at("top").get<double>();
      const double tol = 1e-12 * std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1.0});
      phi = [=](Vec2 p) {
        if (std::abs(p.x - x0) <= tol) return l;
        if (std::abs(p.x - x1) <= tol) return r;
        if (std::abs(p.y - y0) <= tol) return b;
        return t;
      };
    } else {
      throw InvalidParameter("grid_from_json: square dirichlet kind must be const or edges");
    }
    return Grid::square(x0, x1, y0, y1, n, phi);
  }

  if (domain == "disc") {
    const double R = j.at("R").get<double>();
    if (dk != "const") throw InvalidParameter("grid_from_json: disc dirichlet kind must be const");
    const double v = d.at("value").get<double>();
    return Grid::disc(R, n, [v](Vec2) { return v; });
  }
  throw InvalidParameter("grid_from_json: unknown domain '" + domain + "'");
}

SolveConfig solve_config_from_json(const json& j) {
  SolveConfig c;
  if (j.contains("s_grad_init")) c.s_grad_init = j["s_grad_init"].get<double>();
  if (j.contains("s_vol_init")) c.s_vol_init = j["s_vol_init"].get<double>();
  if (j.contains("continuation_factor")) c.continuation_factor = j["continuation_factor"].get<double>();
  if (j.contains("s_grad_min")) c.s_grad_min = j["s_grad_min"].get<double>();
  if (j.contains("s_vol_min")) c.s_vol_min = j["s_vol_min"].get<double>();
  if (j.contains("max_outer")) c.max_outer = j["max_outer"].get<int>();
  if (j.contains("max_inner")) c.max_inner = j["max_inner"].get<int>();
  if (j.contains("armijo_c")) c.armijo_c = j["armijo_c"].get<double>();
  if (j.contains("grad_tol")) c.grad_tol = j["grad_tol"].get<double>();
  if (j.contains("rng_seed")) c.rng_seed = j["rng_seed"].get<std::uint64_t>();
  if (j.contains("restarts")) c.restarts = j["restarts"].get<int>();
  if (j.contains("polish")) c.polish = j["polish"].get<bool>();
  if (j.contains("theta_pos")) c.theta_pos = j["theta_pos"].get<double>();
  if (j.contains("init")) {
    const std::string s = j["init"].get<std::string>();
    if (s == "gEllipticExtend")
      c.init = InitStrategy::GEllipticExtend;
    else if (s == "linearDecay")
      c.init = InitStrategy::LinearDecay;
    else
      throw InvalidParameter("solve_config_from_json: unknown init '" + s + "'");
  }
  return c;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig rc{grid_from_json(j.at("grid")), nfunction_from_json(j.at("nfunction")),
               PenaltyParams{j.at("eps").get<double>(), j.at("alpha").get<double>()},
               j.contains("solver") ? solve_config_from_json(j["solver"]) : SolveConfig{}};
  if (j.contains("theta_pos")) rc.solver.theta_pos = j["theta_pos"].get<double>();
  return rc;
}

SweepConfig sweep_config_from_json(const json& j) {
  SweepConfig sc{grid_from_json(j.at("grid")), nfunction_from_json(j.at("nfunction")),
                 j.at("alpha").get<double>(), {}};
  sc.opts.eps_list = j.at("eps_list").get<std::vector<double>>();
  if (j.contains("solver")) sc.opts.solver = solve_config_from_json(j["solver"]);
  if (j.contains("theta_pos")) sc.opts.solver.theta_pos = j["theta_pos"].get<double>();
  if (j.contains("warm_start")) sc.opts.warm_start = j["warm_start"].get<bool>();
  if (j.contains("feasible_guard")) sc.opts.feasible_guard = j["feasible_guard"].get<bool>();
  if (j.contains("timing")) {
    const std::string t = j["timing"].get<std::string>();
    if (t == "wall")
      sc.opts.timing = true;
    else if (t == "none")
      sc.opts.timing = false;
    else
      throw InvalidParameter("sweep_config_from_json: timing must be 'wall' or 'none'");
  }
  if (j.contains("vol_tol")) sc.opts.vol_tol = j["vol_tol"].get<double>();
  return sc;
}

json breakdown_to_json(const EnergyBreakdown& b) {
  return json{{"J", b.dirichlet_energy}, {"volume", b.volume}, {"penalty", b.penalty},
              {"J_eps", b.total}};
}

json solve_result_to_json(const SolveResult& r) {
  json j;
  j["breakdown"] = breakdown_to_json(r.breakdown);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["stationarity"] = r.stationarity;
  j["energy_monotone"] = r.energy_monotone;
  j["lambda_estimate"] = r.lambda_estimate;
  j["lambda_cv"] = r.lambda_cv;
  return j;
}

namespace {
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

json fb_report_to_json(const FBReport& rep) {
  json j;
  j["theta_pos"] = rep.theta_pos;
  json pts = json::array();
  for (const auto& q : rep.fb)
    pts.push_back(json{{"x", q.p.x}, {"y", q.p.y}, {"nux", q.nu.x}, {"nuy", q.nu.y}});
  j["fb_points"] = pts;
  j["lambda"] = {{"samples", rep.lambda.samples},
                 {"mean", rep.lambda.mean},
                 {"cv", rep.lambda.cv},
                 {"skipped", rep.lambda.skipped},
                 {"d_sensitivity", {{"h", rep.lambda_d_h}, {"3h", rep.lambda_d_3h}}}};
  j["q_u_mean"] = rep.q_u_mean;
  j["radii"] = rep.radii;
  json dens = json::array();
  for (const auto& row : rep.density) {
    json r = json::array();
    for (double v : row) r.push_back(finite_or_null(v));
    dens.push_back(r);
  }
  j["density_ratios"] = dens;
  json nda = json::array();
  for (const auto& row : rep.nondegeneracy) {
    json r = json::array();
    for (double v : row) r.push_back(finite_or_null(v));
    nda.push_back(r);
  }
  j["nondegeneracy"] = nda;
  json bu = json::array();
  for (size_t i = 0; i < rep.blowup.size(); ++i) {
    json fits = json::array();
    for (const auto& f : rep.blowup[i])
      fits.push_back(json{{"rho", f.rho},
                          {"lambda", f.lambda},
                          {"nux", f.nu.x},
                          {"nuy", f.nu.y},
                          {"residual", finite_or_null(f.residual)},
                          {"stencil_used", f.stencil_used}});
    bu.push_back(json{{"point_index", rep.blowup_points[i]}, {"fits", fits}});
  }
  j["blowup"] = bu;
  j["phi_average"] = rep.phi_avg;
  return j;
}

json sweep_summary_to_json(const SweepResult& s) {
  json j;
  j["alpha"] = s.alpha;
  j["vol_tol"] = s.vol_tol;
  j["eps0"] = s.eps0 ? json(*s.eps0) : json(nullptr);
  j["penalty_constant"] = s.penalty_constant ? json(*s.penalty_constant) : json(nullptr);
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back(json{{"eps", r.eps},
                        {"volume", finite_or_null(r.volume)},
                        {"lambda_mean", finite_or_null(r.lambda_mean)},
                        {"lambda_cv", finite_or_null(r.lambda_cv)},
                        {"J", finite_or_null(r.J)},
                        {"J_eps", finite_or_null(r.J_eps)},
                        {"converged", r.converged},
                        {"iterations", r.iterations},
                        {"wall_time", r.wall_time}});
  j["rows"] = rows;
  return j;
}

std::string fb_to_csv(const std::vector<FBPoint>& fb) {
  std::string out = "x,y,nux,nuy\n";
  char buf[160];
  for (const auto& q : fb) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", q.p.x, q.p.y, q.nu.x, q.nu.y);
    out += buf;
  }
  return out;
}

}  // namespace orlfb
