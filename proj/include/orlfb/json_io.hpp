#pragma once

#include <string>

#include <json.hpp>

#include "orlfb/energy.hpp"
#include "orlfb/free_boundary.hpp"
#include "orlfb/mesh.hpp"
#include "orlfb/orlicz.hpp"
#include "orlfb/solver.hpp"
#include "orlfb/sweep.hpp"

namespace orlfb {

/// {"kind":"power","p":2.0} or {"kind":"sum_powers","terms":[[1.0,2.0],[1.0,4.0]]}
nlohmann::json nfunction_to_json(const NFunction& nf);
NFunction nfunction_from_json(const nlohmann::json& j);

/// {"dim":1|2, "domain":"interval"|"square"|"disc", "n":…, "extent":[…],
///  "R":…, "dirichlet":{"kind":"const"|"left_right"|"edges", …}}
Grid grid_from_json(const nlohmann::json& j);

SolveConfig solve_config_from_json(const nlohmann::json& j);

struct RunConfig {
  Grid grid;
  NFunction nf;
  PenaltyParams pp;
  SolveConfig solver;
};

/// {"grid":…, "nfunction":…, "eps":…, "alpha":…, "solver":{…}, "theta_pos":…}
RunConfig run_config_from_json(const nlohmann::json& j);

struct SweepConfig {
  Grid grid;
  NFunction nf;
  double alpha = 0.0;
  SweepOptions opts;
};

SweepConfig sweep_config_from_json(const nlohmann::json& j);

nlohmann::json breakdown_to_json(const EnergyBreakdown& b);
nlohmann::json solve_result_to_json(const SolveResult& r);
nlohmann::json fb_report_to_json(const FBReport& rep);
nlohmann::json sweep_summary_to_json(const SweepResult& s);

/// FB polyline CSV: "x,y,nux,nuy".
std::string fb_to_csv(const std::vector<FBPoint>& fb);

}  // namespace orlfb
