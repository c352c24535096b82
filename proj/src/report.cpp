#include "srusk/report.hpp"

#include <algorithm>
#include <cmath>

namespace srusk {

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

nlohmann::json point_json(const UnifiedPoint& pt) {
  return {{"t", pt.t}, {"q", vec_json(pt.q)}, {"v", vec_json(pt.v)}, {"p", vec_json(pt.p)}};
}

}  // namespace

nlohmann::json chain_report(const ConstraintChain& chain, const std::string& model_name) {
  nlohmann::json j;
  j["model"] = model_name;
  j["n"] = chain.n;
  j["level_sizes"] = chain.level_sizes();
  j["termination"] = to_string(chain.termination);
  if (chain.termination == ChainTermination::GaugeFreedom) j["gauge_dim"] = chain.gauge_dim;
  j["kernel_dim"] = chain.kernel_dim;
  j["kernel_drift"] = chain.kernel_drift;
  j["free_dim_varies"] = chain.free_dim_varies;
  j["sample_count"] = chain.sample_points.size();
  j["base_point"] = point_json(chain.base_point);

  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lvl : chain.levels) {
    nlohmann::json constraints = nlohmann::json::array();
    for (const auto& c : lvl) {
      nlohmann::json cj;
      cj["id"] = c.id;
      cj["level"] = c.level;
      if (c.provenance.kind == ConstraintProvenance::Kind::Primary) {
        cj["provenance"] = "primary";
        cj["index"] = c.provenance.primary_index;
      } else {
        cj["provenance"] = "tangency";
        cj["parents"] = c.provenance.parent_ids;
        cj["direction"] = vec_json(c.provenance.direction);
      }
      constraints.push_back(cj);
    }
    levels.push_back(constraints);
  }
  j["levels"] = levels;

  nlohmann::json stats = nlohmann::json::array();
  for (const auto& rep : chain.level_reports)
    stats.push_back({{"level", rep.level},
                     {"size", rep.size},
                     {"max_residual", rep.max_residual},
                     {"mean_residual", rep.mean_residual}});
  j["residual_stats"] = stats;
  return j;
}

nlohmann::json trajectory_summary(const Trajectory& traj) {
  double max_constraint = 0.0, max_el = 0.0;
  double e_min = 0.0, e_max = 0.0;
  for (std::size_t k = 0; k < traj.diagnostics.size(); ++k) {
    const auto& d = traj.diagnostics[k];
    max_constraint = std::max(max_constraint, d.constraint_residual);
    max_el = std::max(max_el, d.el_residual);
    if (k == 0) {
      e_min = e_max = d.energy;
    } else {
      e_min = std::min(e_min, d.energy);
      e_max = std::max(e_max, d.energy);
    }
  }
  nlohmann::json j;
  j["points"] = traj.points.size();
  j["step"] = traj.step;
  if (!traj.points.empty()) {
    j["t_first"] = traj.points.front().t;
    j["t_last"] = traj.points.back().t;
  }
  j["max_constraint_residual"] = max_constraint;
  j["max_el_residual"] = max_el;
  j["energy_drift"] = e_max - e_min;
  return j;
}

}  // namespace srusk
