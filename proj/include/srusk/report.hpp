#ifndef SRUSK_REPORT_HPP
#define SRUSK_REPORT_HPP

#include <json.hpp>

#include "srusk/constraints.hpp"
#include "srusk/integrator.hpp"

namespace srusk {

// Machine-readable summary of a constraint analysis: level sizes,
// termination, provenance with frozen null directions, residual statistics.
nlohmann::json chain_report(const ConstraintChain& chain, const std::string& model_name);

// Trajectory summary printed after an integration run.
nlohmann::json trajectory_summary(const Trajectory& traj);

}  // namespace srusk

#endif
