#ifndef MMU_INSTANCE_IO_HPP
#define MMU_INSTANCE_IO_HPP

// JSON serialization of instances and plans.
//
// Instance schema (all demands and capacities are integers):
// {
//   "sites":      [{"id", "setup_cost", "session_cap", "coord": [x, y]}],
//   "practices":  [{"id", "capacity", "coord": [x, y]}],
//   "origins":    [{"id", "steerable_nominal", "walkin_nominal",
//                   "steerable_lo", "steerable_hi", "walkin_lo", "walkin_hi",
//                   "consideration": [{"facility_id", "distance_m"}, ...],
//                   "coord": [x, y]}],
//   "session_cost": int, "session_capacity": int,
//   "uncertainty": {"kind": "deterministic"|"interval"|"budgeted",
//                   "gamma_steerable"?: int, "gamma_walkin"?: int}
// }
// Interval bounds and coords are optional; bounds default to the nominal
// value. Unknown fields are accepted with a warning; missing required fields
// or wrong types raise ModelError naming the field.

#include <string>
#include <vector>

#include "mmu/instance.hpp"
#include "mmu/plan.hpp"

namespace mmu {

Instance instance_from_json(const std::string& text, std::vector<std::string>* warnings = nullptr);
std::string instance_to_json(const Instance& inst);

Instance read_instance(const std::string& path, std::vector<std::string>* warnings = nullptr);
void write_instance(const std::string& path, const Instance& inst);

Plan plan_from_json(const std::string& text);
std::string plan_to_json(const Plan& plan);

Plan read_plan(const std::string& path);
void write_plan(const std::string& path, const Plan& plan);

}  // namespace mmu

#endif  // MMU_INSTANCE_IO_HPP
