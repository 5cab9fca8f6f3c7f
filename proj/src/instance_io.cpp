#include "mmu/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mmu {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw ModelError("instance schema error at " + where + ": " + what);
}

const json& need(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
  return *it;
}

long long need_int(const json& obj, const char* key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_number_integer()) schema_error(where + "." + key, "expected an integer");
  return v.get<long long>();
}

std::string need_string(const json& obj, const char* key, const std::string& where) {
  const json& v = need(obj, key, where);
  if (!v.is_string()) schema_error(where + "." + key, "expected a string");
  return v.get<std::string>();
}

long long opt_int(const json& obj, const char* key, long long fallback, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) schema_error(where + "." + key, "expected an integer");
  return it->get<long long>();
}

Point opt_coord(const json& obj, const std::string& where) {
  auto it = obj.find("coord");
  if (it == obj.end()) return Point{};
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    schema_error(where + ".coord", "expected [x, y]");
  return Point{(*it)[0].get<double>(), (*it)[1].get<double>()};
}

void warn_unknown(const json& obj, std::initializer_list<const char*> known,
                  const std::string& where, std::vector<std::string>* warnings) {
  if (!warnings) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const char* k : known)
      if (it.key() == k) {
        found = true;
        break;
      }
    if (!found) warnings->push_back("ignoring unknown field '" + where + "." + it.key() + "'");
  }
}

json coord_json(const Point& p) { return json::array({p.x, p.y}); }

}  // namespace

Instance instance_from_json(const std::string& text, std::vector<std::string>* warnings) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("instance is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("$", "top level must be an object");
  warn_unknown(j,
               {"sites", "practices", "origins", "session_cost", "session_capacity",
                "uncertainty"},
               "$", warnings);

  Instance inst;
  const json& sites = need(j, "sites", "$");
  if (!sites.is_array()) schema_error("$.sites", "expected an array");
  for (size_t i = 0; i < sites.size(); ++i) {
    std::string where = "$.sites[" + std::to_string(i) + "]";
    const json& s = sites[i];
    if (!s.is_object()) schema_error(where, "expected an object");
    warn_unknown(s, {"id", "setup_cost", "session_cap", "coord"}, where, warnings);
    Site site;
    site.id = need_string(s, "id", where);
    site.setup_cost = static_cast<int>(need_int(s, "setup_cost", where));
    site.session_cap = static_cast<int>(need_int(s, "session_cap", where));
    site.coord = opt_coord(s, where);
    inst.sites.push_back(std::move(site));
  }

  const json& practices = need(j, "practices", "$");
  if (!practices.is_array()) schema_error("$.practices", "expected an array");
  for (size_t i = 0; i < practices.size(); ++i) {
    std::string where = "$.practices[" + std::to_string(i) + "]";
    const json& p = practices[i];
    if (!p.is_object()) schema_error(where, "expected an object");
    warn_unknown(p, {"id", "capacity", "coord"}, where, warnings);
    Practice pr;
    pr.id = need_string(p, "id", where);
    pr.capacity = static_cast<int>(need_int(p, "capacity", where));
    pr.coord = opt_coord(p, where);
    inst.practices.push_back(std::move(pr));
  }

  const json& origins = need(j, "origins", "$");
  if (!origins.is_array()) schema_error("$.origins", "expected an array");
  for (size_t i = 0; i < origins.size(); ++i) {
    std::string where = "$.origins[" + std::to_string(i) + "]";
    const json& o = origins[i];
    if (!o.is_object()) schema_error(where, "expected an object");
    warn_unknown(o,
                 {"id", "steerable_nominal", "walkin_nominal", "steerable_lo", "steerable_hi",
                  "walkin_lo", "walkin_hi", "consideration", "coord"},
                 where, warnings);
    DemandOrigin v;
    v.id = need_string(o, "id", where);
    v.steerable = static_cast<int>(need_int(o, "steerable_nominal", where));
    v.walkin = static_cast<int>(need_int(o, "walkin_nominal", where));
    v.steerable_lo = static_cast<int>(opt_int(o, "steerable_lo", v.steerable, where));
    v.steerable_hi = static_cast<int>(opt_int(o, "steerable_hi", v.steerable, where));
    v.walkin_lo = static_cast<int>(opt_int(o, "walkin_lo", v.walkin, where));
    v.walkin_hi = static_cast<int>(opt_int(o, "walkin_hi", v.walkin, where));
    v.coord = opt_coord(o, where);
    const json& cons = need(o, "consideration", where);
    if (!cons.is_array()) schema_error(where + ".consideration", "expected an array");
    for (size_t k = 0; k < cons.size(); ++k) {
      std::string cw = where + ".consideration[" + std::to_string(k) + "]";
      const json& e = cons[k];
      if (!e.is_object()) schema_error(cw, "expected an object");
      warn_unknown(e, {"facility_id", "distance_m"}, cw, warnings);
      ConsiderEntry entry;
      entry.facility_id = need_string(e, "facility_id", cw);
      entry.distance_m = static_cast<int>(need_int(e, "distance_m", cw));
      v.consideration.push_back(std::move(entry));
    }
    inst.origins.push_back(std::move(v));
  }

  inst.session_cost = static_cast<int>(need_int(j, "session_cost", "$"));
  inst.session_capacity = static_cast<int>(need_int(j, "session_capacity", "$"));

  const json& unc = need(j, "uncertainty", "$");
  if (!unc.is_object()) schema_error("$.uncertainty", "expected an object");
  warn_unknown(unc, {"kind", "gamma_steerable", "gamma_walkin"}, "$.uncertainty", warnings);
  std::string kind = need_string(unc, "kind", "$.uncertainty");
  if (kind == "deterministic")
    inst.uncertainty.kind = UncertaintyKind::deterministic;
  else if (kind == "interval")
    inst.uncertainty.kind = UncertaintyKind::interval;
  else if (kind == "budgeted")
    inst.uncertainty.kind = UncertaintyKind::budgeted;
  else
    schema_error("$.uncertainty.kind", "expected deterministic, interval or budgeted");
  if (inst.uncertainty.kind == UncertaintyKind::budgeted) {
    inst.uncertainty.gamma_steerable = need_int(unc, "gamma_steerable", "$.uncertainty");
    inst.uncertainty.gamma_walkin = need_int(unc, "gamma_walkin", "$.uncertainty");
  } else {
    inst.uncertainty.gamma_steerable = opt_int(unc, "gamma_steerable", 0, "$.uncertainty");
    inst.uncertainty.gamma_walkin = opt_int(unc, "gamma_walkin", 0, "$.uncertainty");
  }

  inst.resolve_references();
  return inst;
}

std::string instance_to_json(const Instance& inst) {
  json j;
  j["sites"] = json::array();
  for (const auto& s : inst.sites)
    j["sites"].push_back({{"id", s.id},
                          {"setup_cost", s.setup_cost},
                          {"session_cap", s.session_cap},
                          {"coord", coord_json(s.coord)}});
  j["practices"] = json::array();
  for (const auto& p : inst.practices)
    j["practices"].push_back(
        {{"id", p.id}, {"capacity", p.capacity}, {"coord", coord_json(p.coord)}});
  j["origins"] = json::array();
  for (const auto& v : inst.origins) {
    json cons = json::array();
    for (const auto& e : v.consideration)
      cons.push_back({{"facility_id", e.facility_id}, {"distance_m", e.distance_m}});
    j["origins"].push_back({{"id", v.id},
                            {"steerable_nominal", v.steerable},
                            {"walkin_nominal", v.walkin},
                            {"steerable_lo", v.steerable_lo},
                            {"steerable_hi", v.steerable_hi},
                            {"walkin_lo", v.walkin_lo},
                            {"walkin_hi", v.walkin_hi},
                            {"consideration", std::move(cons)},
                            {"coord", coord_json(v.coord)}});
  }
  j["session_cost"] = inst.session_cost;
  j["session_capacity"] = inst.session_capacity;
  json unc;
  switch (inst.uncertainty.kind) {
    case UncertaintyKind::deterministic: unc["kind"] = "deterministic"; break;
    case UncertaintyKind::interval: unc["kind"] = "interval"; break;
    case UncertaintyKind::budgeted: unc["kind"] = "budgeted"; break;
  }
  if (inst.uncertainty.kind == UncertaintyKind::budgeted) {
    unc["gamma_steerable"] = inst.uncertainty.gamma_steerable;
    unc["gamma_walkin"] = inst.uncertainty.gamma_walkin;
  }
  j["uncertainty"] = std::move(unc);
  return j.dump(2) + "\n";
}

Instance read_instance(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open instance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str(), warnings);
}

void write_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write instance file '" + path + "'");
  out << instance_to_json(inst);
}

Plan plan_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("$", "plan must be an object");
  Plan plan;
  for (const auto& [k, v] : need(j, "setup", "$").items()) plan.setup[k] = v.get<int>();
  for (const auto& [k, v] : need(j, "sessions", "$").items()) plan.sessions[k] = v.get<int>();
  for (const auto& [k, v] : need(j, "walkin_route", "$").items())
    plan.walkin_route[k] = v.get<std::string>();
  if (j.contains("steerable_assign")) {
    std::map<std::string, std::map<std::string, long long>> assign;
    for (const auto& [vid, row] : j["steerable_assign"].items())
      for (const auto& [fid, z] : row.items()) assign[vid][fid] = z.get<long long>();
    plan.steerable_assign = std::move(assign);
  }
  plan.cost = opt_int(j, "cost", 0, "$");
  return plan;
}

std::string plan_to_json(const Plan& plan) {
  json j;
  j["setup"] = json::object();
  for (const auto& [k, v] : plan.setup) j["setup"][k] = v;
  j["sessions"] = json::object();
  for (const auto& [k, v] : plan.sessions) j["sessions"][k] = v;
  j["walkin_route"] = json::object();
  for (const auto& [k, v] : plan.walkin_route) j["walkin_route"][k] = v;
  if (plan.steerable_assign) {
    j["steerable_assign"] = json::object();
    for (const auto& [vid, row] : *plan.steerable_assign) {
      json r = json::object();
      for (const auto& [fid, z] : row) r[fid] = z;
      j["steerable_assign"][vid] = std::move(r);
    }
  }
  j["cost"] = plan.cost;
  return j.dump(2) + "\n";
}

Plan read_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open plan file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return plan_from_json(buf.str());
}

void write_plan(const std::string& path, const Plan& plan) {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write plan file '" + path + "'");
  out << plan_to_json(plan);
}

}  // namespace mmu
