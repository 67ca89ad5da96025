/*
 * Copyright 2026 The buildops Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "buildops/runtime/tools.hpp"

#include <algorithm>
#include <fstream>

#include "buildops/error.hpp"

namespace buildops::runtime {

using toolbus::ParamKind;
using toolbus::ParamSpec;
using toolbus::ToolRegistry;
using toolbus::ToolResult;
using toolbus::ToolSpec;

namespace {

namespace fs = std::filesystem;

const char* const kConfig = "Configuration Related Tools";
const char* const kCluster = "Cluster Related Tools";
const char* const kBuilding = "Building Related Tools";
const char* const kHvac = "HVAC System Related Tools";
const char* const kDer = "DER System Related Tools";
const char* const kController = "Controller Related Tools";
const char* const kDisturbance = "Disturbance Related Tools";
const char* const kEnvironment = "Environment Related Tools";
const char* const kSimulation = "Simulation Related Tools";
const char* const kAnalysis = "Analysis Related Tools";
const char* const kComparison = "Comparison Related Tools";

// --- schema helpers --------------------------------------------------------

ParamSpec param(std::string name, ParamKind kind, std::string description, bool required = false) {
    ParamSpec p;
    p.name = std::move(name);
    p.kind = kind;
    p.required = required;
    p.description = std::move(description);
    return p;
}
ParamSpec str(std::string n, std::string d, bool req = false) { return param(std::move(n), ParamKind::String, std::move(d), req); }
ParamSpec num(std::string n, std::string d, bool req = false) { return param(std::move(n), ParamKind::Number, std::move(d), req); }
ParamSpec integer(std::string n, std::string d, bool req = false) { return param(std::move(n), ParamKind::Integer, std::move(d), req); }
ParamSpec boolean(std::string n, std::string d) { return param(std::move(n), ParamKind::Boolean, std::move(d)); }
ParamSpec list(std::string n, std::string d, bool req = false) { return param(std::move(n), ParamKind::List, std::move(d), req); }
ParamSpec enumeration(std::string n, std::string d, std::vector<std::string> values, bool req = false) {
    ParamSpec p = param(std::move(n), ParamKind::Enum, std::move(d), req);
    p.enum_values = std::move(values);
    return p;
}
ParamSpec map(std::string n, std::string d, std::vector<ParamSpec> fields = {}, bool req = false) {
    ParamSpec p = param(std::move(n), ParamKind::Map, std::move(d), req);
    p.fields = std::move(fields);
    return p;
}

ParamSpec cluster_param() { return str("cluster_id", "Cluster holding the entity (resolved automatically when omitted)"); }

std::vector<ParamSpec> zone_fields() {
    return {num("temperature_C", "Initial zone air temperature (°C)"),
            num("capacitance_J_per_C", "Thermal capacitance C (J/°C), > 0"),
            num("resistance_C_per_W", "Envelope thermal resistance R (°C/W), > 0"),
            num("internal_gain_W", "Internal heat gain at full occupancy (W)"),
            num("solar_aperture_m2", "Effective solar aperture (m²)"),
            num("setpoint_C", "Cooling setpoint (°C)"),
            num("deadband_C", "Thermostat deadband (°C), >= 0"),
            num("comfort_low_C", "Lower comfort bound (°C)"),
            num("comfort_high_C", "Upper comfort bound (°C)")};
}

std::vector<ParamSpec> hvac_components() {
    return {
        map("fan", "Supply fan", {num("rated_flow_m3s", "Rated air flow (m³/s)"), num("rated_power_W", "Rated fan power (W)")}),
        map("fan_ctrl", "Fan control logic",
            {enumeration("ctrl_type", "Fan control strategy", {"constant", "staged", "vfd"}),
             num("rated_flow_m3s", "Rated air flow (m³/s)"),
             integer("stages", "Number of stages for staged mode (>= 2)")}),
        map("coil", "Cooling coil", {num("effectiveness", "Coil effectiveness (0-1]")}),
        map("pump", "Chilled water pump",
            {num("rated_flow_m3s", "Rated water flow (m³/s)"), num("rated_power_W", "Rated pump power (W)")}),
        map("chiller", "Chiller", {num("rated_capacity_W", "Rated cooling capacity (W)"), num("rated_cop", "Rated COP (> 0)")}),
        map("tower", "Cooling tower",
            {num("rated_capacity_W", "Rated capacity (W)"), num("rated_fan_power_W", "Rated fan power (W)"),
             num("pump_power_per_flow", "Condenser pump power per flow (W/(m³/s))"),
             num("min_approach_C", "Minimum approach (°C)"), num("max_approach_C", "Maximum approach (°C)")}),
    };
}

ParamSpec battery_param() {
    return map("battery", "Battery storage",
               {num("capacity", "Usable capacity (kWh)"), num("soc", "Initial state of charge (0-1)"),
                num("soc_min", "Minimum state of charge (0-1)"), num("soc_max", "Maximum state of charge (0-1)"),
                num("charge_eff", "Charging efficiency (0-1]"), num("discharge_eff", "Discharging efficiency (0-1]"),
                num("max_power", "Maximum charge/discharge power (kW)")});
}

ParamSpec pv_param() { return map("pv", "Photovoltaic array", {num("rated", "Rated DC power at 1000 W/m² (kW)")}); }

// --- argument helpers ------------------------------------------------------

std::optional<std::string> opt_str(const Json& a, const char* key) {
    if (!a.contains(key) || a.at(key).is_null()) return std::nullopt;
    return a.at(key).get<std::string>();
}

Json pick(const Json& a, const std::vector<ParamSpec>& fields) {
    Json out = Json::object();
    for (const auto& f : fields) {
        if (a.contains(f.name) && !a.at(f.name).is_null()) out[f.name] = a.at(f.name);
    }
    return out;
}

std::vector<std::string> string_list(const Json& v, const char* what) {
    if (v.is_string()) return {v.get<std::string>()};
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) throw Error("InvalidArgument", std::string(what) + " must be a list of ids");
        out.push_back(x.get<std::string>());
    }
    return out;
}

template <typename Map>
auto& lookup(Map& m, const std::string& id, const std::string& what, const Cluster& c) {
    auto it = m.find(id);
    if (it == m.end()) throw Error("UnknownId", "no " + what + " '" + id + "' in cluster '" + c.cluster_id + "'");
    return it->second;
}

template <typename Map>
void require_unused(const Map& m, const std::string& id, const std::string& what, const Cluster& c) {
    if (m.count(id)) throw Error("DuplicateId", what + " '" + id + "' already exists in cluster '" + c.cluster_id + "'");
}

Json id_list(const auto& m) {
    Json out = Json::array();
    for (const auto& [k, v] : m) out.push_back(k);
    return out;
}

Json cluster_summary(const Cluster& c) {
    return Json{{"cluster_id", c.cluster_id},
                {"description", c.description},
                {"buildings", id_list(c.buildings)},
                {"hvac_systems", id_list(c.hvac_systems)},
                {"der_systems", id_list(c.der_systems)},
                {"controllers", id_list(c.controllers)},
                {"disturbances", id_list(c.disturbances)}};
}

void write_json_file(const fs::path& path, const Json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw Error("IoError", "cannot write '" + path.string() + "'");
}

Json run_summary(const SimulationResult& r) {
    return Json{{"run_id", r.run_id},
                {"status", r.status},
                {"config_id", r.config_id},
                {"cluster_id", r.cluster_id},
                {"steps", r.records.size()},
                {"timestep_s", r.timestep_s},
                {"horizon_hours", r.horizon_hours}};
}

// --- registration ----------------------------------------------------------

using Body = std::function<ToolResult(Workspace&, const Json&)>;

class Catalog {
public:
    Catalog(ToolRegistry& registry, std::shared_ptr<Workspace> ws) : registry_(registry), ws_(std::move(ws)) {}

    void add(std::string name, std::string category, std::string description, std::vector<ParamSpec> params,
             Body body) {
        ToolSpec spec{std::move(name), std::move(description), std::move(category), std::move(params)};
        auto ws = ws_;
        registry_.register_tool(std::move(spec), [ws, body = std::move(body)](const Json& args) {
            std::lock_guard lock(ws->mutex);
            return body(*ws, args);
        });
    }

private:
    ToolRegistry& registry_;
    std::shared_ptr<Workspace> ws_;
};

void config_tools(Catalog& t) {
    t.add("config_create", kConfig, "Create a configuration (empty, from the reference building, or from a JSON snapshot)",
          {str("config_id", "Identifier of the new configuration", true), str("description", "Free-text description"),
           boolean("from_reference", "Start from the reference test building instead of an empty configuration"),
           str("path", "Load the configuration from this JSON snapshot"),
           boolean("activate", "Make the new configuration active (default true)")},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("config_id").get<std::string>();
              if (ws.configs.count(id)) throw Error("DuplicateId", "configuration '" + id + "' already exists");
              Configuration cfg;
              if (auto path = opt_str(a, "path")) {
                  std::ifstream in(*path);
                  if (!in) throw Error("InvalidArgument", "cannot open '" + *path + "'");
                  cfg = Json::parse(in).get<Configuration>();
              } else if (a.value("from_reference", false)) {
                  cfg = reference_configuration(id);
              }
              cfg.config_id = id;
              if (auto d = opt_str(a, "description")) cfg.description = *d;
              ws.configs[id] = cfg;
              const bool activate = a.value("activate", true);
              if (activate) {
                  ws.active_config_id = id;
                  ws.selection.clear();
              }
              return ToolResult::ok(Json{{"config_id", id}, {"active", activate}, {"clusters", id_list(cfg.clusters)}},
                                    "Configuration '" + id + "' created");
          });
    t.add("config_save", kConfig, "Save a configuration snapshot as JSON",
          {str("config_id", "Configuration to save (default: active)"),
           str("path", "Output file (default: <results>/configs/<config_id>.json)")},
          [](Workspace& ws, const Json& a) {
              Configuration& cfg = a.contains("config_id") ? ws.config(a.at("config_id")) : ws.active();
              fs::path path;
              if (auto p = opt_str(a, "path")) {
                  path = *p;
              } else {
                  if (ws.results_dir.empty()) throw Error("InvalidArgument", "no results directory; pass path");
                  path = ws.results_dir / "configs" / (cfg.config_id + ".json");
              }
              write_json_file(path, cfg);
              return ToolResult::ok(Json{{"config_id", cfg.config_id}, {"path", path.string()}},
                                    "Configuration '" + cfg.config_id + "' saved to " + path.string());
          });
    t.add("config_validate", kConfig, "Check a configuration for invariant violations and dangling references",
          {str("config_id", "Configuration to validate (default: active)")}, [](Workspace& ws, const Json& a) {
              Configuration& cfg = a.contains("config_id") ? ws.config(a.at("config_id")) : ws.active();
              const auto errors = validate_configuration(cfg);
              Json warnings = Json::array();
              for (const auto& [cid, c] : cfg.clusters) {
                  for (const auto& [bid, b] : c.buildings) {
                      if (b.zones.empty()) warnings.push_back("building '" + bid + "' has no thermal zone");
                  }
              }
              return ToolResult::ok(
                  Json{{"config_id", cfg.config_id}, {"valid", errors.empty()}, {"errors", errors}, {"warnings", warnings}},
                  errors.empty() ? "Configuration '" + cfg.config_id + "' is valid"
                                 : "Configuration '" + cfg.config_id + "' has " + std::to_string(errors.size()) +
                                       " error(s)");
          });
    t.add("config_set_active", kConfig, "Make a configuration the active one",
          {str("config_id", "Configuration to activate", true)}, [](Workspace& ws, const Json& a) {
              const auto id = a.at("config_id").get<std::string>();
              ws.config(id);
              ws.active_config_id = id;
              ws.selection.clear();
              return ToolResult::ok(Json{{"config_id", id}}, "Configuration '" + id + "' is now active");
          });
    t.add("config_list", kConfig, "List configurations", {}, [](Workspace& ws, const Json&) {
        Json list = Json::array();
        for (const auto& [id, c] : ws.configs) {
            list.push_back(Json{{"config_id", id},
                                {"description", c.description},
                                {"clusters", id_list(c.clusters)},
                                {"active", id == ws.active_config_id}});
        }
        return ToolResult::ok(Json{{"configs", list}, {"active_config_id", ws.active_config_id}},
                              std::to_string(list.size()) + " configuration(s)");
    });
    t.add("config_query", kConfig, "Return a configuration with all clusters and members",
          {str("config_id", "Configuration to query (default: active)")}, [](Workspace& ws, const Json& a) {
              Configuration& cfg = a.contains("config_id") ? ws.config(a.at("config_id")) : ws.active();
              Json data = cfg;
              data["active"] = cfg.config_id == ws.active_config_id;
              return ToolResult::ok(data, "Configuration '" + cfg.config_id + "'");
          });
}

void cluster_tools(Catalog& t) {
    t.add("cluster_add", kCluster, "Add a building cluster to the active configuration",
          {str("cluster_id", "Unique identifier for the cluster", true), str("description", "Free-text description"),
           map("metadata", "Additional metadata")},
          [](Workspace& ws, const Json& a) {
              auto& clusters = ws.active().clusters;
              const auto id = a.at("cluster_id").get<std::string>();
              if (clusters.count(id)) throw Error("DuplicateId", "cluster '" + id + "' already exists");
              Cluster c;
              c.cluster_id = id;
              c.description = a.value("description", "");
              c.metadata = a.value("metadata", Json::object());
              clusters[id] = c;
              return ToolResult::ok(cluster_summary(c), "Cluster '" + id + "' added");
          });
    t.add("cluster_update", kCluster, "Update cluster description or metadata (shallow merge)",
          {str("cluster_id", "Cluster to update", true), str("description", "New description"),
           map("metadata", "Metadata keys to set")},
          [](Workspace& ws, const Json& a) {
              Cluster& c = ws.resolve_cluster(a.at("cluster_id").get<std::string>());
              if (auto d = opt_str(a, "description")) c.description = *d;
              if (a.contains("metadata")) c.metadata.update(a.at("metadata"));
              return ToolResult::ok(cluster_summary(c), "Cluster '" + c.cluster_id + "' updated");
          });
    t.add("cluster_remove", kCluster, "Remove a cluster and everything in it",
          {str("cluster_id", "Cluster to remove", true)}, [](Workspace& ws, const Json& a) {
              auto& clusters = ws.active().clusters;
              const auto id = a.at("cluster_id").get<std::string>();
              if (!clusters.erase(id)) throw Error("UnknownId", "no cluster '" + id + "'");
              if (ws.selection["cluster"] == id) ws.selection.erase("cluster");
              return ToolResult::ok(Json{{"cluster_id", id}}, "Cluster '" + id + "' removed");
          });
    t.add("cluster_query", kCluster, "Return one cluster in full, or a summary of every cluster",
          {str("cluster_id", "Cluster to query (default: selected, else all)")}, [](Workspace& ws, const Json& a) {
              auto id = opt_str(a, "cluster_id");
              if (!id && ws.selection.count("cluster")) id = ws.selection.at("cluster");
              if (id) {
                  Cluster& c = ws.resolve_cluster(*id);
                  Json data = c;
                  data["domains"] = c.domains();
                  return ToolResult::ok(data, "Cluster '" + c.cluster_id + "'");
              }
              Json list = Json::array();
              for (const auto& [cid, c] : ws.active().clusters) list.push_back(cluster_summary(c));
              return ToolResult::ok(Json{{"clusters", list}}, std::to_string(list.size()) + " cluster(s)");
          });
    t.add("cluster_select", kCluster, "Select the cluster later calls default to",
          {str("cluster_id", "Cluster to select", true)}, [](Workspace& ws, const Json& a) {
              Cluster& c = ws.resolve_cluster(a.at("cluster_id").get<std::string>());
              ws.selection["cluster"] = c.cluster_id;
              return ToolResult::ok(Json{{"cluster_id", c.cluster_id}}, "Cluster '" + c.cluster_id + "' selected");
          });
}

Cluster& building_cluster(Workspace& ws, const Json& a, const std::string& bid) {
    return ws.resolve_cluster(opt_str(a, "cluster_id"), [&](const Cluster& c) { return c.buildings.count(bid) > 0; });
}

Json building_view(const Cluster& c, const Building& b) {
    Json data = b;
    data["cluster_id"] = c.cluster_id;
    Json hvac = Json::array(), der = Json::array();
    for (const auto& [id, h] : c.hvac_systems) {
        if (std::count(h.assigned_buildings.begin(), h.assigned_buildings.end(), b.building_id)) hvac.push_back(id);
    }
    for (const auto& [id, d] : c.der_systems) {
        if (std::count(d.assigned_buildings.begin(), d.assigned_buildings.end(), b.building_id)) der.push_back(id);
    }
    data["served_by"] = Json{{"hvac_systems", hvac}, {"der_systems", der}};
    return data;
}

void building_tools(Catalog& t) {
    t.add("building_add", kBuilding, "Add a building to a cluster",
          {str("building_id", "Unique identifier for the building", true), cluster_param(),
           str("building_name", "Display name"), map("metadata", "Additional metadata (e.g. floor area, type)")},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("building_id").get<std::string>();
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"));
              require_unused(c.buildings, id, "building", c);
              Building b;
              b.building_id = id;
              b.name = a.value("building_name", "");
              b.metadata = a.value("metadata", Json::object());
              ws.mutate(c, [&](Cluster& x) { x.buildings[id] = b; });
              return ToolResult::ok(building_view(c, c.buildings.at(id)),
                                    "Building '" + id + "' added to cluster '" + c.cluster_id + "'");
          });
    auto update_params = std::vector<ParamSpec>{str("building_id", "Building to update", true), cluster_param(),
                                                str("building_name", "New display name"),
                                                map("metadata", "Metadata keys to set"),
                                                str("zone_id", "Thermal zone to patch (default: the first zone)"),
                                                num("base_load_kW", "Electrical zone base load (kW)")};
    for (auto& f : zone_fields()) update_params.push_back(f);
    t.add("building_update", kBuilding, "Update building attributes or thermal zone parameters (shallow merge)",
          update_params, [](Workspace& ws, const Json& a) {
              const auto id = a.at("building_id").get<std::string>();
              Cluster& c = building_cluster(ws, a, id);
              lookup(c.buildings, id, "building", c);
              const Json zone_patch = pick(a, zone_fields());
              ws.mutate(c, [&](Cluster& x) {
                  Building& b = x.buildings.at(id);
                  if (auto n = opt_str(a, "building_name")) b.name = *n;
                  if (a.contains("metadata")) b.metadata.update(a.at("metadata"));
                  if (a.contains("base_load_kW")) {
                      if (!b.electrical_zone) throw Error("UnknownId", "building '" + id + "' has no electrical zone");
                      b.electrical_zone->base_load_kw = a.at("base_load_kW").get<double>();
                  }
                  if (!zone_patch.empty()) {
                      if (b.zones.empty()) throw Error("UnknownId", "building '" + id + "' has no thermal zone");
                      ThermalZone* z = &b.zones.front();
                      if (auto zid = opt_str(a, "zone_id")) {
                          auto it = std::find_if(b.zones.begin(), b.zones.end(),
                                                 [&](const ThermalZone& q) { return q.zone_id == *zid; });
                          if (it == b.zones.end()) throw Error("UnknownId", "no zone '" + *zid + "' in '" + id + "'");
                          z = &*it;
                      }
                      apply_zone_patch(*z, zone_patch);
                  }
              });
              return ToolResult::ok(building_view(c, c.buildings.at(id)), "Building '" + id + "' updated");
          });
    t.add("building_remove", kBuilding, "Remove a building and drop it from system assignments",
          {str("building_id", "Building to remove", true), cluster_param()}, [](Workspace& ws, const Json& a) {
              const auto id = a.at("building_id").get<std::string>();
              Cluster& c = building_cluster(ws, a, id);
              lookup(c.buildings, id, "building", c);
              ws.mutate(c, [&](Cluster& x) {
                  x.buildings.erase(id);
                  auto strip = [&](std::vector<std::string>& v) { std::erase(v, id); };
                  for (auto& [sid, h] : x.hvac_systems) strip(h.assigned_buildings);
                  for (auto& [sid, d] : x.der_systems) strip(d.assigned_buildings);
              });
              if (ws.selection["building"] == id) ws.selection.erase("building");
              return ToolResult::ok(Json{{"building_id", id}, {"cluster_id", c.cluster_id}},
                                    "Building '" + id + "' removed");
          });
    t.add("building_query", kBuilding, "Return one building, or every building of the cluster",
          {str("building_id", "Building to query (default: selected, else all)"), cluster_param()},
          [](Workspace& ws, const Json& a) {
              auto id = opt_str(a, "building_id");
              if (!id && ws.selection.count("building")) id = ws.selection.at("building");
              if (id) {
                  Cluster& c = building_cluster(ws, a, *id);
                  return ToolResult::ok(building_view(c, lookup(c.buildings, *id, "building", c)),
                                        "Building '" + *id + "'");
              }
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"));
              Json list = Json::array();
              for (const auto& [bid, b] : c.buildings) list.push_back(building_view(c, b));
              return ToolResult::ok(Json{{"cluster_id", c.cluster_id}, {"buildings", list}},
                                    std::to_string(list.size()) + " building(s)");
          });
    t.add("building_select", kBuilding, "Select the building later calls default to",
          {str("building_id", "Building to select", true), cluster_param()}, [](Workspace& ws, const Json& a) {
              const auto id = a.at("building_id").get<std::string>();
              Cluster& c = building_cluster(ws, a, id);
              lookup(c.buildings, id, "building", c);
              ws.selection["building"] = id;
              return ToolResult::ok(Json{{"building_id", id}, {"cluster_id", c.cluster_id}},
                                    "Building '" + id + "' selected");
          });
    auto zone_params = std::vector<ParamSpec>{str("building_id", "Building receiving the zone", true),
                                              str("zone_id", "Identifier for the thermal zone", true),
                                              cluster_param()};
    for (auto& f : zone_fields()) zone_params.push_back(f);
    t.add("building_add_thermal_zone", kBuilding, "Add a 1R1C thermal zone to a building", zone_params,
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("building_id").get<std::string>();
              const auto zid = a.at("zone_id").get<std::string>();
              Cluster& c = building_cluster(ws, a, id);
              Building& b = lookup(c.buildings, id, "building", c);
              for (const auto& z : b.zones) {
                  if (z.zone_id == zid) throw Error("DuplicateId", "zone '" + zid + "' already exists in '" + id + "'");
              }
              ThermalZone z;
              z.zone_id = zid;
              apply_zone_patch(z, pick(a, zone_fields()));
              ws.mutate(c, [&](Cluster& x) { x.buildings.at(id).zones.push_back(z); });
              return ToolResult::ok(Json{{"building_id", id}, {"cluster_id", c.cluster_id}, {"zone", z}},
                                    "Thermal zone '" + zid + "' added to building '" + id + "'");
          });
    t.add("building_add_electrical_zone", kBuilding, "Attach the electrical (plug and lighting load) zone",
          {str("building_id", "Building receiving the zone", true), str("zone_id", "Identifier for the zone", true),
           cluster_param(), num("base_load_kW", "Non-HVAC load at full occupancy (kW)")},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("building_id").get<std::string>();
              const auto zid = a.at("zone_id").get<std::string>();
              Cluster& c = building_cluster(ws, a, id);
              Building& b = lookup(c.buildings, id, "building", c);
              if (b.electrical_zone) {
                  throw Error("DuplicateId", "building '" + id + "' already has electrical zone '" +
                                                 b.electrical_zone->zone_id + "'");
              }
              const double load = a.value("base_load_kW", ElectricalZone{}.base_load_kw);
              if (!(load >= 0)) throw Error("InvalidArgument", "base_load_kW must be >= 0");
              b.electrical_zone = ElectricalZone{zid, load};
              return ToolResult::ok(
                  Json{{"building_id", id}, {"cluster_id", c.cluster_id}, {"zone_id", zid}, {"base_load_kW", load}},
                  "Electrical zone '" + zid + "' added to building '" + id + "'");
          });
    t.add("building_add_water_zone", kBuilding, "Attach a water zone (recorded, no dynamics)",
          {str("building_id", "Building receiving the zone", true), str("zone_id", "Identifier for the zone", true),
           cluster_param()},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("building_id").get<std::string>();
              const auto zid = a.at("zone_id").get<std::string>();
              Cluster& c = building_cluster(ws, a, id);
              Building& b = lookup(c.buildings, id, "building", c);
              if (b.water_zone) throw Error("DuplicateId", "building '" + id + "' already has a water zone");
              b.water_zone = WaterZone{zid};
              return ToolResult::ok(Json{{"building_id", id}, {"cluster_id", c.cluster_id}, {"zone_id", zid}},
                                    "Water zone '" + zid + "' added to building '" + id + "'");
          });
}

// Shared query/select/assign bodies for hvac and der systems.
template <typename Member>
void system_tools(Catalog& t, const std::string& prefix, const char* category, const std::string& label,
                  const std::string& kind, Member member) {
    auto holds = [member](const std::string& id) {
        return [member, id](const Cluster& c) { return (c.*member).count(id) > 0; };
    };
    auto view = [](const Cluster& c, const auto& s) {
        Json data = s;
        data["cluster_id"] = c.cluster_id;
        return data;
    };
    t.add(prefix + "_remove", category, "Remove a " + label + " system",
          {str("system_id", "System to remove", true), cluster_param()},
          [=](Workspace& ws, const Json& a) {
              const auto id = a.at("system_id").get<std::string>();
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"), holds(id));
              lookup(c.*member, id, label + " system", c);
              ws.mutate(c, [&](Cluster& x) { (x.*member).erase(id); });
              if (ws.selection[kind] == id) ws.selection.erase(kind);
              return ToolResult::ok(Json{{"system_id", id}, {"cluster_id", c.cluster_id}},
                                    label + " system '" + id + "' removed");
          });
    t.add(prefix + "_query", category, "Return one " + label + " system, or every one in the cluster",
          {str("system_id", "System to query (default: selected, else all)"), cluster_param()},
          [=](Workspace& ws, const Json& a) {
              auto id = opt_str(a, "system_id");
              if (!id && ws.selection.count(kind)) id = ws.selection.at(kind);
              if (id) {
                  Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"), holds(*id));
                  return ToolResult::ok(view(c, lookup(c.*member, *id, label + " system", c)),
                                        label + " system '" + *id + "'");
              }
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"));
              Json list = Json::array();
              for (const auto& [sid, s] : c.*member) list.push_back(view(c, s));
              return ToolResult::ok(Json{{"cluster_id", c.cluster_id}, {"systems", list}},
                                    std::to_string(list.size()) + " " + label + " system(s)");
          });
    t.add(prefix + "_assign_to_buildings", category, "Assign a " + label + " system to buildings",
          {str("system_id", "System to assign", true), list("building_ids", "Buildings the system serves", true),
           cluster_param(), boolean("replace", "Replace the current assignment instead of extending it")},
          [=](Workspace& ws, const Json& a) {
              const auto id = a.at("system_id").get<std::string>();
              const auto buildings = string_list(a.at("building_ids"), "building_ids");
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"), holds(id));
              lookup(c.*member, id, label + " system", c);
              ws.mutate(c, [&](Cluster& x) {
                  auto& assigned = (x.*member).at(id).assigned_buildings;
                  if (a.value("replace", false)) assigned.clear();
                  for (const auto& b : buildings) {
                      if (std::find(assigned.begin(), assigned.end(), b) == assigned.end()) assigned.push_back(b);
                  }
              });
              const auto& assigned = (c.*member).at(id).assigned_buildings;
              return ToolResult::ok(Json{{"system_id", id}, {"cluster_id", c.cluster_id}, {"assigned_buildings", assigned}},
                                    label + " system '" + id + "' assigned to " + std::to_string(assigned.size()) +
                                        " building(s)");
          });
    t.add(prefix + "_select", category, "Select the " + label + " system later calls default to",
          {str("system_id", "System to select", true), cluster_param()}, [=](Workspace& ws, const Json& a) {
              const auto id = a.at("system_id").get<std::string>();
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"), holds(id));
              lookup(c.*member, id, label + " system", c);
              ws.selection[kind] = id;
              return ToolResult::ok(Json{{"system_id", id}, {"cluster_id", c.cluster_id}},
                                    label + " system '" + id + "' selected");
          });
}

Json hvac_patch(const Json& a) {
    Json patch = Json::object();
    for (const char* k : {"fan", "fan_ctrl", "coil", "pump", "chiller", "tower"}) {
        if (a.contains(k) && !a.at(k).is_null()) patch[k] = a.at(k);
    }
    return patch;
}

void hvac_tools(Catalog& t) {
    t.add("hvac_add", kHvac, "Add a new HVAC system to a building cluster",
          {str("system_id", "Unique identifier for the HVAC system", true),
           str("cluster_id", "ID of the cluster to add the HVAC system to", true),
           str("system_name", "Display name for the system (e.g., 'FCU System', 'Office HVAC')"),
           map("system_config",
               "HVAC system configuration: fan, fan_ctrl (ctrl_type constant|staged|vfd), coil, pump, chiller, tower",
               hvac_components()),
           map("parameters", "Additional HVAC parameters beyond system_config")},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("system_id").get<std::string>();
              const auto cid = a.at("cluster_id").get<std::string>();
              Cluster& c = ws.resolve_cluster(cid);
              if (c.has_system(id)) throw Error("DuplicateId", "system '" + id + "' already exists in '" + cid + "'");
              HvacSystem h;
              h.system_id = id;
              h.name = a.value("system_name", "");
              const Json config = a.contains("system_config") ? a.at("system_config") : Json(nullptr);
              if (config.is_object()) apply_hvac_patch(h, config);
              if (a.contains("parameters") && a.at("parameters").is_object()) h.parameters = a.at("parameters");
              ws.mutate(c, [&](Cluster& x) { x.hvac_systems[id] = h; });
              Json name = a.contains("system_name") ? a.at("system_name") : Json(nullptr);
              return ToolResult::ok(Json{{"system_id", id},
                                         {"cluster_id", cid},
                                         {"system_type", "hvac_systems"},
                                         {"system_name", name},
                                         {"system_config", config}},
                                    "HVAC system '" + id + "' added to cluster '" + cid + "'");
          });
    auto params = std::vector<ParamSpec>{str("system_id", "HVAC system to update", true), cluster_param(),
                                         str("system_name", "New display name")};
    for (auto& p : hvac_components()) params.push_back(p);
    params.push_back(map("parameters", "Additional HVAC parameters to set"));
    t.add("hvac_update", kHvac, "Update HVAC components (shallow merge of the provided keys)", params,
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("system_id").get<std::string>();
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"),
                                              [&](const Cluster& x) { return x.hvac_systems.count(id) > 0; });
              lookup(c.hvac_systems, id, "HVAC system", c);
              const Json patch = hvac_patch(a);
              ws.mutate(c, [&](Cluster& x) {
                  HvacSystem& h = x.hvac_systems.at(id);
                  if (auto n = opt_str(a, "system_name")) h.name = *n;
                  if (!patch.empty()) apply_hvac_patch(h, patch);
                  if (a.contains("parameters") && a.at("parameters").is_object()) h.parameters.update(a.at("parameters"));
              });
              Json data = c.hvac_systems.at(id);
              data["cluster_id"] = c.cluster_id;
              data["updated"] = patch;
              return ToolResult::ok(data, "HVAC system '" + id + "' updated");
          });
    system_tools(t, "hvac", kHvac, "HVAC", "hvac", &Cluster::hvac_systems);
}

void der_tools(Catalog& t) {
    t.add("der_add", kDer, "Add a DER system (battery and/or PV) to a cluster",
          {str("system_id", "Unique identifier for the DER system", true), cluster_param(),
           str("system_name", "Display name"), battery_param(), pv_param()},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("system_id").get<std::string>();
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"));
              if (c.has_system(id)) {
                  throw Error("DuplicateId", "system '" + id + "' already exists in '" + c.cluster_id + "'");
              }
              DerSystem d;
              d.system_id = id;
              d.name = a.value("system_name", "");
              Json patch = pick(a, {battery_param(), pv_param()});
              if (!patch.empty()) apply_der_patch(d, patch);
              ws.mutate(c, [&](Cluster& x) { x.der_systems[id] = d; });
              Json data = d;
              data["cluster_id"] = c.cluster_id;
              data["system_type"] = "der_systems";
              return ToolResult::ok(data, "DER system '" + id + "' added to cluster '" + c.cluster_id + "'");
          });
    t.add("der_update", kDer, "Update battery or PV parameters (shallow merge of the provided keys)",
          {str("system_id", "DER system to update", true), cluster_param(), str("system_name", "New display name"),
           battery_param(), pv_param()},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("system_id").get<std::string>();
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"),
                                              [&](const Cluster& x) { return x.der_systems.count(id) > 0; });
              lookup(c.der_systems, id, "DER system", c);
              const Json patch = pick(a, {battery_param(), pv_param()});
              ws.mutate(c, [&](Cluster& x) {
                  DerSystem& d = x.der_systems.at(id);
                  if (auto n = opt_str(a, "system_name")) d.name = *n;
                  if (!patch.empty()) apply_der_patch(d, patch);
              });
              Json data = c.der_systems.at(id);
              data["cluster_id"] = c.cluster_id;
              data["updated"] = patch;
              return ToolResult::ok(data, "DER system '" + id + "' updated");
          });
    system_tools(t, "der", kDer, "DER", "der", &Cluster::der_systems);
}

std::vector<ParamSpec> hvac_controller_fields() {
    return {num("setpoint_C", "Thermostat setpoint override (°C)"), num("deadband_C", "Thermostat deadband override (°C)"),
            num("offset_C", "Precool setpoint reduction (°C), > 0"),
            num("window_start_hour", "Precool window start hour [0, 24)"),
            num("window_end_hour", "Precool window end hour [0, 24)")};
}

std::vector<ParamSpec> der_controller_fields() {
    return {num("charge_start_hour", "Charge window start hour [0, 24)"),
            num("charge_end_hour", "Charge window end hour [0, 24)"),
            num("discharge_start_hour", "Discharge window start hour (default: price peak start)"),
            num("discharge_end_hour", "Discharge window end hour (default: price peak end)")};
}

Cluster& controller_cluster(Workspace& ws, const Json& a, const std::string& id) {
    return ws.resolve_cluster(opt_str(a, "cluster_id"), [&](const Cluster& c) { return c.controllers.count(id) > 0; });
}

Json controller_view(const Cluster& c, const Controller& ctl) {
    Json data = ctl;
    data["cluster_id"] = c.cluster_id;
    return data;
}

void controller_tools(Catalog& t) {
    auto add_controller = [](Workspace& ws, const Json& a, ControllerKind kind, const std::vector<ParamSpec>& fields) {
        const auto id = a.at("controller_id").get<std::string>();
        const auto sid = a.at("system_id").get<std::string>();
        Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"), [&](const Cluster& x) { return x.has_system(sid); });
        require_unused(c.controllers, id, "controller", c);
        Controller ctl;
        ctl.controller_id = id;
        ctl.kind = kind;
        ctl.assigned_system = sid;
        Json patch = pick(a, fields);
        if (a.contains("enabled")) patch["enabled"] = a.at("enabled");
        apply_controller_patch(ctl, patch);
        ws.mutate(c, [&](Cluster& x) { x.controllers[id] = ctl; });
        return ToolResult::ok(controller_view(c, ctl), to_string(kind) + " controller '" + id + "' added to system '" +
                                                          sid + "'");
    };
    auto hvac_params = std::vector<ParamSpec>{
        str("controller_id", "Unique identifier for the controller", true),
        str("system_id", "HVAC system the controller acts on", true), cluster_param(),
        enumeration("controller_type", "Control strategy", {"thermostat_deadband", "precool"}),
        boolean("enabled", "Whether the controller is active (default true)")};
    for (auto& f : hvac_controller_fields()) hvac_params.push_back(f);
    t.add("controller_add_hvac", kController, "Add a thermostat or precooling controller to an HVAC system",
          hvac_params, [add_controller](Workspace& ws, const Json& a) {
              const auto type = a.value("controller_type", std::string("thermostat_deadband"));
              return add_controller(ws, a, controller_kind_from_string(type), hvac_controller_fields());
          });
    auto der_params = std::vector<ParamSpec>{str("controller_id", "Unique identifier for the controller", true),
                                             str("system_id", "DER system the schedule drives", true), cluster_param(),
                                             boolean("enabled", "Whether the controller is active (default true)")};
    for (auto& f : der_controller_fields()) der_params.push_back(f);
    t.add("controller_add_der", kController, "Add a time-of-day battery schedule to a DER system", der_params,
          [add_controller](Workspace& ws, const Json& a) {
              return add_controller(ws, a, ControllerKind::DerSchedule, der_controller_fields());
          });
    auto update_params = std::vector<ParamSpec>{str("controller_id", "Controller to update", true), cluster_param(),
                                                boolean("enabled", "Enable or disable the controller")};
    for (auto& f : hvac_controller_fields()) update_params.push_back(f);
    for (auto& f : der_controller_fields()) update_params.push_back(f);
    t.add("controller_update", kController, "Update controller parameters (shallow merge of the provided keys)",
          update_params, [](Workspace& ws, const Json& a) {
              const auto id = a.at("controller_id").get<std::string>();
              Cluster& c = controller_cluster(ws, a, id);
              lookup(c.controllers, id, "controller", c);
              Json patch = pick(a, hvac_controller_fields());
              patch.update(pick(a, der_controller_fields()));
              if (a.contains("enabled")) patch["enabled"] = a.at("enabled");
              ws.mutate(c, [&](Cluster& x) { apply_controller_patch(x.controllers.at(id), patch); });
              return ToolResult::ok(controller_view(c, c.controllers.at(id)), "Controller '" + id + "' updated");
          });
    t.add("controller_remove", kController, "Remove a controller",
          {str("controller_id", "Controller to remove", true), cluster_param()}, [](Workspace& ws, const Json& a) {
              const auto id = a.at("controller_id").get<std::string>();
              Cluster& c = controller_cluster(ws, a, id);
              lookup(c.controllers, id, "controller", c);
              ws.mutate(c, [&](Cluster& x) { x.controllers.erase(id); });
              return ToolResult::ok(Json{{"controller_id", id}, {"cluster_id", c.cluster_id}},
                                    "Controller '" + id + "' removed");
          });
    t.add("controller_query", kController, "Return one controller, or every controller of the cluster",
          {str("controller_id", "Controller to query (default: all)"), cluster_param()},
          [](Workspace& ws, const Json& a) {
              if (auto id = opt_str(a, "controller_id")) {
                  Cluster& c = controller_cluster(ws, a, *id);
                  return ToolResult::ok(controller_view(c, lookup(c.controllers, *id, "controller", c)),
                                        "Controller '" + *id + "'");
              }
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"));
              Json list = Json::array();
              for (const auto& [cid, ctl] : c.controllers) list.push_back(controller_view(c, ctl));
              return ToolResult::ok(Json{{"cluster_id", c.cluster_id}, {"controllers", list}},
                                    std::to_string(list.size()) + " controller(s)");
          });
    t.add("controller_assign_to_system", kController, "Point a controller at another system",
          {str("controller_id", "Controller to reassign", true), str("system_id", "Target system", true),
           cluster_param()},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("controller_id").get<std::string>();
              const auto sid = a.at("system_id").get<std::string>();
              Cluster& c = controller_cluster(ws, a, id);
              lookup(c.controllers, id, "controller", c);
              ws.mutate(c, [&](Cluster& x) { x.controllers.at(id).assigned_system = sid; });
              return ToolResult::ok(controller_view(c, c.controllers.at(id)),
                                    "Controller '" + id + "' assigned to system '" + sid + "'");
          });
}

std::vector<ParamSpec> disturbance_fields(DisturbanceKind kind) {
    switch (kind) {
        case DisturbanceKind::Weather:
            return {num("mean_temp_C", "Daily mean outdoor temperature (°C)"),
                    num("temp_amplitude_C", "Half of the daily temperature swing (°C)"),
                    num("peak_irradiance_Wm2", "Solar irradiance at noon (W/m²)")};
        case DisturbanceKind::Occupancy:
            return {num("occupied_level", "Occupancy multiplier while occupied"),
                    num("away_level", "Occupancy multiplier while away")};
        case DisturbanceKind::Price:
            return {num("offpeak_price", "Off-peak energy price ($/kWh)"), num("peak_price", "Peak energy price ($/kWh)"),
                    num("peak_start_hour", "Peak window start hour"), num("peak_end_hour", "Peak window end hour")};
    }
    return {};
}

Cluster& disturbance_cluster(Workspace& ws, const Json& a, const std::string& id) {
    return ws.resolve_cluster(opt_str(a, "cluster_id"), [&](const Cluster& c) { return c.disturbances.count(id) > 0; });
}

Json disturbance_view(const Cluster& c, const Disturbance& d) {
    Json data = d;
    data.erase("series");
    if (!d.series.empty()) data["series_rows"] = d.series.size();
    data["cluster_id"] = c.cluster_id;
    return data;
}

void load_series(Disturbance& d, const std::string& path) {
    d.series = read_disturbance_csv(path, &d.series_step_s);
    d.source_path = path;
    d.profile = "series";
}

void disturbance_tools(Catalog& t) {
    struct KindInfo {
        const char* tool;
        DisturbanceKind kind;
        const char* description;
        ParamSpec profile;
        const char* default_profile;
    };
    const std::vector<KindInfo> kinds{
        {"disturbance_add_weather", DisturbanceKind::Weather, "Add an outdoor weather disturbance (temperature and irradiance)",
         str("profile", "Design-day profile name (parametrised by the fields below)"), "summer_design_day"},
        {"disturbance_add_occupancy", DisturbanceKind::Occupancy, "Add an occupancy schedule",
         enumeration("profile", "Schedule shape", {"residential", "office", "constant"}), "residential"},
        {"disturbance_add_price", DisturbanceKind::Price, "Add an electricity price signal with a peak window",
         enumeration("profile", "Tariff shape", {"tou", "flat"}), "tou"},
    };
    for (const auto& k : kinds) {
        auto params = std::vector<ParamSpec>{str("disturbance_id", "Unique identifier for the disturbance", true),
                                             cluster_param(), k.profile,
                                             str("csv_path", "CSV series (timestamp,outdoor_c,irradiance_wm2,occupancy,"
                                                             "price_per_kwh) replacing the profile")};
        for (auto& f : disturbance_fields(k.kind)) params.push_back(f);
        const auto kind = k.kind;
        const std::string default_profile = k.default_profile;
        t.add(k.tool, kDisturbance, k.description, params, [kind, default_profile](Workspace& ws, const Json& a) {
            const auto id = a.at("disturbance_id").get<std::string>();
            Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"));
            require_unused(c.disturbances, id, "disturbance", c);
            Disturbance d;
            d.disturbance_id = id;
            d.kind = kind;
            d.profile = a.value("profile", default_profile);
            apply_disturbance_patch(d, pick(a, disturbance_fields(kind)));
            if (auto path = opt_str(a, "csv_path")) load_series(d, *path);
            ws.mutate(c, [&](Cluster& x) { x.disturbances[id] = d; });
            return ToolResult::ok(disturbance_view(c, d), to_string(kind) + " disturbance '" + id +
                                                              "' added to cluster '" + c.cluster_id + "'");
        });
    }
    auto update_params = std::vector<ParamSpec>{str("disturbance_id", "Disturbance to update", true), cluster_param(),
                                                str("profile", "New profile name"),
                                                str("csv_path", "Replace the profile with this CSV series")};
    for (auto kind : {DisturbanceKind::Weather, DisturbanceKind::Occupancy, DisturbanceKind::Price}) {
        for (auto& f : disturbance_fields(kind)) update_params.push_back(f);
    }
    t.add("disturbance_update", kDisturbance, "Update disturbance parameters (shallow merge of the provided keys)",
          update_params, [](Workspace& ws, const Json& a) {
              const auto id = a.at("disturbance_id").get<std::string>();
              Cluster& c = disturbance_cluster(ws, a, id);
              lookup(c.disturbances, id, "disturbance", c);
              ws.mutate(c, [&](Cluster& x) {
                  Disturbance& d = x.disturbances.at(id);
                  Json patch = Json::object();
                  for (auto kind : {DisturbanceKind::Weather, DisturbanceKind::Occupancy, DisturbanceKind::Price}) {
                      patch.update(pick(a, disturbance_fields(kind)));
                  }
                  apply_disturbance_patch(d, patch);
                  if (auto p = opt_str(a, "profile")) {
                      d.profile = *p;
                      if (*p != "series") d.series.clear(), d.source_path.clear();
                  }
                  if (auto path = opt_str(a, "csv_path")) load_series(d, *path);
              });
              return ToolResult::ok(disturbance_view(c, c.disturbances.at(id)), "Disturbance '" + id + "' updated");
          });
    t.add("disturbance_remove", kDisturbance, "Remove a disturbance",
          {str("disturbance_id", "Disturbance to remove", true), cluster_param()}, [](Workspace& ws, const Json& a) {
              const auto id = a.at("disturbance_id").get<std::string>();
              Cluster& c = disturbance_cluster(ws, a, id);
              lookup(c.disturbances, id, "disturbance", c);
              ws.mutate(c, [&](Cluster& x) { x.disturbances.erase(id); });
              if (ws.selection["disturbance"] == id) ws.selection.erase("disturbance");
              return ToolResult::ok(Json{{"disturbance_id", id}, {"cluster_id", c.cluster_id}},
                                    "Disturbance '" + id + "' removed");
          });
    t.add("disturbance_query", kDisturbance, "Return one disturbance, or every disturbance of the cluster",
          {str("disturbance_id", "Disturbance to query (default: selected, else all)"), cluster_param()},
          [](Workspace& ws, const Json& a) {
              auto id = opt_str(a, "disturbance_id");
              if (!id && ws.selection.count("disturbance")) id = ws.selection.at("disturbance");
              if (id) {
                  Cluster& c = disturbance_cluster(ws, a, *id);
                  return ToolResult::ok(disturbance_view(c, lookup(c.disturbances, *id, "disturbance", c)),
                                        "Disturbance '" + *id + "'");
              }
              Cluster& c = ws.resolve_cluster(opt_str(a, "cluster_id"));
              Json list = Json::array();
              for (const auto& [did, d] : c.disturbances) list.push_back(disturbance_view(c, d));
              return ToolResult::ok(Json{{"cluster_id", c.cluster_id}, {"disturbances", list}},
                                    std::to_string(list.size()) + " disturbance(s)");
          });
    t.add("disturbance_select", kDisturbance, "Select the disturbance later calls default to",
          {str("disturbance_id", "Disturbance to select", true), cluster_param()}, [](Workspace& ws, const Json& a) {
              const auto id = a.at("disturbance_id").get<std::string>();
              Cluster& c = disturbance_cluster(ws, a, id);
              lookup(c.disturbances, id, "disturbance", c);
              ws.selection["disturbance"] = id;
              return ToolResult::ok(Json{{"disturbance_id", id}, {"cluster_id", c.cluster_id}},
                                    "Disturbance '" + id + "' selected");
          });
}

std::vector<ParamSpec> environment_fields() {
    return {integer("timestep_s", "Simulation timestep (s)"), num("horizon_hours", "Simulation horizon (h)"),
            num("start_hour", "Hour of day at the first step")};
}

void check_environment(const EnvironmentSettings& e) {
    if (e.timestep_s <= 0) throw Error("InvalidArgument", "timestep_s must be > 0");
    if (!(e.horizon_hours > 0)) throw Error("InvalidArgument", "horizon_hours must be > 0");
    if (!(e.start_hour >= 0 && e.start_hour < 24)) throw Error("InvalidArgument", "start_hour must lie in [0, 24)");
}

void environment_tools(Catalog& t) {
    auto add_params = std::vector<ParamSpec>{str("environment_id", "Unique identifier for the environment", true),
                                             boolean("select", "Select the environment for later runs (default true)")};
    for (auto& f : environment_fields()) add_params.push_back(f);
    t.add("environment_add", kEnvironment, "Add simulation environment settings (timestep, horizon, start hour)",
          add_params, [](Workspace& ws, const Json& a) {
              const auto id = a.at("environment_id").get<std::string>();
              if (ws.environments.count(id)) throw Error("DuplicateId", "environment '" + id + "' already exists");
              EnvironmentSettings e;
              e.environment_id = id;
              apply_environment_patch(e, pick(a, environment_fields()));
              check_environment(e);
              ws.environments[id] = e;
              if (a.value("select", true)) ws.selected_environment = id;
              return ToolResult::ok(Json(e), "Environment '" + id + "' added");
          });
    auto update_params = std::vector<ParamSpec>{str("environment_id", "Environment to update (default: selected)")};
    for (auto& f : environment_fields()) update_params.push_back(f);
    t.add("environment_update", kEnvironment, "Update environment settings (shallow merge of the provided keys)",
          update_params, [](Workspace& ws, const Json& a) {
              const auto id = a.value("environment_id", ws.selected_environment);
              auto it = ws.environments.find(id);
              if (it == ws.environments.end()) throw Error("UnknownId", "no environment '" + id + "'");
              EnvironmentSettings e = it->second;
              apply_environment_patch(e, pick(a, environment_fields()));
              check_environment(e);
              it->second = e;
              return ToolResult::ok(Json(e), "Environment '" + id + "' updated");
          });
    t.add("environment_select", kEnvironment, "Select the environment used by later simulation runs",
          {str("environment_id", "Environment to select", true)}, [](Workspace& ws, const Json& a) {
              const auto id = a.at("environment_id").get<std::string>();
              if (!ws.environments.count(id)) throw Error("UnknownId", "no environment '" + id + "'");
              ws.selected_environment = id;
              return ToolResult::ok(Json(ws.environments.at(id)), "Environment '" + id + "' selected");
          });
}

void simulation_tools(Catalog& t) {
    t.add("simulation_run", kSimulation, "Run a simulation of the active configuration and store it under run_id",
          {str("run_id", "Identifier for the stored result (default: run_<n>)"),
           str("config_id", "Configuration to simulate (default: active)"), cluster_param(),
           str("environment_id", "Environment settings to use (default: selected)"),
           num("horizon_hours", "Override the horizon (h)"), integer("timestep_s", "Override the timestep (s)")},
          [](Workspace& ws, const Json& a) {
              Workspace::RunRequest req;
              req.run_id = opt_str(a, "run_id");
              req.config_id = opt_str(a, "config_id");
              req.cluster_id = opt_str(a, "cluster_id");
              req.environment_id = opt_str(a, "environment_id");
              if (a.contains("horizon_hours")) req.horizon_hours = a.at("horizon_hours").get<double>();
              if (a.contains("timestep_s")) req.timestep_s = a.at("timestep_s").get<int>();
              const auto& r = ws.simulate(req);
              Json data = run_summary(r);
              data["metrics"] = analyze(r, Facet::Comprehensive);
              return ToolResult::ok(data, "Simulation '" + r.run_id + "' completed: " +
                                              std::to_string(r.records.size()) + " steps");
          });
    t.add("simulation_save", kSimulation, "Write a run's per-step records (JSON) and metric summary (CSV)",
          {str("run_id", "Run to save", true), str("path", "Output directory (default: results directory)")},
          [](Workspace& ws, const Json& a) {
              const auto id = a.at("run_id").get<std::string>();
              const auto paths = ws.save_run(id, fs::path(a.value("path", std::string())));
              return ToolResult::ok(Json{{"run_id", id}, {"json_path", paths[0]}, {"csv_path", paths[1]}},
                                    "Simulation '" + id + "' saved");
          });
    t.add("simulation_get_status", kSimulation, "Report the status of a run",
          {str("run_id", "Run to inspect", true)}, [](Workspace& ws, const Json& a) {
              const auto id = a.at("run_id").get<std::string>();
              const auto& r = ws.run(id);
              Json data = run_summary(r);
              data["persisted"] =
                  !ws.results_dir.empty() && fs::exists(ws.results_dir / "runs" / (id + ".json"));
              return ToolResult::ok(data, "Simulation '" + id + "' is " + r.status);
          });
    t.add("simulation_list_results", kSimulation, "List stored simulation runs", {},
          [](Workspace& ws, const Json&) {
              if (!ws.results_dir.empty() && fs::is_directory(ws.results_dir / "runs")) {
                  for (const auto& entry : fs::directory_iterator(ws.results_dir / "runs")) {
                      if (entry.path().extension() == ".json") ws.run(entry.path().stem().string());
                  }
              }
              Json list = Json::array();
              for (const auto& [id, r] : ws.runs) list.push_back(run_summary(r));
              return ToolResult::ok(Json{{"runs", list}}, std::to_string(list.size()) + " run(s)");
          });
}

void analysis_tools(Catalog& t) {
    const std::vector<std::pair<Facet, const char*>> facets{
        {Facet::Comfort, "Comfort metrics: violation steps outside the comfort band, temperature spread"},
        {Facet::Energy, "Energy metrics: HVAC, chiller, total and grid import energy (kWh)"},
        {Facet::Cost, "Cost metrics: grid import cost over the horizon and in the peak window ($)"},
        {Facet::Flexibility, "Flexibility metrics: PV curtailment, self-consumption, min SOC, cycles, peak import"},
        {Facet::Comprehensive, "All analysis metrics of a run"}};
    for (const auto& [facet, description] : facets) {
        const Facet f = facet;
        t.add("analysis_" + to_string(f), kAnalysis, description, {str("run_id", "Run to analyze", true)},
              [f](Workspace& ws, const Json& a) {
                  const auto id = a.at("run_id").get<std::string>();
                  Json metrics = analyze(ws.run(id), f);
                  return ToolResult::ok(Json{{"run_id", id}, {"facet", to_string(f)}, {"metrics", metrics}},
                                        to_string(f) + " analysis of '" + id + "'");
              });
    }
    for (const auto& [facet, description] : facets) {
        const Facet f = facet;
        t.add("comparison_" + to_string(f), kComparison,
              "Compare two runs on " + to_string(f) + " metrics (comparison relative to baseline)",
              {str("baseline_run_id", "Reference run", true), str("comparison_run_id", "Run compared against it", true)},
              [f](Workspace& ws, const Json& a) {
                  const auto base = a.at("baseline_run_id").get<std::string>();
                  const auto other = a.at("comparison_run_id").get<std::string>();
                  Json metrics = compare(ws.run(base), ws.run(other), f);
                  return ToolResult::ok(Json{{"baseline_run_id", base},
                                             {"comparison_run_id", other},
                                             {"facet", to_string(f)},
                                             {"metrics", metrics}},
                                        to_string(f) + " comparison of '" + other + "' against '" + base + "'");
              });
    }
}

}  // namespace

void register_runtime_tools(ToolRegistry& registry, std::shared_ptr<Workspace> workspace) {
    if (!workspace) throw Error("InvalidArgument", "runtime tools need a workspace");
    Catalog t(registry, std::move(workspace));
    config_tools(t);
    cluster_tools(t);
    building_tools(t);
    hvac_tools(t);
    der_tools(t);
    controller_tools(t);
    disturbance_tools(t);
    environment_tools(t);
    simulation_tools(t);
    analysis_tools(t);
}

std::shared_ptr<ToolRegistry> make_runtime_registry(std::shared_ptr<Workspace> workspace) {
    auto registry = std::make_shared<ToolRegistry>();
    register_runtime_tools(*registry, std::move(workspace));
    return registry;
}

const std::vector<std::string>& tool_categories() {
    static const std::vector<std::string> names{kConfig,      kCluster,     kBuilding,    kHvac,
                                                kDer,         kController,  kDisturbance, kEnvironment,
                                                kSimulation,  kAnalysis,    kComparison};
    return names;
}

const std::vector<ToolEntity>& tool_entity_table() {
    static const std::vector<ToolEntity> table = [] {
        std::vector<ToolEntity> t{
            {"config_create", "config", "add"},          {"config_save", "config", "save"},
            {"config_validate", "config", "validate"},   {"config_set_active", "config", "select"},
            {"config_list", "config", "query"},          {"config_query", "config", "query"},
            {"cluster_add", "cluster", "add"},           {"cluster_update", "cluster", "update"},
            {"cluster_remove", "cluster", "remove"},     {"cluster_query", "cluster", "query"},
            {"cluster_select", "cluster", "select"},     {"building_add", "building", "add"},
            {"building_update", "building", "update"},   {"building_remove", "building", "remove"},
            {"building_query", "building", "query"},     {"building_select", "building", "select"},
            {"building_add_thermal_zone", "thermal_zone", "add"},
            {"building_add_electrical_zone", "electrical_zone", "add"},
            {"building_add_water_zone", "water_zone", "add"},
            {"hvac_add", "hvac", "add"},                 {"hvac_update", "hvac", "update"},
            {"hvac_remove", "hvac", "remove"},           {"hvac_query", "hvac", "query"},
            {"hvac_assign_to_buildings", "hvac", "assign"}, {"hvac_select", "hvac", "select"},
            {"der_add", "der", "add"},                   {"der_update", "der", "update"},
            {"der_remove", "der", "remove"},             {"der_query", "der", "query"},
            {"der_assign_to_buildings", "der", "assign"}, {"der_select", "der", "select"},
            {"controller_add_hvac", "controller", "add"}, {"controller_add_der", "controller", "add"},
            {"controller_update", "controller", "update"}, {"controller_remove", "controller", "remove"},
            {"controller_query", "controller", "query"}, {"controller_assign_to_system", "controller", "assign"},
            {"disturbance_add_weather", "disturbance", "add"}, {"disturbance_add_occupancy", "disturbance", "add"},
            {"disturbance_add_price", "disturbance", "add"}, {"disturbance_update", "disturbance", "update"},
            {"disturbance_remove", "disturbance", "remove"}, {"disturbance_query", "disturbance", "query"},
            {"disturbance_select", "disturbance", "select"}, {"environment_add", "environment", "add"},
            {"environment_update", "environment", "update"}, {"environment_select", "environment", "select"},
            {"simulation_run", "simulation", "run"},     {"simulation_save", "simulation", "save"},
            {"simulation_get_status", "simulation", "query"}, {"simulation_list_results", "simulation", "query"},
        };
        for (const char* f : {"comfort", "energy", "cost", "flexibility", "comprehensive"}) {
            t.push_back({std::string("analysis_") + f, "analysis", "analyze"});
        }
        for (const char* f : {"comfort", "energy", "cost", "flexibility", "comprehensive"}) {
            t.push_back({std::string("comparison_") + f, "comparison", "compare"});
        }
        return t;
    }();
    return table;
}

}  // namespace buildops::runtime
