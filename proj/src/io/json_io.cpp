#include "pilotmesh/io/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace pilotmesh::io {

SchemaError::SchemaError(std::string pointer, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", pointer.empty() ? "/" : pointer, message)),
      pointer_(std::move(pointer)) {}

namespace {

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t idx) { return ptr + "/" + std::to_string(idx); }

const Json& field(const Json& j, const std::string& ptr, const char* key) {
  if (!j.is_object()) throw SchemaError(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(child(ptr, key), "missing required field");
  return *it;
}

double number(const Json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected a number");
  return j.get<double>();
}

std::uint64_t unsigned_int(const Json& j, const std::string& ptr) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw SchemaError(ptr, "expected a non-negative integer");
}

bool boolean(const Json& j, const std::string& ptr) {
  if (!j.is_boolean()) throw SchemaError(ptr, "expected a boolean");
  return j.get<bool>();
}

std::string text(const Json& j, const std::string& ptr) {
  if (!j.is_string()) throw SchemaError(ptr, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const Json& j, const std::string& ptr) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(ptr, i)));
  return out;
}

// Wraps a validate() call so its message carries the pointer of the object.
template <class F>
void checked(const std::string& ptr, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(ptr, e.what());
  } catch (const std::out_of_range& e) {
    throw SchemaError(ptr, e.what());
  }
}

std::string model_name(pmedian::CapacityModel m) {
  return m == pmedian::CapacityModel::per_member ? "per_member" : "pilot_data_once";
}

pmedian::CapacityModel parse_model(const Json& j, const std::string& ptr) {
  const std::string s = text(j, ptr);
  if (s == "per_member") return pmedian::CapacityModel::per_member;
  if (s == "pilot_data_once") return pmedian::CapacityModel::pilot_data_once;
  throw SchemaError(ptr, "expected per_member or pilot_data_once");
}

Json widths_json(const IdWidths& w) { return Json::array({w.enb, w.pilot, w.ms}); }

IdWidths widths_from(const Json& j, const std::string& ptr) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(ptr, "expected [b, p, h]");
  IdWidths w;
  w.enb = static_cast<unsigned>(unsigned_int(j[0], child(ptr, 0)));
  w.pilot = static_cast<unsigned>(unsigned_int(j[1], child(ptr, 1)));
  w.ms = static_cast<unsigned>(unsigned_int(j[2], child(ptr, 2)));
  checked(ptr, [&] { w.validate(); });
  return w;
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError(fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError(fmt::format("cannot write {}", path.string()));
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

pmedian::Instance instance_from_json(const Json& j) {
  pmedian::Instance inst;
  inst.demands = numbers(field(j, "", "demands"), "/demands");
  inst.pilot_data = numbers(field(j, "", "pilot_data"), "/pilot_data");
  const Json& dist = field(j, "", "dist");
  if (!dist.is_array() || dist.size() != inst.members()) throw SchemaError("/dist", "expected one row per member");
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto row = numbers(dist[i], child("/dist", i));
    if (row.size() != inst.eligible()) throw SchemaError(child("/dist", i), "expected one entry per eligible pilot");
    inst.dist.insert(inst.dist.end(), row.begin(), row.end());
  }
  inst.pilots_to_open = unsigned_int(field(j, "", "P"), "/P");
  if (auto it = j.find("P_cap"); it != j.end() && !it->is_null()) inst.capacity = number(*it, "/P_cap");
  checked("", [&] { inst.validate(); });
  return inst;
}

Json to_json(const pmedian::Instance& inst) {
  Json j;
  j["demands"] = inst.demands;
  j["pilot_data"] = inst.pilot_data;
  Json dist = Json::array();
  for (std::size_t i = 0; i < inst.members(); ++i) {
    Json row = Json::array();
    for (std::size_t q = 0; q < inst.eligible(); ++q) row.push_back(inst.h(i, q));
    dist.push_back(std::move(row));
  }
  j["dist"] = std::move(dist);
  j["P"] = inst.pilots_to_open;
  j["P_cap"] = inst.capacitated() ? Json(inst.capacity) : Json(nullptr);
  return j;
}

bool is_scenario(const Json& j) { return j.is_object() && j.contains("devices"); }

Topology topology_from_json(const Json& j) {
  Topology t;
  t.isd = number(field(j, "", "isd"), "/isd");
  t.d2d_range = number(field(j, "", "d2d_range"), "/d2d_range");
  t.widths = widths_from(field(j, "", "id_widths"), "/id_widths");
  const Json& devs = field(j, "", "devices");
  if (!devs.is_array()) throw SchemaError("/devices", "expected an array");
  for (std::size_t i = 0; i < devs.size(); ++i) {
    const std::string ptr = child("/devices", i);
    Device d;
    d.id = static_cast<DeviceId>(unsigned_int(field(devs[i], ptr, "id"), child(ptr, "id")));
    if (d.id != i) throw SchemaError(child(ptr, "id"), "ids must be dense ordinals in order");
    d.position.x = number(field(devs[i], ptr, "x"), child(ptr, "x"));
    d.position.y = number(field(devs[i], ptr, "y"), child(ptr, "y"));
    d.shared_mb = unsigned_int(field(devs[i], ptr, "shared_mb"), child(ptr, "shared_mb"));
    d.pilot_eligible = boolean(field(devs[i], ptr, "pilot_eligible"), child(ptr, "pilot_eligible"));
    t.devices.push_back(d);
  }
  checked("", [&] { t.validate(); });
  return t;
}

Json to_json(const Topology& topo) {
  Json j;
  j["isd"] = topo.isd;
  j["d2d_range"] = topo.d2d_range;
  j["id_widths"] = widths_json(topo.widths);
  Json devs = Json::array();
  for (const Device& d : topo.devices) {
    devs.push_back(Json{{"id", d.id},
                        {"x", d.position.x},
                        {"y", d.position.y},
                        {"shared_mb", d.shared_mb},
                        {"pilot_eligible", d.pilot_eligible}});
  }
  j["devices"] = std::move(devs);
  return j;
}

Json to_json(const pmedian::SolveReport& r, bool with_trace) {
  Json j;
  j["objective"] = r.primal_objective;
  j["dual_bound"] = r.dual_bound;
  j["open_pilots"] = r.open_pilots();
  j["assignment"] = r.member_pilots();
  j["iterations"] = r.iterations;
  j["stop"] = pmedian::to_string(r.stop);
  j["repaired"] = r.repaired;
  j["capacity_violations"] = r.capacity_violations;
  if (with_trace) {
    Json trace = Json::array();
    for (const auto& it : r.trace) {
      trace.push_back(Json{{"k", it.k},
                           {"dual", it.dual},
                           {"best_dual", it.best_dual},
                           {"primal", it.primal},
                           {"best_primal", it.best_primal},
                           {"step_scale", it.step_scale},
                           {"step", it.step}});
    }
    j["trace"] = std::move(trace);
  }
  return j;
}

Json to_json(const pmedian::OracleResult& r) {
  Json j;
  j["feasible"] = r.feasible;
  j["objective"] = r.feasible ? Json(r.objective) : Json(nullptr);
  j["open_pilots"] = r.assignment.open_pilots();
  j["assignment"] = r.assignment.member_pilots();
  j["subsets_examined"] = r.subsets_examined;
  return j;
}

qoe::SatisfactionReport report_from_json(const Json& j) {
  const Json& params = field(j, "", "params");
  if (!params.is_array() || params.empty()) throw SchemaError("/params", "expected a non-empty array");
  qoe::SatisfactionReport r;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string ptr = child("/params", i);
    qoe::RatedParam p;
    p.name = text(field(params[i], ptr, "name"), child(ptr, "name"));
    const Json& rating = field(params[i], ptr, "rating");
    if (!rating.is_number_integer()) throw SchemaError(child(ptr, "rating"), "expected an integer in [-2, 2]");
    checked(child(ptr, "rating"), [&] { p.rating = qoe::Rating(rating.get<int>()); });
    r.params.push_back(std::move(p));
  }
  return r;
}

Json to_json(const qoe::SatisfactionReport& r) {
  Json params = Json::array();
  for (const auto& p : r.params) params.push_back(Json{{"name", p.name}, {"rating", p.rating.value()}});
  return Json{{"params", std::move(params)}};
}

namespace {

// Reads keys of obj into a struct; every key of obj must be consumed.
class Reader {
 public:
  Reader(const Json& obj, std::string ptr) : obj_(obj), ptr_(std::move(ptr)) {
    if (!obj_.is_object()) throw SchemaError(ptr_, "expected an object");
  }

  const Json* take(const char* key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }
  std::string at(const char* key) const { return child(ptr_, key); }

  void size(const char* key, std::size_t& v) {
    if (auto* j = take(key)) v = unsigned_int(*j, at(key));
  }
  void u64(const char* key, std::uint64_t& v) {
    if (auto* j = take(key)) v = unsigned_int(*j, at(key));
  }
  void real(const char* key, double& v) {
    if (auto* j = take(key)) v = number(*j, at(key));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw SchemaError(child(ptr_, it.key()), "unknown field");
    }
  }

 private:
  const Json& obj_;
  std::string ptr_;
  std::set<std::string> seen_;
};

}  // namespace

sim::SimConfig config_from_json(const Json& j, sim::SimConfig cfg) {
  Reader r(j, "");
  r.real("isd", cfg.isd);
  r.real("d2d_range", cfg.d2d_range);
  r.size("n_pilots", cfg.n_pilots);
  r.size("n_users", cfg.n_users);
  r.size("n_eligible", cfg.n_eligible);
  r.size("n_params", cfg.n_params);
  r.size("initial_files", cfg.initial_files);
  r.size("files_per_iter", cfg.files_per_iter);
  r.size("iterations", cfg.iterations);
  r.real("new_file_fraction", cfg.new_file_fraction);
  if (auto* m = r.take("mode")) {
    checked(r.at("mode"), [&] { cfg.mode = sim::parse_mode(text(*m, r.at("mode"))); });
  }
  if (auto* s = r.take("strategy")) {
    checked(r.at("strategy"), [&] { cfg.strategy = sim::parse_strategy(text(*s, r.at("strategy"))); });
  }
  r.u64("seed", cfg.seed);
  r.u64("max_shared_mb", cfg.max_shared_mb);
  if (auto* p = r.take("p_cap_mb")) cfg.p_cap_mb = p->is_null() ? pmedian::kUncapacitated : number(*p, r.at("p_cap_mb"));
  if (auto* m = r.take("capacity_model")) cfg.capacity_model = parse_model(*m, r.at("capacity_model"));
  if (auto* w = r.take("id_widths")) cfg.widths = widths_from(*w, r.at("id_widths"));
  r.real("wifi_pilot_fraction", cfg.wifi_pilot_fraction);
  if (auto* mj = r.take("measure")) {
    Reader m(*mj, r.at("measure"));
    m.real("max_hops", cfg.measure.max_hops);
    m.real("max_energy_units", cfg.measure.max_energy_units);
    m.real("cellular_energy", cfg.measure.cellular_energy);
    m.real("wifi_energy", cfg.measure.wifi_energy);
    m.real("bluetooth_energy", cfg.measure.bluetooth_energy);
    m.u64("keyword_count", cfg.measure.keyword_count);
    if (auto* b = m.take("rating_bounds")) {
      const auto v = numbers(*b, m.at("rating_bounds"));
      if (v.size() != 4) throw SchemaError(m.at("rating_bounds"), "expected four bounds");
      std::copy(v.begin(), v.end(), cfg.measure.rating.bounds.begin());
    }
    m.finish();
  }
  r.size("rb_num", cfg.rb_num);
  r.size("single_carriers", cfg.single_carriers);
  r.real("total_power_dbw", cfg.total_power_dbw);
  r.real("circuit_power_w", cfg.circuit_power_w);
  r.real("carrier_ghz", cfg.carrier_ghz);
  r.real("path_loss_exponent", cfg.path_loss_exponent);
  r.finish();
  checked("", [&] {
    cfg.validate();
    cfg.measure.rating.validate();
  });
  return cfg;
}

Json to_json(const sim::SimConfig& cfg) {
  Json j;
  j["isd"] = cfg.isd;
  j["d2d_range"] = cfg.d2d_range;
  j["n_pilots"] = cfg.n_pilots;
  j["n_users"] = cfg.n_users;
  j["n_eligible"] = cfg.n_eligible;
  j["n_params"] = cfg.n_params;
  j["initial_files"] = cfg.initial_files;
  j["files_per_iter"] = cfg.files_per_iter;
  j["iterations"] = cfg.iterations;
  j["new_file_fraction"] = cfg.new_file_fraction;
  j["mode"] = sim::to_string(cfg.mode);
  j["strategy"] = sim::to_string(cfg.strategy);
  j["seed"] = cfg.seed;
  j["max_shared_mb"] = cfg.max_shared_mb;
  j["p_cap_mb"] = cfg.p_cap_mb == pmedian::kUncapacitated ? Json(nullptr) : Json(cfg.p_cap_mb);
  j["capacity_model"] = model_name(cfg.capacity_model);
  j["id_widths"] = widths_json(cfg.widths);
  j["wifi_pilot_fraction"] = cfg.wifi_pilot_fraction;
  j["measure"] = Json{{"max_hops", cfg.measure.max_hops},
                      {"max_energy_units", cfg.measure.max_energy_units},
                      {"cellular_energy", cfg.measure.cellular_energy},
                      {"wifi_energy", cfg.measure.wifi_energy},
                      {"bluetooth_energy", cfg.measure.bluetooth_energy},
                      {"keyword_count", cfg.measure.keyword_count},
                      {"rating_bounds", cfg.measure.rating.bounds}};
  j["rb_num"] = cfg.rb_num;
  j["single_carriers"] = cfg.single_carriers;
  j["total_power_dbw"] = cfg.total_power_dbw;
  j["circuit_power_w"] = cfg.circuit_power_w;
  j["carrier_ghz"] = cfg.carrier_ghz;
  j["path_loss_exponent"] = cfg.path_loss_exponent;
  return j;
}

}  // namespace pilotmesh::io
