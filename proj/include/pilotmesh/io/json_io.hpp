#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "pilotmesh/core/topology.hpp"
#include "pilotmesh/pmedian/instance.hpp"
#include "pilotmesh/pmedian/oracle.hpp"
#include "pilotmesh/pmedian/solver.hpp"
#include "pilotmesh/qoe/qoe.hpp"
#include "pilotmesh/sim/config.hpp"

namespace pilotmesh::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "pilotmesh 1.0.0";

/// Input that does not match its schema. `pointer` locates the offending value.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string pointer, const std::string& message);
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

/// Malformed JSON text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or unreadable file.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// {demands, pilot_data, dist:[[...]], P, P_cap}; P_cap null or absent means uncapacitated.
pmedian::Instance instance_from_json(const Json& j);
Json to_json(const pmedian::Instance& inst);

/// {isd, d2d_range, id_widths:[b,p,h], devices:[{id, x, y, shared_mb, pilot_eligible}]}.
/// Unknown top-level keys (provenance headers) are ignored.
Topology topology_from_json(const Json& j);
Json to_json(const Topology& topo);

/// True when j looks like a scenario rather than an instance.
bool is_scenario(const Json& j);

Json to_json(const pmedian::SolveReport& r, bool with_trace);
Json to_json(const pmedian::OracleResult& r);

/// {params:[{name, rating}]} in rank order.
qoe::SatisfactionReport report_from_json(const Json& j);
Json to_json(const qoe::SatisfactionReport& r);

/// Every SimConfig field under its own name; keys absent from j keep the
/// values of `base`. Unknown keys are schema errors.
sim::SimConfig config_from_json(const Json& j, sim::SimConfig base = {});
Json to_json(const sim::SimConfig& cfg);

/// Full-precision number text, shortest round-trip form.
std::string dump(const Json& j);

}  // namespace pilotmesh::io
