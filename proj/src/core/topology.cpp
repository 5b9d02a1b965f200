#include "pilotmesh/core/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace pilotmesh {

void Topology::validate() const {
  if (!(isd > 0.0)) throw std::invalid_argument("topology: isd must be positive");
  if (!(d2d_range > 0.0)) throw std::invalid_argument("topology: d2d_range must be positive");
  widths.validate();
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const Device& d = devices[i];
    if (d.id != i) throw std::invalid_argument(fmt::format("topology: device ids must be dense, found {} at {}", d.id, i));
    if (!std::isfinite(d.position.x) || !std::isfinite(d.position.y)) {
      throw std::invalid_argument(fmt::format("topology: device {} has a non-finite position", d.id));
    }
    // Small slack for coordinates that went through a decimal round trip.
    if (squared_distance(d.position, Position{}) > isd * isd * (1.0 + 1e-9)) {
      throw std::invalid_argument(fmt::format("topology: device {} lies outside the cell disc", d.id));
    }
    if (d.role == Role::pilot && !d.pilot_eligible) {
      throw std::invalid_argument(fmt::format("topology: device {} is a pilot but not eligible", d.id));
    }
  }
  for (DeviceId p : pilots) {
    if (p >= devices.size()) throw std::invalid_argument(fmt::format("topology: unknown pilot id {}", p));
    if (!devices[p].pilot_eligible) throw std::invalid_argument(fmt::format("topology: pilot {} is not eligible", p));
  }
}

std::vector<DeviceId> Topology::eligible() const {
  std::vector<DeviceId> out;
  for (const Device& d : devices) {
    if (d.pilot_eligible) out.push_back(d.id);
  }
  return out;
}

void Topology::set_pilots(std::vector<DeviceId> pilot_ids) {
  std::sort(pilot_ids.begin(), pilot_ids.end());
  pilot_ids.erase(std::unique(pilot_ids.begin(), pilot_ids.end()), pilot_ids.end());
  for (Device& d : devices) d.role = Role::member;
  for (DeviceId p : pilot_ids) devices.at(p).role = Role::pilot;
  pilots = std::move(pilot_ids);
  validate();
}

OverlayId pilot_overlay_id(std::uint64_t enb, std::size_t pilot_rank, const IdWidths& widths) {
  return OverlayId::encode(enb, pilot_rank + 1, 0, widths);
}

OverlayId member_overlay_id(std::uint64_t enb, std::optional<std::size_t> pilot_rank, DeviceId id,
                            const IdWidths& widths) {
  return OverlayId::encode(enb, pilot_rank ? *pilot_rank + 1 : 0, std::uint64_t{id} + 1, widths);
}

}  // namespace pilotmesh
