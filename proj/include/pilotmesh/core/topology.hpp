#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pilotmesh/core/geometry.hpp"
#include "pilotmesh/core/overlay_id.hpp"

namespace pilotmesh {

using DeviceId = std::uint32_t;

enum class Role { member, pilot };

struct Device {
  DeviceId id = 0;
  Position position;
  std::uint64_t shared_mb = 0;
  bool pilot_eligible = false;
  Role role = Role::member;
  /// Pilots without WiFi cannot take part in intra-region (case 2) forwarding.
  bool wifi_connected = true;
};

/// One cell: devices under a single eNodeB at the origin.
struct Topology {
  double isd = 250.0;
  double d2d_range = 20.0;
  IdWidths widths{};
  std::vector<Device> devices;
  std::vector<DeviceId> pilots;

  /// Throws std::invalid_argument on any broken invariant: non-dense ids,
  /// pilots that are not eligible, non-positive ranges, devices outside the cell.
  void validate() const;

  const Device& device(DeviceId id) const { return devices.at(id); }
  std::vector<DeviceId> eligible() const;

  /// Marks `pilots` as the pilot set and updates device roles accordingly.
  void set_pilots(std::vector<DeviceId> pilot_ids);
};

/// Overlay identifiers are derived from ordinals, never drawn at random:
/// pilots get pilot segment = rank + 1 in `pilots`; members carry the segment
/// of the pilot they are attached to (0 when unattached) and ms = device id + 1.
OverlayId pilot_overlay_id(std::uint64_t enb, std::size_t pilot_rank, const IdWidths& widths);
OverlayId member_overlay_id(std::uint64_t enb, std::optional<std::size_t> pilot_rank, DeviceId id,
                            const IdWidths& widths);

}  // namespace pilotmesh
