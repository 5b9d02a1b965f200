#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pilotmesh/core/overlay_id.hpp"
#include "pilotmesh/core/topology.hpp"

namespace pilotmesh::overlay {

enum class Link { bluetooth_d2d, wifi, cellular };

/// case0: eNodeB-paired direct D2D (no overlay); case1: within the vicinity;
/// case2: across WiFi-connected pilots of the region; case3: through the eNodeB.
enum class LookupCase { case0, case1, case2, case3 };

std::string to_string(Link l);
std::string to_string(LookupCase c);

struct LinkCounts {
  int bluetooth_d2d = 0;
  int wifi = 0;
  int cellular = 0;

  void add(Link l, int n = 1);
  int operator[](Link l) const;
  int total() const { return bluetooth_d2d + wifi + cellular; }

  friend bool operator==(const LinkCounts&, const LinkCounts&) = default;
};

struct LookupResult {
  bool found = false;
  LookupCase case_used = LookupCase::case1;
  int hops = 0;  ///< request-path edges; case2 adds one WiFi edge for the return leg
  LinkCounts links;
  std::optional<DeviceId> holder;
  std::optional<DeviceId> requester_pilot;
  std::optional<DeviceId> holder_pilot;
  int ring_hops = 0;
  bool from_cache = false;  ///< resolved from a meta-data cache
};

struct PilotTable {
  DeviceId pilot = 0;
  OverlayId id;
  std::map<DeviceId, bool> members;  ///< member -> status (true = active)
  std::map<FileKey, std::set<DeviceId>> stored_keys;
  std::map<FileKey, std::set<DeviceId>> meta_cache;
};

struct RegionIndex {
  std::uint64_t enb = 1;
  std::vector<DeviceId> ring;  ///< WiFi-connected pilots ordered by overlay id
  std::map<FileKey, std::set<DeviceId>> meta_cache;  ///< key -> pilots that retrieved it
};

struct Registration {
  DeviceId device = 0;
  std::optional<DeviceId> pilot;
  int hops_to_pilot = 0;  ///< 0 for pilots and unattached devices
};

/// Two-tier DHT for one eNodeB region. Pilots come from the topology's pilot
/// set and are registered on construction; members join through
/// register_device (disc rule) or attach (explicit association).
class Overlay {
 public:
  explicit Overlay(Topology topology, std::uint64_t enb = 1);

  const Topology& topology() const { return topo_; }
  const RegionIndex& region() const { return region_; }
  const PilotTable& table(DeviceId pilot) const;

  /// Attaches a member to the covering pilot nearest to it (ties by id);
  /// members outside every pilot disc stay unattached. Pilots map to themselves.
  Registration register_device(DeviceId device);
  /// Associates a member with `pilot` regardless of range; hop count is the
  /// number of D2D relay hops between them.
  Registration attach(DeviceId device, DeviceId pilot);

  /// Records that `holder` stores `key`.
  void store(DeviceId holder, FileKey key);
  /// Makes `key` retrievable from another region through the eNodeB.
  void add_remote_key(FileKey key);

  LookupResult lookup(DeviceId requester, FileKey key) const;

  /// Replicates the key at the requester and updates the meta-data caches.
  /// No-op for lookups that did not find the key. Idempotent.
  void cache_update(DeviceId requester, const LookupResult& result, FileKey key);

  /// Removes a device: table membership, stored keys and every cache entry
  /// naming it. A leaving pilot detaches its members. Unknown devices are a no-op.
  void leave(DeviceId device);

  bool registered(DeviceId device) const;
  bool holds(DeviceId device, FileKey key) const;
  std::optional<DeviceId> pilot_of(DeviceId device) const;
  int hops_to_pilot(DeviceId device) const;
  OverlayId overlay_id(DeviceId device) const;
  const std::set<FileKey>& keys_of(DeviceId device) const;

  /// Greedy finger hops between two ring pilots: the popcount of their
  /// clockwise ring-position distance.
  int ring_hops(DeviceId from_pilot, DeviceId to_pilot) const;

  /// Every cached holder still stores the key and every cached pilot still
  /// has a holder of it in its vicinity.
  bool caches_sound() const;

 private:
  struct State {
    bool registered = false;
    bool active = true;
    std::optional<DeviceId> pilot;
    int hops = 0;
    std::set<FileKey> keys;
  };

  bool is_pilot(DeviceId d) const;
  std::size_t pilot_rank(DeviceId pilot) const;
  void check_device(DeviceId d) const;
  void detach(DeviceId d);
  Registration join(DeviceId d, DeviceId pilot, int hops);
  std::optional<DeviceId> pick_holder(const std::set<DeviceId>& candidates, FileKey key,
                                      std::optional<DeviceId> exclude) const;
  std::optional<DeviceId> nearest_holder(DeviceId requester, FileKey key) const;
  bool pilot_has_holder(DeviceId pilot, FileKey key) const;
  void purge_region_entry(DeviceId pilot, FileKey key);

  Topology topo_;
  RegionIndex region_;
  std::map<DeviceId, PilotTable> tables_;
  std::vector<State> state_;
  std::map<FileKey, std::set<DeviceId>> holders_;  ///< eNodeB view of every stored key
  std::set<FileKey> remote_;
};

}  // namespace pilotmesh::overlay
