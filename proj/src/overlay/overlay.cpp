#include "pilotmesh/overlay/overlay.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace pilotmesh::overlay {

std::string to_string(Link l) {
  switch (l) {
    case Link::bluetooth_d2d: return "bluetooth_d2d";
    case Link::wifi: return "wifi";
    case Link::cellular: return "cellular";
  }
  return "unknown";
}

std::string to_string(LookupCase c) {
  switch (c) {
    case LookupCase::case0: return "case0";
    case LookupCase::case1: return "case1";
    case LookupCase::case2: return "case2";
    case LookupCase::case3: return "case3";
  }
  return "unknown";
}

void LinkCounts::add(Link l, int n) {
  switch (l) {
    case Link::bluetooth_d2d: bluetooth_d2d += n; break;
    case Link::wifi: wifi += n; break;
    case Link::cellular: cellular += n; break;
  }
}

int LinkCounts::operator[](Link l) const {
  switch (l) {
    case Link::bluetooth_d2d: return bluetooth_d2d;
    case Link::wifi: return wifi;
    case Link::cellular: return cellular;
  }
  return 0;
}

Overlay::Overlay(Topology topology, std::uint64_t enb) : topo_(std::move(topology)) {
  topo_.validate();
  region_.enb = enb;
  state_.resize(topo_.devices.size());
  for (DeviceId p : topo_.pilots) {
    PilotTable t;
    t.pilot = p;
    t.id = pilot_overlay_id(enb, pilot_rank(p), topo_.widths);
    t.members[p] = true;
    tables_.emplace(p, std::move(t));
    state_[p].registered = true;
    state_[p].pilot = p;
    if (topo_.device(p).wifi_connected) region_.ring.push_back(p);
  }
  std::sort(region_.ring.begin(), region_.ring.end(),
            [&](DeviceId a, DeviceId b) { return tables_.at(a).id < tables_.at(b).id; });
}

const PilotTable& Overlay::table(DeviceId pilot) const {
  auto it = tables_.find(pilot);
  if (it == tables_.end()) throw std::invalid_argument(fmt::format("overlay: {} is not a pilot", pilot));
  return it->second;
}

bool Overlay::is_pilot(DeviceId d) const { return tables_.count(d) != 0; }

std::size_t Overlay::pilot_rank(DeviceId pilot) const {
  const auto it = std::lower_bound(topo_.pilots.begin(), topo_.pilots.end(), pilot);
  return static_cast<std::size_t>(it - topo_.pilots.begin());
}

void Overlay::check_device(DeviceId d) const {
  if (d >= state_.size()) throw std::invalid_argument(fmt::format("overlay: unknown device {}", d));
}

bool Overlay::registered(DeviceId d) const { return d < state_.size() && state_[d].registered && state_[d].active; }

bool Overlay::holds(DeviceId d, FileKey key) const { return d < state_.size() && state_[d].keys.count(key) != 0; }

std::optional<DeviceId> Overlay::pilot_of(DeviceId d) const {
  check_device(d);
  return state_[d].pilot;
}

int Overlay::hops_to_pilot(DeviceId d) const {
  check_device(d);
  return state_[d].hops;
}

const std::set<FileKey>& Overlay::keys_of(DeviceId d) const {
  check_device(d);
  return state_[d].keys;
}

OverlayId Overlay::overlay_id(DeviceId d) const {
  check_device(d);
  if (is_pilot(d)) return tables_.at(d).id;
  const auto& p = state_[d].pilot;
  return member_overlay_id(region_.enb, p ? std::optional<std::size_t>(pilot_rank(*p)) : std::nullopt, d,
                           topo_.widths);
}

void Overlay::detach(DeviceId d) {
  State& s = state_[d];
  if (!s.pilot || is_pilot(d)) return;
  const DeviceId p = *s.pilot;
  PilotTable& t = tables_.at(p);
  t.members.erase(d);
  for (auto it = t.meta_cache.begin(); it != t.meta_cache.end();) {
    it->second.erase(d);
    it = it->second.empty() ? t.meta_cache.erase(it) : std::next(it);
  }
  for (const FileKey& k : s.keys) {
    auto sk = t.stored_keys.find(k);
    if (sk != t.stored_keys.end()) {
      sk->second.erase(d);
      if (sk->second.empty()) t.stored_keys.erase(sk);
    }
    purge_region_entry(p, k);
  }
  s.pilot.reset();
  s.hops = 0;
}

Registration Overlay::join(DeviceId d, DeviceId p, int hops) {
  State& s = state_[d];
  s.registered = true;
  s.active = true;
  s.pilot = p;
  s.hops = hops;
  PilotTable& t = tables_.at(p);
  t.members[d] = true;
  for (const FileKey& k : s.keys) t.stored_keys[k].insert(d);
  return Registration{d, p, hops};
}

Registration Overlay::register_device(DeviceId d) {
  check_device(d);
  if (is_pilot(d)) return Registration{d, d, 0};
  detach(d);
  const Position pos = topo_.device(d).position;
  std::optional<DeviceId> best;
  double best_d2 = 0.0;
  for (const auto& [p, t] : tables_) {
    const Position pp = topo_.device(p).position;
    if (!in_vicinity(pos, pp, topo_.d2d_range)) continue;
    const double d2 = squared_distance(pos, pp);
    if (!best || d2 < best_d2) {
      best = p;
      best_d2 = d2;
    }
  }
  if (!best) {
    state_[d].registered = true;
    state_[d].active = true;
    return Registration{d, std::nullopt, 0};
  }
  return join(d, *best, 1);
}

Registration Overlay::attach(DeviceId d, DeviceId p) {
  check_device(d);
  if (!is_pilot(p)) throw std::invalid_argument(fmt::format("overlay: attach target {} is not a pilot", p));
  if (is_pilot(d)) {
    if (d != p) throw std::invalid_argument(fmt::format("overlay: pilot {} cannot attach to {}", d, p));
    return Registration{d, d, 0};
  }
  detach(d);
  const double meters = distance(topo_.device(d).position, topo_.device(p).position);
  return join(d, p, d2d_hops(meters, topo_.d2d_range));
}

void Overlay::store(DeviceId holder, FileKey key) {
  check_device(holder);
  check_key(key, topo_.widths.total());
  if (!registered(holder)) throw std::invalid_argument(fmt::format("overlay: device {} is not registered", holder));
  State& s = state_[holder];
  s.keys.insert(key);
  holders_[key].insert(holder);
  if (s.pilot) tables_.at(*s.pilot).stored_keys[key].insert(holder);
}

void Overlay::add_remote_key(FileKey key) {
  check_key(key, topo_.widths.total());
  remote_.insert(key);
}

std::optional<DeviceId> Overlay::pick_holder(const std::set<DeviceId>& candidates, FileKey key,
                                             std::optional<DeviceId> exclude) const {
  std::optional<DeviceId> best;
  unsigned best_pd = 0;
  for (DeviceId h : candidates) {
    if (exclude && h == *exclude) continue;
    if (!registered(h) || !holds(h, key)) continue;
    const unsigned pd = prefix_distance(key, overlay_id(h));
    if (!best || pd < best_pd) {
      best = h;
      best_pd = pd;
    }
  }
  return best;
}

std::optional<DeviceId> Overlay::nearest_holder(DeviceId requester, FileKey key) const {
  auto it = holders_.find(key);
  if (it == holders_.end()) return std::nullopt;
  const Position pos = topo_.device(requester).position;
  std::optional<DeviceId> best;
  double best_d2 = 0.0;
  for (DeviceId h : it->second) {
    if (h == requester || !registered(h)) continue;
    const double d2 = squared_distance(pos, topo_.device(h).position);
    if (!best || d2 < best_d2) {
      best = h;
      best_d2 = d2;
    }
  }
  return best;
}

int Overlay::ring_hops(DeviceId from, DeviceId to) const {
  const auto a = std::find(region_.ring.begin(), region_.ring.end(), from);
  const auto b = std::find(region_.ring.begin(), region_.ring.end(), to);
  if (a == region_.ring.end() || b == region_.ring.end()) {
    throw std::invalid_argument("overlay: ring_hops between pilots outside the WiFi ring");
  }
  const auto n = static_cast<std::ptrdiff_t>(region_.ring.size());
  const auto gap = static_cast<std::uint64_t>(((b - a) % n + n) % n);
  return std::popcount(gap);
}

LookupResult Overlay::lookup(DeviceId requester, FileKey key) const {
  check_device(requester);
  if (!registered(requester)) {
    throw std::invalid_argument(fmt::format("overlay: requester {} is not registered", requester));
  }
  LookupResult r;
  const auto& pilot = state_[requester].pilot;
  r.requester_pilot = pilot;

  if (holds(requester, key)) {
    r.found = true;
    r.case_used = pilot ? LookupCase::case1 : LookupCase::case0;
    r.holder = requester;
    r.holder_pilot = pilot;
    return r;
  }

  if (!pilot) {
    // eNodeB pairing: signaling over cellular, transfer over D2D.
    r.case_used = LookupCase::case0;
    r.links.add(Link::cellular);
    if (auto h = nearest_holder(requester, key)) {
      r.found = true;
      r.holder = h;
      r.holder_pilot = state_[*h].pilot;
      r.links.add(Link::cellular);
      r.links.add(Link::bluetooth_d2d);
    } else if (remote_.count(key)) {
      r.found = true;
      r.links.add(Link::cellular, 2);
    } else {
      r.links.add(Link::cellular);
    }
    r.hops = r.links.total();
    return r;
  }

  const DeviceId p = *pilot;
  const int to_pilot = requester == p ? 0 : 1;

  // Case 1: the requester's own pilot table.
  {
    const PilotTable& t = tables_.at(p);
    std::optional<DeviceId> h;
    if (auto it = t.meta_cache.find(key); it != t.meta_cache.end()) {
      h = pick_holder(it->second, key, requester);
      r.from_cache = h.has_value();
    }
    if (!h) {
      if (auto it = t.stored_keys.find(key); it != t.stored_keys.end()) h = pick_holder(it->second, key, requester);
    }
    if (h) {
      r.found = true;
      r.case_used = LookupCase::case1;
      r.holder = h;
      r.holder_pilot = p;
      r.links.add(Link::bluetooth_d2d, to_pilot + (*h == p ? 0 : 1));
      r.hops = r.links.total();
      return r;
    }
  }
  r.from_cache = false;

  // Case 2: WiFi-connected pilots of the region.
  const bool on_ring = std::find(region_.ring.begin(), region_.ring.end(), p) != region_.ring.end();
  if (on_ring) {
    std::set<DeviceId> cands;
    bool cached = false;
    if (auto it = region_.meta_cache.find(key); it != region_.meta_cache.end()) {
      for (DeviceId q : it->second) {
        if (q != p && std::find(region_.ring.begin(), region_.ring.end(), q) != region_.ring.end()) cands.insert(q);
      }
      cached = !cands.empty();
    }
    if (cands.empty()) {
      for (DeviceId q : region_.ring) {
        if (q != p && pilot_has_holder(q, key)) cands.insert(q);
      }
    }
    std::optional<DeviceId> best_q;
    std::tuple<unsigned, int, DeviceId> best_rank{};
    for (DeviceId q : cands) {
      const PilotTable& tq = tables_.at(q);
      const auto rank = std::make_tuple(prefix_distance(key, tq.id), ring_hops(p, q), q);
      if (!best_q || rank < best_rank) {
        best_q = q;
        best_rank = rank;
      }
    }
    if (best_q) {
      const PilotTable& tq = tables_.at(*best_q);
      std::optional<DeviceId> h;
      if (auto it = tq.meta_cache.find(key); it != tq.meta_cache.end()) h = pick_holder(it->second, key, requester);
      if (!h) {
        if (auto it = tq.stored_keys.find(key); it != tq.stored_keys.end()) h = pick_holder(it->second, key, requester);
      }
      if (h) {
        r.found = true;
        r.case_used = LookupCase::case2;
        r.holder = h;
        r.holder_pilot = best_q;
        r.from_cache = cached;
        r.ring_hops = std::get<1>(best_rank);
        r.links.add(Link::bluetooth_d2d, to_pilot + (*h == *best_q ? 0 : 1));
        r.links.add(Link::wifi, r.ring_hops + 1);
        r.hops = r.links.total();
        return r;
      }
    }
  }

  // Case 3: escalate through the eNodeB.
  r.case_used = LookupCase::case3;
  r.links.add(Link::bluetooth_d2d, to_pilot);
  r.links.add(Link::cellular);
  if (auto h = nearest_holder(requester, key)) {
    r.found = true;
    r.holder = h;
    r.holder_pilot = state_[*h].pilot;
    r.links.add(Link::cellular, 2);
  } else if (remote_.count(key)) {
    r.found = true;
    r.links.add(Link::cellular, 2);
  } else {
    r.links.add(Link::cellular);
  }
  r.hops = r.links.total();
  return r;
}

bool Overlay::pilot_has_holder(DeviceId pilot, FileKey key) const {
  const PilotTable& t = tables_.at(pilot);
  auto it = t.stored_keys.find(key);
  return it != t.stored_keys.end() && !it->second.empty();
}

void Overlay::purge_region_entry(DeviceId pilot, FileKey key) {
  if (tables_.count(pilot) && pilot_has_holder(pilot, key)) return;
  auto it = region_.meta_cache.find(key);
  if (it == region_.meta_cache.end()) return;
  it->second.erase(pilot);
  if (it->second.empty()) region_.meta_cache.erase(it);
}

void Overlay::cache_update(DeviceId requester, const LookupResult& result, FileKey key) {
  if (!result.found) return;
  store(requester, key);
  const auto& p = state_[requester].pilot;
  if (!p || result.case_used == LookupCase::case0) return;
  tables_.at(*p).meta_cache[key].insert(requester);
  switch (result.case_used) {
    case LookupCase::case1:
      if (result.holder && state_[*result.holder].pilot == p) tables_.at(*p).meta_cache[key].insert(*result.holder);
      break;
    case LookupCase::case2:
      if (result.holder && result.holder_pilot && tables_.count(*result.holder_pilot)) {
        tables_.at(*result.holder_pilot).meta_cache[key].insert(*result.holder);
        region_.meta_cache[key].insert(*result.holder_pilot);
      }
      region_.meta_cache[key].insert(*p);
      break;
    case LookupCase::case3:
      region_.meta_cache[key].insert(*p);
      break;
    case LookupCase::case0:
      break;
  }
}

void Overlay::leave(DeviceId d) {
  if (d >= state_.size() || !registered(d)) return;
  State& s = state_[d];

  if (is_pilot(d)) {
    std::vector<DeviceId> members;
    for (const auto& [m, status] : tables_.at(d).members) {
      if (m != d) members.push_back(m);
    }
    for (DeviceId m : members) detach(m);
    for (auto it = region_.meta_cache.begin(); it != region_.meta_cache.end();) {
      it->second.erase(d);
      it = it->second.empty() ? region_.meta_cache.erase(it) : std::next(it);
    }
    region_.ring.erase(std::remove(region_.ring.begin(), region_.ring.end(), d), region_.ring.end());
    tables_.erase(d);
    s.pilot.reset();
  } else {
    detach(d);
  }

  for (const FileKey& k : s.keys) {
    auto it = holders_.find(k);
    if (it == holders_.end()) continue;
    it->second.erase(d);
    if (it->second.empty()) holders_.erase(it);
  }
  s.keys.clear();
  s.registered = false;
  s.active = false;
}

bool Overlay::caches_sound() const {
  for (const auto& [p, t] : tables_) {
    for (const auto& [key, ids] : t.meta_cache) {
      for (DeviceId h : ids) {
        if (!registered(h) || !holds(h, key) || state_[h].pilot != p) return false;
      }
    }
  }
  for (const auto& [key, pilots] : region_.meta_cache) {
    for (DeviceId q : pilots) {
      if (!tables_.count(q) || !pilot_has_holder(q, key)) return false;
    }
  }
  return true;
}

}  // namespace pilotmesh::overlay
