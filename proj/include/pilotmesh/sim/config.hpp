#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "pilotmesh/core/overlay_id.hpp"
#include "pilotmesh/pmedian/instance.hpp"
#include "pilotmesh/qoe/qoe.hpp"

namespace pilotmesh::sim {

enum class Mode { d2d_only, dht_d2d };
enum class Strategy { random, pmedian };

std::string to_string(Mode m);
std::string to_string(Strategy s);
Mode parse_mode(const std::string& s);
Strategy parse_strategy(const std::string& s);

/// Percentage semantics of the QoE parameters.
struct MeasurePolicy {
  double max_hops = 12.0;             ///< chunk access: 100 (1 - hops / max_hops)
  double max_energy_units = 20.0;     ///< energy: 100 (1 - units / max_units)
  double cellular_energy = 5.0;       ///< energy units per hop and link type
  double wifi_energy = 2.0;
  double bluetooth_energy = 1.0;
  std::uint64_t keyword_count = 50;   ///< keyword of a key = key mod keyword_count
  qoe::RatingPolicy rating{};
};

struct SimConfig {
  double isd = 250.0;
  double d2d_range = 20.0;
  std::size_t n_pilots = 10;
  std::size_t n_users = 100;
  std::size_t n_eligible = 20;
  std::size_t n_params = 3;
  std::size_t initial_files = 1000;
  std::size_t files_per_iter = 500;
  std::size_t iterations = 20;
  double new_file_fraction = 1.0;
  Mode mode = Mode::dht_d2d;
  Strategy strategy = Strategy::pmedian;
  std::uint64_t seed = 1;
  std::uint64_t max_shared_mb = 500;
  double p_cap_mb = 6000.0;
  pmedian::CapacityModel capacity_model = pmedian::CapacityModel::per_member;
  IdWidths widths{};
  /// Fraction of pilots with WiFi; the rest cannot forward case-2 lookups.
  double wifi_pilot_fraction = 1.0;
  MeasurePolicy measure{};

  // Radio metadata carried for the record; the lookup model does not use it.
  std::size_t rb_num = 100;
  std::size_t single_carriers = 600;
  double total_power_dbw = -10.0;
  double circuit_power_w = 0.05;
  double carrier_ghz = 2.15;
  double path_loss_exponent = 3.5;

  double vicinity_radius() const { return isd / 10.0; }
  std::size_t vicinity_size() const;
  double rb_per_user() const { return static_cast<double>(rb_num) / static_cast<double>(n_users); }

  /// Throws std::invalid_argument on non-positive counts, n_pilots above
  /// n_eligible, n_eligible above n_users, n_params outside 1..9 or
  /// fractions outside [0, 1].
  void validate() const;
};

}  // namespace pilotmesh::sim
