#include "pilotmesh/sim/config.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace pilotmesh::sim {

std::string to_string(Mode m) { return m == Mode::d2d_only ? "d2d_only" : "dht_d2d"; }

std::string to_string(Strategy s) { return s == Strategy::random ? "random" : "pmedian"; }

Mode parse_mode(const std::string& s) {
  if (s == "d2d_only") return Mode::d2d_only;
  if (s == "dht_d2d") return Mode::dht_d2d;
  throw std::invalid_argument(fmt::format("unknown mode '{}'", s));
}

Strategy parse_strategy(const std::string& s) {
  if (s == "random") return Strategy::random;
  if (s == "pmedian") return Strategy::pmedian;
  throw std::invalid_argument(fmt::format("unknown strategy '{}'", s));
}

std::size_t SimConfig::vicinity_size() const {
  const double users = static_cast<double>(n_users);
  const double pilots = static_cast<double>(n_pilots);
  return static_cast<std::size_t>(std::ceil(1.0 + (users - pilots) / pilots));
}

void SimConfig::validate() const {
  if (!(isd > 0.0) || !(d2d_range > 0.0)) throw std::invalid_argument("config: isd and d2d_range must be positive");
  if (n_users == 0 || n_pilots == 0 || n_eligible == 0) throw std::invalid_argument("config: counts must be positive");
  if (n_eligible > n_users) throw std::invalid_argument("config: n_eligible exceeds n_users");
  if (n_pilots > n_eligible) throw std::invalid_argument("config: n_pilots exceeds n_eligible");
  if (n_params < 1 || n_params > qoe::kParameterCatalog.size()) {
    throw std::invalid_argument(fmt::format("config: n_params must be in 1..{}", qoe::kParameterCatalog.size()));
  }
  if (iterations == 0) throw std::invalid_argument("config: iterations must be positive");
  if (!(new_file_fraction >= 0.0 && new_file_fraction <= 1.0)) {
    throw std::invalid_argument("config: new_file_fraction must be in [0, 1]");
  }
  if (!(wifi_pilot_fraction >= 0.0 && wifi_pilot_fraction <= 1.0)) {
    throw std::invalid_argument("config: wifi_pilot_fraction must be in [0, 1]");
  }
  if (std::isnan(p_cap_mb) || !(p_cap_mb > 0.0)) throw std::invalid_argument("config: p_cap_mb must be positive");
  if (!(measure.max_hops > 0.0) || !(measure.max_energy_units > 0.0) || measure.keyword_count == 0) {
    throw std::invalid_argument("config: measure scales must be positive");
  }
  measure.rating.validate();
  widths.validate();
  auto fits = [](std::size_t n, unsigned w) { return w >= 63 || n < (std::uint64_t{1} << w); };
  if (!fits(n_pilots + 1, widths.pilot) || !fits(n_users + 1, widths.ms)) {
    throw std::invalid_argument("config: id widths too narrow for the device counts");
  }
}

}  // namespace pilotmesh::sim
