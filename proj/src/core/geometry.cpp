#include "pilotmesh/core/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace pilotmesh {

double squared_distance(Position a, Position b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(Position a, Position b) { return std::sqrt(squared_distance(a, b)); }

bool in_vicinity(Position member, Position pilot, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("in_vicinity: range must be positive");
  return squared_distance(member, pilot) <= r * r;
}

int d2d_hops(double meters, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("d2d_hops: range must be positive");
  if (meters <= r) return 1;
  return static_cast<int>(std::ceil(meters / r));
}

}  // namespace pilotmesh
