#pragma once

namespace pilotmesh {

/// Planar coordinates in meters; the serving eNodeB sits at the origin.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

double squared_distance(Position a, Position b);
double distance(Position a, Position b);

/// Disc membership test: true iff |member - pilot|^2 <= r^2 (boundary inclusive).
/// Throws std::invalid_argument when r <= 0.
bool in_vicinity(Position member, Position pilot, double r);

/// Number of D2D relay hops needed to cover `meters` with radios of range `r`;
/// at least one hop, so co-located devices still count a single transfer hop.
int d2d_hops(double meters, double r);

}  // namespace pilotmesh
