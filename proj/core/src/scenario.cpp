#include "dpmimo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dpmimo/errors.hpp"

namespace dpmimo {

void Geometry::validate() const {
  if (!(square_side > 0.0)) throw std::invalid_argument("Geometry: square_side must be positive");
  if (min_distance < 0.0) throw std::invalid_argument("Geometry: min_distance must be >= 0");
  if (!(min_distance < square_side / 2.0)) {
    throw std::invalid_argument("Geometry: min_distance must be below square_side / 2");
  }
}

double degrees_to_radians(double deg) { return deg * std::numbers::pi / 180.0; }

double pathloss_db(double distance_m, double shadow_db) {
  if (!(distance_m > 0.0)) {
    std::ostringstream msg;
    msg << "distance " << distance_m << " m";
    throw Error(ErrorCode::kNonPositiveDistance, msg.str());
  }
  return -35.3 - 37.6 * std::log10(distance_m) + shadow_db;
}

std::vector<double> draw_cluster_angles(double nominal_angle, std::size_t n, RandomStream& rng,
                                        double half_width_deg) {
  const double half_width = degrees_to_radians(half_width_deg);
  std::vector<double> angles(n);
  for (auto& a : angles) a = rng.uniform(nominal_angle - half_width, nominal_angle + half_width);
  return angles;
}

double acceptance_probability(const Geometry& geometry) {
  const double r = geometry.min_distance;
  const double h = geometry.square_side / 2.0;
  const double square = geometry.square_side * geometry.square_side;
  double covered = 0.0;  // area of the exclusion disk inside the square
  if (r <= h) {
    covered = std::numbers::pi * r * r;
  } else if (r < h * std::numbers::sqrt2) {
    covered = r * r * (std::numbers::pi - 4.0 * std::acos(h / r)) + 4.0 * h * std::sqrt(r * r - h * h);
  } else {
    covered = square;
  }
  return std::max(0.0, 1.0 - covered / square);
}

std::vector<UEDrop> drop_ues(std::size_t k, const Geometry& geometry, RandomStream& rng,
                             const DropParams& params) {
  if (k == 0) throw std::invalid_argument("drop_ues: K must be at least 1");
  if (geometry.square_side > 0.0 && geometry.min_distance >= 0.0) {
    const double accept = acceptance_probability(geometry);
    if (accept < 1e-3) {
      std::ostringstream msg;
      msg << "acceptance probability " << accept;
      throw Error(ErrorCode::kGeometryInfeasible, msg.str());
    }
  }
  geometry.validate();

  const double half = geometry.square_side / 2.0;
  const Point2 bs = geometry.bs_position;
  std::vector<UEDrop> ues(k);
  for (auto& ue : ues) {
    double dx = 0.0;
    double dy = 0.0;
    do {
      dx = rng.uniform(-half, half);
      dy = rng.uniform(-half, half);
    } while (std::hypot(dx, dy) < geometry.min_distance);

    ue.position = {bs.x + dx, bs.y + dy};
    ue.distance = std::hypot(dx, dy);
    ue.nominal_angle = std::atan2(dx, dy);
    ue.shadow_db = rng.normal(0.0, params.shadow_std_db);
    ue.beta = db_to_linear(pathloss_db(ue.distance, ue.shadow_db));
    ue.cluster_angles =
        draw_cluster_angles(ue.nominal_angle, params.clusters, rng, params.cluster_half_width_deg);
  }
  return ues;
}

}  // namespace dpmimo
