#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dpmimo/random.hpp"

namespace dpmimo {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Square deployment area centered on the BS. The ULA lies along the x axis,
/// so broadside points along +y.
struct Geometry {
  double square_side = 500.0;  // m
  double min_distance = 15.0;  // m
  Point2 bs_position{};

  void validate() const;
};

/// Per-UE large-scale parameters of one drop.
struct UEDrop {
  Point2 position;
  double distance = 0.0;       // m
  double nominal_angle = 0.0;  // rad, azimuth from broadside
  double shadow_db = 0.0;
  double beta = 0.0;           // linear gain
  std::vector<double> cluster_angles;  // rad
};

struct DropParams {
  double shadow_std_db = 7.0;
  std::size_t clusters = 6;
  double cluster_half_width_deg = 40.0;
};

/// -35.3 - 37.6 log10(d) + shadow, in dB. Throws Error(kNonPositiveDistance).
double pathloss_db(double distance_m, double shadow_db);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// N i.i.d. uniform angles on [phi - half_width, phi + half_width].
std::vector<double> draw_cluster_angles(double nominal_angle, std::size_t n, RandomStream& rng,
                                        double half_width_deg = 40.0);

/// Probability that a uniform point in the square lies outside the
/// min_distance disk around the BS.
double acceptance_probability(const Geometry& geometry);

/// Drops K UEs uniformly in the square, rejecting points closer than
/// min_distance to the BS. Throws Error(kGeometryInfeasible) when the
/// acceptance probability is below 1e-3.
std::vector<UEDrop> drop_ues(std::size_t k, const Geometry& geometry, RandomStream& rng,
                             const DropParams& params = {});

double degrees_to_radians(double deg);

}  // namespace dpmimo
