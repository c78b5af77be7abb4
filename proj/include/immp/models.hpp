#pragma once

#include "immp/model.hpp"

namespace immp {

/// V(q) = (q^2 - 1)^2 in one dimension, xi(q) = q, unit masses.
SystemModel double_well_model();
double double_well_potential(double q);

/// Two-mode cosine a1 cos(theta) + a2 cos(2 theta).
struct SlowPotential {
  double a1 = 1.0;
  double a2 = 0.5;
  double value(double theta) const;
  double derivative(double theta) const;
};

/// Polar angle of a planar point.
double polar_angle(const Vec& q);

/// Planar particle with xi(q) = |q|^2 - 1 and
/// V(q) = v_slow(angle) + kappa/2 xi(q)^2.
SystemModel circle_model(const SlowPotential& slow, double kappa);

}  // namespace immp
