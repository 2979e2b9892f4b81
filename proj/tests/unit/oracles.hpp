#pragma once

// Independent oracles used by the test suites.  These deliberately avoid the
// library's own evaluation paths: linking numbers come from the Gauss double
// integral over discretized curves, and free Gaussian evolution from the
// closed-form complex-width solution.

#include <complex>
#include <vector>

#include "absim/geometry.hpp"
#include "absim/grid.hpp"

namespace absim::oracles {

// Gauss linking integral of two closed polylines (midpoint rule per segment pair).
double gauss_linking(const std::vector<Vec3>& curve_a, const std::vector<Vec3>& curve_b);

// Closed curve for a line: the chord of the ball |x| <= rho plus a great arc
// on the sphere connecting exit back to entry.
std::vector<Vec3> close_line_through_ball(const OrientedLine& line, double rho, int chord_pts,
                                          int arc_pts);

// polyline circle for oracle linking computations
std::vector<Vec3> circle_polyline(const Vec3& center, const Vec3& unit_normal, double radius,
                                  int n, int orientation);

// exact free evolution of the (unnormalized) Gaussian kernel
//   exp(-sum (x-c)^2/(4 sigma^2)) exp(i m v.x)
// evaluated at time t; multiply by the same factor used to normalize the t=0
// discrete field to compare against grid evolution
std::complex<double> free_gaussian(const Vec3& x, double t, const Vec3& center,
                                   const Vec3& sigma, const Vec3& velocity, double mass = 1.0);

}  // namespace absim::oracles
