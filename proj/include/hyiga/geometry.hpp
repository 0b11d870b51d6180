#pragma once

#include <cmath>
#include <numbers>

#include "hyiga/nurbs_patch.hpp"
#include "hyiga/refinement.hpp"

namespace hyiga::geometry {

/// Single bilinear element [0, L] x [0, t].
inline NurbsPatch straight_beam(double length, double thickness) {
    return NurbsPatch(KnotVector(1, {0, 0, 1, 1}), KnotVector(1, {0, 0, 1, 1}),
                      {{0.0, 0.0}, {length, 0.0}, {0.0, thickness}, {length, thickness}}, {1, 1, 1, 1});
}

/// Quarter annulus in the first quadrant, xi running from (0, r) to (r, 0)
/// and eta from the inner to the outer radius. Quadratic in xi, linear in eta.
inline NurbsPatch curved_beam(double r_in, double r_out) {
    const double w = 1.0 / std::numbers::sqrt2;
    return NurbsPatch(KnotVector(2, {0, 0, 0, 1, 1, 1}), KnotVector(1, {0, 0, 1, 1}),
                      {{0.0, r_in}, {r_in, r_in}, {r_in, 0.0}, {0.0, r_out}, {r_out, r_out}, {r_out, 0.0}},
                      {1, w, 1, 1, w, 1});
}

/// Tapered panel with corners (0,0), (48,44), (0,44), (48,60).
inline NurbsPatch cook_membrane() {
    return NurbsPatch(KnotVector(1, {0, 0, 1, 1}), KnotVector(1, {0, 0, 1, 1}),
                      {{0.0, 0.0}, {48.0, 44.0}, {0.0, 44.0}, {48.0, 60.0}}, {1, 1, 1, 1});
}

/// Quarter of a square plate [-4,0] x [0,4] with a unit hole at the origin,
/// two quadratic elements along the hole. eta = 0 is the hole, eta = 1 the
/// outer boundary, xi = 0 lies on y = 0 and xi = 1 on x = 0.
inline NurbsPatch plate_with_hole_quadratic() {
    const double s = std::numbers::sqrt2 - 1.0;  // tan(pi/8)
    const double w = 0.5 * (1.0 + 1.0 / std::numbers::sqrt2);
    return NurbsPatch(KnotVector(2, {0, 0, 0, 0.5, 1, 1, 1}), KnotVector(2, {0, 0, 0, 1, 1, 1}),
                      {{-1.0, 0.0}, {-1.0, s}, {-s, 1.0}, {0.0, 1.0},
                       {-2.5, 0.0}, {-2.5, 0.75}, {-0.75, 2.5}, {0.0, 2.5},
                       {-4.0, 0.0}, {-4.0, 4.0}, {-4.0, 4.0}, {0.0, 4.0}},
                      {1, w, w, 1, 1, 1, 1, 1, 1, 1, 1, 1});
}

/// Cubic control net as tabulated (four significant digits). The hole is
/// only approximately circular; analyses elevate the quadratic net instead.
inline NurbsPatch plate_with_hole_cubic_tabulated() {
    return NurbsPatch(KnotVector(3, {0, 0, 0, 0, 0.5, 1, 1, 1, 1}), KnotVector(3, {0, 0, 0, 0, 1, 1, 1, 1}),
                      {{-1, 0}, {-1, 0.2612}, {-0.7929, 0.7929}, {-0.2612, 1}, {0, 1},
                       {-2, 0}, {-2.0696, 1.5942}, {-2.0219, 2.0219}, {-1.5942, 2.0696}, {0, 2},
                       {-3, 0}, {-3.0673, 2.8376}, {-3.0798, 3.0798}, {-2.8376, 3.0673}, {0, 3},
                       {-4, 0}, {-4, 4}, {-4, 4}, {-4, 4}, {0, 4}},
                      {1, 0.9024, 0.8047, 0.9024, 1,
                       1, 0.9349, 0.8698, 0.9349, 1,
                       1, 0.9675, 0.9349, 0.9675, 1,
                       1, 1, 1, 1, 1});
}

}  // namespace hyiga::geometry
