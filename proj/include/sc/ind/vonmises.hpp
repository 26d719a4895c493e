#pragma once

#include <array>
#include <cmath>

namespace sc::ind {

/// Von Mises stress from the in-plane Voigt components {s11, s22, s12}.
/// Plane strain sets s33 = nu * (s11 + s22); plane stress sets s33 = 0.
inline double von_mises(const std::array<double, 3>& s, bool plane_strain, double nu) {
    const double s11 = s[0], s22 = s[1], s12 = s[2];
    const double s33 = plane_strain ? nu * (s11 + s22) : 0.0;
    const double d1 = s11 - s22, d2 = s22 - s33, d3 = s33 - s11;
    return std::sqrt(0.5 * (d1 * d1 + d2 * d2 + d3 * d3 + 6.0 * s12 * s12));
}

}  // namespace sc::ind
