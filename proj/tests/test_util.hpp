#pragma once

#include <cmath>
#include <numbers>

// Independent closed forms used as oracles in several suites.
namespace testutil {

// Intersection area of two disks of radius r whose centres are d apart.
inline double lens_area(double r, double d) {
    if (d >= 2.0 * r) return 0.0;
    return 2.0 * r * r * std::acos(d / (2.0 * r)) - 0.5 * d * std::sqrt(4.0 * r * r - d * d);
}

inline double two_disk_union_area(double r, double d) { return 2.0 * std::numbers::pi * r * r - lens_area(r, d); }

}  // namespace testutil
