// Rotation angles carried as continuous lifts, with mod-2pi comparisons done
// by distance to the nearest multiple of 2pi (never naive subtraction).

#pragma once

#include <cmath>
#include <numbers>

namespace curvatura {

struct RotationAngle {
    double lift = 0;  // radians, continuous lift

    // Representative of the class in [0, 2pi).
    double mod_two_pi() const {
        const double tau = 2 * std::numbers::pi;
        double r = std::fmod(lift, tau);
        if (r < 0) r += tau;
        return r;
    }

    // Distance from (a - b) to the nearest multiple of 2pi.
    static double circle_distance(double a, double b) {
        const double tau = 2 * std::numbers::pi;
        const double d = std::fmod(a - b, tau);
        return std::min(std::fabs(d), tau - std::fabs(d));
    }

    double circle_distance_to(double other) const { return circle_distance(lift, other); }

    friend RotationAngle operator+(RotationAngle a, RotationAngle b) { return {a.lift + b.lift}; }
    friend RotationAngle operator-(RotationAngle a) { return {-a.lift}; }
};

}  // namespace curvatura
