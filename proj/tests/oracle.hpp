#pragma once

// Test-only oracles, independent of the library's Malus and chain code.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline double rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double sq(double v) { return v * v; }

using Vec2 = std::array<double, 2>;

inline Vec2 unit(double angle_rad) { return {std::cos(angle_rad), std::sin(angle_rad)}; }

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

// One polarizing filter in a chain: passes the component along `axis_deg`.
struct Filter {
  double axis_deg;
};

// Projection-postulate product for a photon polarized along `input_deg`:
// |<f1|in>|^2 |<f2|f1>|^2 ... using explicit unit vectors.
inline double filter_chain(double input_deg, const std::vector<Filter>& filters) {
  Vec2 state = unit(rad(input_deg));
  double p = 1.0;
  for (const Filter& f : filters) {
    const Vec2 axis = unit(rad(f.axis_deg));
    p *= sq(dot(axis, state));
    state = axis;
  }
  return p;
}

}  // namespace oracle
