#pragma once

#include <compare>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace polaudit {

/// Absolute tolerance for closed-form identities between O(1) trig products.
inline constexpr double kIdentityTol = 1e-12;

/// A linear polarization axis measured from the x axis.
///
/// Axes are identified modulo pi, so the stored value is always the
/// canonical representative in [0, pi).
class Angle {
 public:
  constexpr Angle() = default;

  static Angle radians(double rad) { return Angle(canonicalize(rad)); }
  static Angle degrees(double deg) { return radians(deg / 180.0 * std::numbers::pi); }

  static Angle x_axis() { return Angle(0.0); }
  static Angle y_axis() { return Angle(std::numbers::pi / 2); }

  double rad() const { return rad_; }
  double deg() const { return rad_ / std::numbers::pi * 180.0; }

  /// Returns the axis rotated by `delta` radians.
  Angle rotated(double delta) const { return radians(rad_ + delta); }

  static double canonicalize(double rad);

  friend bool operator==(const Angle&, const Angle&) = default;

 private:
  explicit constexpr Angle(double canonical) : rad_(canonical) {}
  double rad_ = 0.0;
};

/// Orthogonal complement, the axis 90 degrees away.
Angle complement(Angle a);

/// Malus-law projection probability |<a|b>|^2 = cos^2(a - b).
double malus(Angle a, Angle b);

/// Difference of two axes in (-pi/2, pi/2] for comparisons modulo pi.
double axis_distance(Angle a, Angle b);

enum class Blocker { Open, BlockPlus, BlockMinus };

/// Which channel of a loop a photon (or its empty wave) travels.
/// Plus is the loop axis, Minus its complement.
enum class Channel : unsigned char { Plus, Minus };

/// One analyzer loop: a birefringent split along `axis`, optionally with one
/// channel blocked before recombination.
struct LoopSpec {
  Angle axis;
  Blocker blocker = Blocker::Open;

  bool blocks(Channel c) const {
    return (c == Channel::Plus && blocker == Blocker::BlockPlus) ||
           (c == Channel::Minus && blocker == Blocker::BlockMinus);
  }

  /// Axis of the polarization carried by channel `c`.
  Angle channel_axis(Channel c) const { return c == Channel::Plus ? axis : complement(axis); }
};

inline LoopSpec loop(Angle axis, Blocker blocker = Blocker::Open) { return {axis, blocker}; }

enum class StageLabel { Stage1, Stage2, Stage3, Custom };

struct StageSpec {
  Angle left_outcome;
  std::vector<LoopSpec> right_chain;
  StageLabel label = StageLabel::Custom;
};

/// Left detects y, right chain x(open), theta(open), phi(minus blocked).
StageSpec stage1(Angle theta, Angle phi);
/// Left detects x, right chain x(open), theta(minus blocked), phi(open).
StageSpec stage2(Angle theta, Angle phi);
/// Left detects theta-bar, right chain x(open), theta(open), phi(minus blocked).
StageSpec stage3(Angle theta, Angle phi);

/// Sequence of channels taken, one per loop reached, in chain order.
using ChannelPath = std::vector<Channel>;

/// Renders a path as one character per loop: '+' for Plus, '-' for Minus.
std::string to_string(const ChannelPath& path);
ChannelPath parse_path(const std::string& text);
std::string to_string(StageLabel label);

struct FractionReport {
  double coarse = 0.0;
  /// Which-path components; absent when the model assigns no path record.
  std::optional<std::map<ChannelPath, double>> components;

  /// Component probability for `path`, or 0 when the table lacks it.
  double component(const ChannelPath& path) const;
};

}  // namespace polaudit
