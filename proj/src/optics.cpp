#include "polaudit/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace polaudit {

double Angle::canonicalize(double rad) {
  if (!std::isfinite(rad)) {
    throw std::invalid_argument("angle must be finite");
  }
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(rad, pi);
  if (r < 0.0) {
    r += pi;
  }
  // r + pi can round up to pi itself for tiny negative inputs.
  if (r >= pi || r == 0.0) {
    r = 0.0;
  }
  return r;
}

Angle complement(Angle a) { return a.rotated(std::numbers::pi / 2); }

double malus(Angle a, Angle b) {
  // Double-angle form: exactly 0 for x against y and exactly 1 for equal axes.
  return 0.5 * (1.0 + std::cos(2.0 * (a.rad() - b.rad())));
}

double axis_distance(Angle a, Angle b) {
  double d = a.rad() - b.rad();
  if (d > std::numbers::pi / 2) {
    d -= std::numbers::pi;
  } else if (d <= -std::numbers::pi / 2) {
    d += std::numbers::pi;
  }
  return d;
}

StageSpec stage1(Angle theta, Angle phi) {
  return {Angle::y_axis(),
          {loop(Angle::x_axis()), loop(theta), loop(phi, Blocker::BlockMinus)},
          StageLabel::Stage1};
}

StageSpec stage2(Angle theta, Angle phi) {
  return {Angle::x_axis(),
          {loop(Angle::x_axis()), loop(theta, Blocker::BlockMinus), loop(phi)},
          StageLabel::Stage2};
}

StageSpec stage3(Angle theta, Angle phi) {
  return {complement(theta),
          {loop(Angle::x_axis()), loop(theta), loop(phi, Blocker::BlockMinus)},
          StageLabel::Stage3};
}

std::string to_string(const ChannelPath& path) {
  std::string out;
  out.reserve(path.size());
  for (Channel c : path) {
    out.push_back(c == Channel::Plus ? '+' : '-');
  }
  return out;
}

ChannelPath parse_path(const std::string& text) {
  ChannelPath path;
  path.reserve(text.size());
  for (char ch : text) {
    if (ch == '+') {
      path.push_back(Channel::Plus);
    } else if (ch == '-') {
      path.push_back(Channel::Minus);
    } else {
      throw std::invalid_argument("channel path may only contain '+' and '-': " + text);
    }
  }
  return path;
}

std::string to_string(StageLabel label) {
  switch (label) {
    case StageLabel::Stage1: return "stage1";
    case StageLabel::Stage2: return "stage2";
    case StageLabel::Stage3: return "stage3";
    case StageLabel::Custom: return "custom";
  }
  return "custom";
}

double FractionReport::component(const ChannelPath& path) const {
  if (!components) {
    throw std::logic_error("fraction report carries no which-path components");
  }
  auto it = components->find(path);
  return it == components->end() ? 0.0 : it->second;
}

}  // namespace polaudit
