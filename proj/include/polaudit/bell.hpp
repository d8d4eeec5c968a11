#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "polaudit/optics.hpp"

namespace polaudit::bell {

/// Named which-path channel sequences of the three canonical stages.
namespace paths {
inline const ChannelPath f1_xtheta_phi{Channel::Plus, Channel::Plus, Channel::Plus};
inline const ChannelPath f1_xthetabar_phi{Channel::Plus, Channel::Minus, Channel::Plus};
inline const ChannelPath f2_ytheta_phi{Channel::Minus, Channel::Plus, Channel::Plus};
inline const ChannelPath f2_ytheta_phibar{Channel::Minus, Channel::Plus, Channel::Minus};
inline const ChannelPath f3_xtheta_phi{Channel::Plus, Channel::Plus, Channel::Plus};
inline const ChannelPath f3_ytheta_phi{Channel::Minus, Channel::Plus, Channel::Plus};
}  // namespace paths

/// Coarse fractions and their fine-grained components for one stage.
/// `stderr_*` stay 0 for closed-form evaluation.
struct StageFractions {
  double coarse = 0.0;
  double first = 0.0;   // f1(x,theta,phi) / f2(y,theta,phi) / f3(x,theta,phi)
  double second = 0.0;  // f1(x,thetabar,phi) / f2(y,theta,phibar) / f3(y,theta,phi)
  double stderr_coarse = 0.0;
  double stderr_first = 0.0;
  double stderr_second = 0.0;
};

struct InequalityReport {
  Angle theta;
  Angle phi;
  StageFractions f1;
  StageFractions f2;
  StageFractions f3;

  double eq4_lhs = 0.0;
  double eq4_rhs = 0.0;
  double eq5_rhs = 0.0;
  double eq5_residual = 0.0;
  double eq6_lhs = 0.0;
  double eq6_rhs = 0.0;
  /// Slack allowed when deciding `eq6_satisfied`: 1e-12, or 4 standard errors under Monte Carlo.
  double eq6_tolerance = kIdentityTol;
  bool eq6_satisfied = false;
  /// [f1(x,theta,phi) + f2(y,theta,phi)] - f3(theta,phi): what the summation argument sets to zero.
  double identification_gap = 0.0;
};

struct ClosedForm {};
struct MonteCarlo {
  std::uint64_t n = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};
using Model = std::variant<ClosedForm, MonteCarlo>;

/// Evaluates the summation argument at one (theta, phi). Coarse fractions
/// come from quantum mechanics, components from the pilot-wave model.
InequalityReport eval_point(Angle theta, Angle phi);

/// Same, substituting sampled frequencies for every fraction.
InequalityReport eval_point_mc(Angle theta, Angle phi, const MonteCarlo& mc);

/// Reports for every (theta, phi) = (i*step, j*step) in [0, pi)^2, row-major
/// in theta. Throws std::invalid_argument unless 0 < step_rad <= pi/2.
std::vector<InequalityReport> scan_grid(double step_rad, const Model& model);

/// Grid of the same shape with the step given in degrees, so points land on
/// exact degree values (30 deg is Angle::degrees(30), not 30 * step).
std::vector<InequalityReport> scan_grid_degrees(double step_deg, const Model& model);

/// eval_point(theta, 2*theta). Throws std::domain_error unless 0 < theta < pi/4.
InequalityReport violation_family(Angle theta);

struct AuditOptions {
  /// Trials per Monte Carlo leg; 0 skips the Monte Carlo comparison.
  std::uint64_t mc_trials = 200000;
  std::uint64_t seed = 0x5eed;
  unsigned threads = 1;
};

/// Checks that the conditioned two-photon fraction of `stage` matches the
/// single-photon chain fraction with input polarization complement(left_outcome).
bool single_particle_audit(const StageSpec& stage, const AuditOptions& options = {});

}  // namespace polaudit::bell
