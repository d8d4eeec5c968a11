#include "polaudit/bell.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polaudit/pilot_wave.hpp"
#include "polaudit/quantum.hpp"
#include "polaudit/rng.hpp"

namespace polaudit::bell {
namespace {

StageFractions closed_form(const StageSpec& stage, const ChannelPath& first,
                           const ChannelPath& second) {
  const FractionReport pw = pilot_wave::pw_components(stage);
  StageFractions f;
  f.coarse = quantum::stage_fraction_qm(stage).coarse;
  f.first = pw.component(first);
  f.second = pw.component(second);
  return f;
}

StageFractions sampled(const StageSpec& stage, const ChannelPath& first, const ChannelPath& second,
                       std::uint64_t n, std::uint64_t seed, unsigned threads) {
  const pilot_wave::McResult r = pilot_wave::pw_monte_carlo(stage, n, seed, {threads});
  StageFractions f;
  f.coarse = r.coarse_frequency();
  f.first = r.frequency(first);
  f.second = r.frequency(second);
  f.stderr_coarse = r.coarse_standard_error();
  f.stderr_first = r.standard_error(first);
  f.stderr_second = r.standard_error(second);
  return f;
}

void finish(InequalityReport& r) {
  r.eq4_lhs = r.f1.coarse + r.f2.coarse;
  r.eq4_rhs = r.f1.first + r.f1.second + r.f2.first + r.f2.second;
  r.eq5_rhs = r.f3.coarse + r.f1.second + r.f2.second;
  r.eq5_residual = r.eq4_lhs - r.eq5_rhs;
  r.eq6_lhs = r.f1.coarse + r.f2.coarse;
  r.eq6_rhs = r.f3.coarse;
  r.eq6_satisfied = r.eq6_lhs >= r.eq6_rhs - r.eq6_tolerance;
  r.identification_gap = (r.f1.first + r.f2.first) - r.f3.coarse;
}

std::size_t grid_count(double step) {
  const double ratio = std::numbers::pi / step;
  const double nearest = std::round(ratio);
  // Half-open [0, pi): a step dividing pi exactly must not add a point at pi.
  if (std::abs(ratio - nearest) < 1e-9) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::floor(ratio)) + 1;
}

template <typename AngleAt>
std::vector<InequalityReport> scan(std::size_t count, const Model& model, AngleAt angle_at) {
  std::vector<InequalityReport> out;
  out.reserve(count * count);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      const Angle theta = angle_at(i);
      const Angle phi = angle_at(j);
      if (const auto* mc = std::get_if<MonteCarlo>(&model)) {
        MonteCarlo point = *mc;
        point.seed = mix64(mc->seed ^ mix64(i * count + j));
        out.push_back(eval_point_mc(theta, phi, point));
      } else {
        out.push_back(eval_point(theta, phi));
      }
    }
  }
  return out;
}

}  // namespace

InequalityReport eval_point(Angle theta, Angle phi) {
  InequalityReport r;
  r.theta = theta;
  r.phi = phi;
  r.f1 = closed_form(stage1(theta, phi), paths::f1_xtheta_phi, paths::f1_xthetabar_phi);
  r.f2 = closed_form(stage2(theta, phi), paths::f2_ytheta_phi, paths::f2_ytheta_phibar);
  r.f3 = closed_form(stage3(theta, phi), paths::f3_xtheta_phi, paths::f3_ytheta_phi);
  r.eq6_tolerance = kIdentityTol;
  finish(r);
  return r;
}

InequalityReport eval_point_mc(Angle theta, Angle phi, const MonteCarlo& mc) {
  InequalityReport r;
  r.theta = theta;
  r.phi = phi;
  r.f1 = sampled(stage1(theta, phi), paths::f1_xtheta_phi, paths::f1_xthetabar_phi, mc.n,
                 mix64(mc.seed + 1), mc.threads);
  r.f2 = sampled(stage2(theta, phi), paths::f2_ytheta_phi, paths::f2_ytheta_phibar, mc.n,
                 mix64(mc.seed + 2), mc.threads);
  r.f3 = sampled(stage3(theta, phi), paths::f3_xtheta_phi, paths::f3_ytheta_phi, mc.n,
                 mix64(mc.seed + 3), mc.threads);
  const double combined = std::sqrt(r.f1.stderr_coarse * r.f1.stderr_coarse +
                                    r.f2.stderr_coarse * r.f2.stderr_coarse +
                                    r.f3.stderr_coarse * r.f3.stderr_coarse);
  r.eq6_tolerance = 4.0 * combined + kIdentityTol;
  finish(r);
  return r;
}

std::vector<InequalityReport> scan_grid(double step_rad, const Model& model) {
  if (!(step_rad > 0.0) || step_rad > std::numbers::pi / 2 + kIdentityTol) {
    throw std::invalid_argument("grid step must lie in (0, 90] degrees");
  }
  return scan(grid_count(step_rad), model,
              [step_rad](std::size_t i) { return Angle::radians(step_rad * static_cast<double>(i)); });
}

std::vector<InequalityReport> scan_grid_degrees(double step_deg, const Model& model) {
  if (!(step_deg > 0.0) || step_deg > 90.0) {
    throw std::invalid_argument("grid step must lie in (0, 90] degrees");
  }
  const std::size_t count = grid_count(step_deg / 180.0 * std::numbers::pi);
  return scan(count, model,
              [step_deg](std::size_t i) { return Angle::degrees(step_deg * static_cast<double>(i)); });
}

InequalityReport violation_family(Angle theta) {
  if (!(theta.rad() > 0.0 && theta.rad() < std::numbers::pi / 4)) {
    throw std::domain_error("violation family requires 0 < theta < 45 degrees");
  }
  return eval_point(theta, Angle::radians(2.0 * theta.rad()));
}

bool single_particle_audit(const StageSpec& stage, const AuditOptions& options) {
  const Angle input = complement(stage.left_outcome);

  const double two_photon = quantum::stage_fraction_qm(stage).coarse;
  const double one_photon = quantum::propagate_chain({input}, stage.right_chain).survival;
  if (std::abs(two_photon - one_photon) > kIdentityTol) {
    return false;
  }
  const double pw_two = pilot_wave::pw_coarse(stage);
  const double pw_one = pilot_wave::pw_components_single(input, stage.right_chain).coarse;
  if (std::abs(pw_two - pw_one) > kIdentityTol) {
    return false;
  }

  if (options.mc_trials == 0) {
    return true;
  }
  const pilot_wave::McOptions mc{options.threads};
  const auto paired = pilot_wave::pw_monte_carlo(stage, options.mc_trials, options.seed, mc);
  const auto single = pilot_wave::pw_monte_carlo_single(input, stage.right_chain,
                                                        options.mc_trials, mix64(options.seed), mc);
  const double fp = paired.coarse_frequency();
  const double fs = single.coarse_frequency();
  const double sp = paired.coarse_standard_error();
  const double ss = single.coarse_standard_error();
  return pilot_wave::within_mc_tolerance(fp, one_photon, sp) &&
         pilot_wave::within_mc_tolerance(fs, one_photon, ss) &&
         pilot_wave::within_mc_tolerance(fp, fs, std::sqrt(sp * sp + ss * ss));
}

}  // namespace polaudit::bell
