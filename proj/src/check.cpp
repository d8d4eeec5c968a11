#include "polaudit/check.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>

#include "polaudit/bell.hpp"
#include "polaudit/pilot_wave.hpp"
#include "polaudit/quantum.hpp"

namespace polaudit::check {
namespace {

using bell::InequalityReport;

double sq(double v) { return v * v; }
double rad(double deg) { return deg / 180.0 * std::numbers::pi; }

// Worst absolute residual over the grid, tracked with its location.
class Worst {
 public:
  void add(double residual, double theta_deg, double phi_deg) {
    if (std::abs(residual) > value_) {
      value_ = std::abs(residual);
      theta_ = theta_deg;
      phi_ = phi_deg;
    }
  }
  bool ok(double tol = kIdentityTol) const { return value_ < tol; }
  std::string describe() const {
    std::ostringstream os;
    os << "max residual " << value_ << " at theta=" << theta_ << " phi=" << phi_;
    return os.str();
  }

 private:
  double value_ = 0.0;
  double theta_ = 0.0;
  double phi_ = 0.0;
};

struct GridPoint {
  double theta_deg;
  double phi_deg;
  Angle theta;
  Angle phi;
};

// Degree values i * step in [0, 180).
std::vector<double> grid_axis(double step_deg) {
  std::vector<double> axis;
  for (std::size_t i = 0;; ++i) {
    const double v = step_deg * static_cast<double>(i);
    if (v >= 180.0 - 1e-9) break;
    axis.push_back(v);
  }
  return axis;
}

std::vector<GridPoint> grid(double step_deg) {
  std::vector<GridPoint> pts;
  const std::vector<double> axis = grid_axis(step_deg);
  for (double t : axis) {
    for (double p : axis) {
      pts.push_back({t, p, Angle::degrees(t), Angle::degrees(p)});
    }
  }
  return pts;
}

SuiteResult grid_suite(const std::string& name, const std::vector<GridPoint>& pts,
                       const std::function<void(const GridPoint&, Worst&)>& body) {
  Worst w;
  for (const GridPoint& g : pts) body(g, w);
  return {name, w.ok(), w.describe()};
}

}  // namespace

std::vector<SuiteResult> run_invariant_suites(const SuiteOptions& options) {
  const std::vector<GridPoint> pts = grid(options.step_deg);
  std::vector<SuiteResult> out;

  out.push_back(grid_suite("quantum-closed-forms", pts, [](const GridPoint& g, Worst& w) {
    const double t = rad(g.theta_deg), p = rad(g.phi_deg);
    w.add(quantum::stage_fraction_qm(stage1(g.theta, g.phi)).coarse - sq(std::cos(p)), g.theta_deg, g.phi_deg);
    w.add(quantum::stage_fraction_qm(stage2(g.theta, g.phi)).coarse - sq(std::sin(t)), g.theta_deg, g.phi_deg);
    w.add(quantum::stage_fraction_qm(stage3(g.theta, g.phi)).coarse - sq(std::cos(p - t)), g.theta_deg, g.phi_deg);
  }));

  out.push_back(grid_suite("pilot-wave-formulas", pts, [](const GridPoint& g, Worst& w) {
    const double t = rad(g.theta_deg), p = rad(g.phi_deg);
    const InequalityReport r = bell::eval_point(g.theta, g.phi);
    w.add(r.f1.first - sq(std::cos(t)) * sq(std::cos(p)), g.theta_deg, g.phi_deg);
    w.add(r.f1.second - sq(std::sin(t)) * sq(std::cos(p)), g.theta_deg, g.phi_deg);
    w.add(r.f2.first - sq(std::sin(t)) * sq(std::cos(p - t)), g.theta_deg, g.phi_deg);
    w.add(r.f2.second - sq(std::sin(t)) * sq(std::sin(p - t)), g.theta_deg, g.phi_deg);
    w.add(r.f3.first - sq(std::cos(t)) * sq(std::cos(p - t)), g.theta_deg, g.phi_deg);
    w.add(r.f3.second - sq(std::sin(t)) * sq(std::cos(p - t)), g.theta_deg, g.phi_deg);
  }));

  out.push_back(grid_suite("decomposition-identities", pts, [](const GridPoint& g, Worst& w) {
    const double t = rad(g.theta_deg), p = rad(g.phi_deg);
    w.add(pilot_wave::pw_coarse(stage1(g.theta, g.phi)) - sq(std::cos(p)), g.theta_deg, g.phi_deg);
    w.add(pilot_wave::pw_coarse(stage2(g.theta, g.phi)) - sq(std::sin(t)), g.theta_deg, g.phi_deg);
    w.add(pilot_wave::pw_coarse(stage3(g.theta, g.phi)) - sq(std::cos(p - t)), g.theta_deg, g.phi_deg);
  }));

  out.push_back(grid_suite("model-equivalence", pts, [](const GridPoint& g, Worst& w) {
    for (const StageSpec& s : {stage1(g.theta, g.phi), stage2(g.theta, g.phi), stage3(g.theta, g.phi)}) {
      w.add(pilot_wave::pw_coarse(s) - quantum::stage_fraction_qm(s).coarse, g.theta_deg, g.phi_deg);
    }
  }));

  {
    // Insert an open loop at every position of every stage, axes from the grid.
    Worst w;
    for (double t = 0; t < 180; t += 15) {
      for (double p = 0; p < 180; p += 15) {
        const Angle th = Angle::degrees(t), ph = Angle::degrees(p);
        for (const StageSpec& s : {stage1(th, ph), stage2(th, ph), stage3(th, ph)}) {
          const double base = quantum::stage_fraction_qm(s).coarse;
          for (std::size_t pos = 0; pos <= s.right_chain.size(); ++pos) {
            for (double extra = 0; extra < 180; extra += 20) {
              StageSpec mod = s;
              mod.right_chain.insert(mod.right_chain.begin() + static_cast<std::ptrdiff_t>(pos),
                                     loop(Angle::degrees(extra + 7)));
              w.add(quantum::stage_fraction_qm(mod).coarse - base, t, p);
            }
          }
        }
      }
    }
    out.push_back({"open-loop-transparency", w.ok(), w.describe()});
  }

  {
    Worst w;
    for (const auto& [t, p] : {std::pair{30.0, 60.0}, {22.5, 45.0}, {10.0, 80.0}}) {
      const Angle th = Angle::degrees(t), ph = Angle::degrees(p);
      for (const StageSpec& s : {stage1(th, ph), stage2(th, ph), stage3(th, ph)}) {
        const double base = quantum::stage_fraction_qm(s).coarse;
        for (double d = 0; d < 360; d += 1) {
          StageSpec rot = s;
          rot.left_outcome = rot.left_outcome.rotated(rad(d));
          for (LoopSpec& l : rot.right_chain) l.axis = l.axis.rotated(rad(d));
          w.add(quantum::stage_fraction_qm(rot).coarse - base, t, p);
        }
      }
    }
    out.push_back({"rotation-invariance", w.ok(), w.describe()});
  }

  {
    bool ok = true;
    std::size_t audited = 0;
    for (double t = 0; t < 180; t += 5) {
      for (double p = 0; p < 180; p += 5) {
        const Angle th = Angle::degrees(t), ph = Angle::degrees(p);
        for (const StageSpec& s : {stage1(th, ph), stage2(th, ph), stage3(th, ph)}) {
          ok = ok && bell::single_particle_audit(s, {0, options.seed, options.threads});
          ++audited;
        }
      }
    }
    const Angle th = Angle::degrees(30), ph = Angle::degrees(60);
    for (const StageSpec& s : {stage1(th, ph), stage2(th, ph), stage3(th, ph)}) {
      ok = ok && bell::single_particle_audit(s, {options.mc_trials, options.seed, options.threads});
    }
    out.push_back({"single-particle-audit", ok,
                   std::to_string(audited) + " closed-form stages on 5 deg grid + Monte Carlo at (30,60)"});
  }

  std::vector<InequalityReport> scan = bell::scan_grid_degrees(options.step_deg, bell::ClosedForm{});

  {
    Worst w4, w5;
    std::size_t nonzero = 0;
    for (const InequalityReport& r : scan) {
      w4.add(r.eq4_lhs - r.eq4_rhs, r.theta.deg(), r.phi.deg());
      w5.add(r.eq5_residual - r.identification_gap, r.theta.deg(), r.phi.deg());
      if (std::abs(r.identification_gap) > 1e-9) ++nonzero;
    }
    out.push_back({"summation-identity", w4.ok(), w4.describe()});
    out.push_back({"gap-equivalence", w5.ok(), w5.describe()});
    const double share = static_cast<double>(nonzero) / static_cast<double>(scan.size());
    out.push_back({"gap-generically-nonzero", share > 0.5,
                   "nonzero share " + std::to_string(share)});
  }

  {
    Worst w;
    for (double t : {0.0, 90.0}) {
      for (double p : grid_axis(options.step_deg)) {
        w.add(bell::eval_point(Angle::degrees(t), Angle::degrees(p)).identification_gap, t, p);
      }
    }
    out.push_back({"gap-degenerate-lines", w.ok(), w.describe()});
  }

  {
    bool ok = true;
    std::ostringstream os;
    for (int t = 5; t <= 40; t += 5) {
      const InequalityReport r = bell::violation_family(Angle::degrees(t));
      const double margin = sq(std::cos(rad(t))) - sq(std::cos(rad(2 * t))) - sq(std::sin(rad(t)));
      ok = ok && !r.eq6_satisfied && std::abs((r.eq6_rhs - r.eq6_lhs) - margin) < kIdentityTol;
      os << t << ":" << (r.eq6_rhs - r.eq6_lhs) << " ";
    }
    out.push_back({"violation-family", ok, "violation by theta " + os.str()});
  }

  {
    const InequalityReport r = bell::eval_point(Angle::degrees(30), Angle::degrees(60));
    const bool ok = std::abs(r.eq6_lhs - 0.5) < kIdentityTol &&
                    std::abs(r.eq6_rhs - 0.75) < kIdentityTol && !r.eq6_satisfied &&
                    std::abs(r.identification_gap + 0.375) < kIdentityTol;
    std::ostringstream os;
    os << "eq6 " << r.eq6_lhs << " vs " << r.eq6_rhs << ", gap " << r.identification_gap;
    out.push_back({"inequality-violation-at-30-60", ok, os.str()});
  }

  {
    bool ok = true;
    std::size_t checked = 0;
    const Angle th = Angle::degrees(30), ph = Angle::degrees(60);
    std::uint64_t stream = 0;
    for (const StageSpec& s : {stage1(th, ph), stage2(th, ph), stage3(th, ph)}) {
      const auto mc = pilot_wave::pw_monte_carlo(s, options.mc_trials, options.seed + stream++,
                                                 {options.threads});
      const FractionReport closed = pilot_wave::pw_components(s);
      for (const auto& [path, p] : *closed.components) {
        ok = ok && pilot_wave::within_mc_tolerance(mc.frequency(path), p, mc.standard_error(path));
        ++checked;
      }
      const double rate = static_cast<double>(mc.n_conditioned) / static_cast<double>(mc.n_trials);
      ok = ok && std::abs(rate - 0.5) <= 4.0 * std::sqrt(0.25 / static_cast<double>(mc.n_trials));
    }
    out.push_back({"mc-consistency", ok, std::to_string(checked) + " components at (30,60)"});
  }

  return out;
}

}  // namespace polaudit::check
