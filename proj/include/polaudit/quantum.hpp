#pragma once

#include <span>

#include "polaudit/optics.hpp"

namespace polaudit::quantum {

/// Linear polarization of the right-moving photon.
struct PureState {
  Angle axis;
};

struct Conditioned {
  PureState state;
  /// Probability of the left outcome itself; 1/2 for every axis on the singlet.
  double probability;
};

struct Propagated {
  PureState state;
  double survival;
};

/// Post-selects the singlet on a left detection along `left_outcome`.
Conditioned condition_on_left(Angle left_outcome);

/// Projection-postulate passage through one loop. Open loops recombine
/// coherently and leave the state untouched.
Propagated propagate(PureState state, const LoopSpec& loop);

/// Survival product through `chain` for a bare single photon.
Propagated propagate_chain(PureState state, std::span<const LoopSpec> chain);

/// Fraction of right detections given the stage's left detection. The 1/2
/// left-outcome probability is excluded. No components are reported.
FractionReport stage_fraction_qm(const StageSpec& stage);

}  // namespace polaudit::quantum
