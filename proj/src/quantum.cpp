#include "polaudit/quantum.hpp"

namespace polaudit::quantum {

Conditioned condition_on_left(Angle left_outcome) {
  return {PureState{complement(left_outcome)}, 0.5};
}

Propagated propagate(PureState state, const LoopSpec& loop) {
  switch (loop.blocker) {
    case Blocker::Open:
      return {state, 1.0};
    case Blocker::BlockMinus:
      return {PureState{loop.axis}, malus(loop.axis, state.axis)};
    case Blocker::BlockPlus: {
      const Angle open = complement(loop.axis);
      return {PureState{open}, malus(open, state.axis)};
    }
  }
  return {state, 1.0};
}

Propagated propagate_chain(PureState state, std::span<const LoopSpec> chain) {
  double survival = 1.0;
  for (const LoopSpec& l : chain) {
    const Propagated step = propagate(state, l);
    state = step.state;
    survival *= step.survival;
  }
  return {state, survival};
}

FractionReport stage_fraction_qm(const StageSpec& stage) {
  const Conditioned c = condition_on_left(stage.left_outcome);
  return FractionReport{propagate_chain(c.state, stage.right_chain).survival, std::nullopt};
}

}  // namespace polaudit::quantum
