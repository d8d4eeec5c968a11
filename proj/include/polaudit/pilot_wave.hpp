#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>

#include "polaudit/optics.hpp"
#include "polaudit/rng.hpp"

namespace polaudit::pilot_wave {

/// The channel history of one photon on the right arm.
///
/// In every loop the photon takes one channel with Malus probability against
/// the current guiding polarization and an empty wave takes the other one.
/// An open loop recombines photon and empty wave, so the guiding polarization
/// leaving it is the one that entered. Surviving a blocked loop leaves only
/// the open channel's wave. A photon entering a blocked channel is absorbed.
struct Trajectory {
  Angle left_outcome;
  ChannelPath channel_record;
  bool detected = false;
};

/// Which-path component table for a stage, conditioned on its left detection.
///
/// Every detected channel sequence is listed, including those of probability
/// zero, and `coarse` is their sum. An empty chain yields an empty report
/// (coarse 0, empty table).
FractionReport pw_components(const StageSpec& stage);

/// Sum of the components of `pw_components(stage)`.
double pw_coarse(const StageSpec& stage);

/// Same rules applied to a bare photon polarized along `input`, with no
/// left-arm conditioning.
FractionReport pw_components_single(Angle input, std::span<const LoopSpec> chain);

/// Samples one source emission. Returns nullopt when the left detector
/// reports the outcome orthogonal to `stage.left_outcome`.
std::optional<Trajectory> sample_trajectory(const StageSpec& stage, CounterRng& rng);

struct McResult {
  std::uint64_t n_trials = 0;
  std::uint64_t n_conditioned = 0;
  /// Detected channel sequences.
  std::map<ChannelPath, std::uint64_t> counts;
  /// Truncated prefixes of absorbed trajectories, ending in the blocked channel.
  std::map<ChannelPath, std::uint64_t> undetected;
  std::uint64_t seed = 0;

  double frequency(const ChannelPath& path) const;
  /// Binomial standard error sqrt(p(1-p)/n_conditioned) of `frequency(path)`.
  double standard_error(const ChannelPath& path) const;
  std::uint64_t detected() const;
  double coarse_frequency() const;
  double coarse_standard_error() const;

  friend bool operator==(const McResult&, const McResult&) = default;
};

struct McOptions {
  /// Worker threads; 0 selects the hardware concurrency.
  unsigned threads = 1;
};

/// Monte Carlo realization of the trajectory model over `n` source emissions.
/// The result depends only on (stage, n, seed), never on `options.threads`.
/// Throws std::invalid_argument("empty run") for n == 0.
McResult pw_monte_carlo(const StageSpec& stage, std::uint64_t n, std::uint64_t seed,
                        McOptions options = {});

/// Monte Carlo over `n` bare photons polarized along `input`; every trial
/// counts as conditioned.
McResult pw_monte_carlo_single(Angle input, std::span<const LoopSpec> chain, std::uint64_t n,
                               std::uint64_t seed, McOptions options = {});

/// True when `freq` is within four standard errors of `expected`. A 1e-12
/// floor absorbs closed-form rounding when a sampled frequency is exactly 0 or 1.
bool within_mc_tolerance(double freq, double expected, double stderr_value);

}  // namespace polaudit::pilot_wave
