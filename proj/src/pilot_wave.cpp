#include "polaudit/pilot_wave.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace polaudit::pilot_wave {
namespace {

constexpr std::size_t kMaxMcChain = 24;

void enumerate(std::span<const LoopSpec> chain, std::size_t index, Angle guiding, double prob,
               ChannelPath& path, std::map<ChannelPath, double>& out) {
  if (index == chain.size()) {
    out[path] += prob;
    return;
  }
  const LoopSpec& l = chain[index];
  const double p_plus = malus(l.axis, guiding);
  for (Channel c : {Channel::Plus, Channel::Minus}) {
    if (l.blocks(c)) {
      continue;
    }
    const double p = c == Channel::Plus ? p_plus : 1.0 - p_plus;
    const Angle next = l.blocker == Blocker::Open ? guiding : l.channel_axis(c);
    path.push_back(c);
    enumerate(chain, index + 1, next, prob * p, path, out);
    path.pop_back();
  }
}

// Bit j of `bits` is set when the photon took Minus at loop j.
struct Walk {
  std::uint32_t bits = 0;
  std::uint32_t length = 0;
  bool detected = false;
};

Walk walk(std::span<const LoopSpec> chain, Angle guiding, CounterRng& rng) {
  Walk w;
  for (const LoopSpec& l : chain) {
    const Channel c = rng.uniform() < malus(l.axis, guiding) ? Channel::Plus : Channel::Minus;
    if (c == Channel::Minus) {
      w.bits |= 1u << w.length;
    }
    ++w.length;
    if (l.blocks(c)) {
      return w;
    }
    if (l.blocker != Blocker::Open) {
      guiding = l.channel_axis(c);
    }
  }
  w.detected = true;
  return w;
}

ChannelPath decode(std::uint32_t bits, std::uint32_t length) {
  ChannelPath path(length);
  for (std::uint32_t j = 0; j < length; ++j) {
    path[j] = (bits >> j) & 1u ? Channel::Minus : Channel::Plus;
  }
  return path;
}

struct Tally {
  std::uint64_t conditioned = 0;
  std::vector<std::uint64_t> detected;    // indexed by bits
  std::vector<std::uint64_t> undetected;  // indexed by (1 << length) | bits

  explicit Tally(std::size_t k) : detected(std::size_t{1} << k), undetected(std::size_t{2} << k) {}

  void merge(const Tally& o) {
    conditioned += o.conditioned;
    for (std::size_t i = 0; i < detected.size(); ++i) detected[i] += o.detected[i];
    for (std::size_t i = 0; i < undetected.size(); ++i) undetected[i] += o.undetected[i];
  }
};

// With `left` set, each trial first samples the singlet's left outcome and
// continues only when it matches; otherwise every trial starts from `input`.
McResult run(std::optional<Angle> left, Angle input, std::span<const LoopSpec> chain,
             std::uint64_t n, std::uint64_t seed, McOptions options) {
  if (n == 0) {
    throw std::invalid_argument("empty run");
  }
  if (chain.size() > kMaxMcChain) {
    throw std::invalid_argument("Monte Carlo chains are limited to 24 loops");
  }
  const std::size_t k = chain.size();

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));

  auto work = [&](std::uint64_t begin, std::uint64_t end, Tally& tally) {
    for (std::uint64_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      if (left && rng.uniform() >= 0.5) {
        continue;
      }
      ++tally.conditioned;
      const Walk w = walk(chain, input, rng);
      if (w.detected) {
        ++tally.detected[w.bits];
      } else {
        ++tally.undetected[(std::size_t{1} << w.length) | w.bits];
      }
    }
  };

  std::vector<Tally> tallies(threads, Tally(k));
  if (threads == 1) {
    work(0, n, tallies[0]);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      const std::uint64_t begin = n * t / threads;
      const std::uint64_t end = n * (t + 1) / threads;
      pool.emplace_back([&, begin, end, t] { work(begin, end, tallies[t]); });
    }
  }
  Tally total(k);
  for (const Tally& t : tallies) total.merge(t);

  McResult result;
  result.n_trials = n;
  result.n_conditioned = total.conditioned;
  result.seed = seed;
  for (std::size_t bits = 0; bits < total.detected.size(); ++bits) {
    if (total.detected[bits] != 0) {
      result.counts[decode(static_cast<std::uint32_t>(bits), static_cast<std::uint32_t>(k))] =
          total.detected[bits];
    }
  }
  for (std::uint32_t len = 1; len <= k; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      const std::uint64_t c = total.undetected[(std::size_t{1} << len) | bits];
      if (c != 0) {
        result.undetected[decode(bits, len)] = c;
      }
    }
  }
  return result;
}

}  // namespace

FractionReport pw_components_single(Angle input, std::span<const LoopSpec> chain) {
  std::map<ChannelPath, double> table;
  if (!chain.empty()) {
    ChannelPath path;
    enumerate(chain, 0, input, 1.0, path, table);
  }
  double sum = 0.0;
  for (const auto& [path, p] : table) sum += p;
  return FractionReport{sum, std::move(table)};
}

FractionReport pw_components(const StageSpec& stage) {
  return pw_components_single(complement(stage.left_outcome), stage.right_chain);
}

double pw_coarse(const StageSpec& stage) { return pw_components(stage).coarse; }

std::optional<Trajectory> sample_trajectory(const StageSpec& stage, CounterRng& rng) {
  if (rng.uniform() >= 0.5) {
    return std::nullopt;
  }
  const Walk w = walk(stage.right_chain, complement(stage.left_outcome), rng);
  return Trajectory{stage.left_outcome, decode(w.bits, w.length), w.detected};
}

double McResult::frequency(const ChannelPath& path) const {
  if (n_conditioned == 0) {
    return 0.0;
  }
  auto it = counts.find(path);
  const std::uint64_t c = it == counts.end() ? 0 : it->second;
  return static_cast<double>(c) / static_cast<double>(n_conditioned);
}

double McResult::standard_error(const ChannelPath& path) const {
  if (n_conditioned == 0) {
    return 0.0;
  }
  const double p = frequency(path);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n_conditioned));
}

std::uint64_t McResult::detected() const {
  std::uint64_t total = 0;
  for (const auto& [path, c] : counts) total += c;
  return total;
}

double McResult::coarse_frequency() const {
  return n_conditioned == 0 ? 0.0
                            : static_cast<double>(detected()) / static_cast<double>(n_conditioned);
}

double McResult::coarse_standard_error() const {
  if (n_conditioned == 0) {
    return 0.0;
  }
  const double p = coarse_frequency();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n_conditioned));
}

McResult pw_monte_carlo(const StageSpec& stage, std::uint64_t n, std::uint64_t seed,
                        McOptions options) {
  return run(stage.left_outcome, complement(stage.left_outcome), stage.right_chain, n, seed,
             options);
}

McResult pw_monte_carlo_single(Angle input, std::span<const LoopSpec> chain, std::uint64_t n,
                               std::uint64_t seed, McOptions options) {
  return run(std::nullopt, input, chain, n, seed, options);
}

bool within_mc_tolerance(double freq, double expected, double stderr_value) {
  return std::abs(freq - expected) <= 4.0 * stderr_value + kIdentityTol;
}

}  // namespace polaudit::pilot_wave
