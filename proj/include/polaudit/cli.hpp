#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace polaudit::cli {

enum class Command { Stage, Scan, Check, Mc };
enum class Format { Csv, Json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariantFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::uint64_t kDefaultSeed = 12345;
inline constexpr const char* kSeedEnv = "POLAUDIT_SEED";

struct RunConfig {
  Command command = Command::Stage;
  double theta_deg = 30.0;
  double phi_deg = 60.0;
  double step_deg = 1.0;
  std::uint64_t n = 100000;
  std::uint64_t seed = kDefaultSeed;
  /// "flag", "env" or "default"; echoed into output metadata.
  std::string seed_source = "default";
  Format format = Format::Csv;
  /// Empty means standard output.
  std::string output;
  unsigned threads = 1;
  /// scan only: "closed" or "mc".
  std::string model = "closed";
  /// mc only: "1", "2", "3" or "all".
  std::string stage = "all";
};

/// Header of the scan CSV, one column per field of a grid point.
extern const std::vector<std::string> kScanColumns;

/// Empty when `config` is valid, otherwise a diagnostic.
std::optional<std::string> validate(const RunConfig& config);

/// Executes a validated or unvalidated config. Output goes to `config.output`
/// (written only after the whole document is produced) or `out`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv, resolves the seed (flag, then environment, then default) and runs.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// printf "%.17g".
std::string format_real(double value);

}  // namespace polaudit::cli
