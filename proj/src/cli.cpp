#include "polaudit/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "polaudit/bell.hpp"
#include "polaudit/check.hpp"
#include "polaudit/pilot_wave.hpp"
#include "polaudit/quantum.hpp"

namespace polaudit::cli {

const std::vector<std::string> kScanColumns = {
    "theta_deg",        "phi_deg",       "f1_coarse",     "f1_xtheta_phi", "f1_xthetabar_phi",
    "f2_coarse",        "f2_ytheta_phi", "f2_ytheta_phibar", "f3_coarse",  "f3_xtheta_phi",
    "f3_ytheta_phi",    "eq4_lhs",       "eq4_rhs",       "eq5_residual",  "eq6_lhs",
    "eq6_rhs",          "eq6_satisfied", "identification_gap"};

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* bool_text(bool v) { return v ? "true" : "false"; }

double canonical_deg(double deg) {
  double d = std::fmod(deg, 180.0);
  if (d < 0.0) d += 180.0;
  return d >= 180.0 ? 0.0 : d;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string row;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) row += ',';
    row += fields[i];
  }
  return row + '\n';
}

struct StageEntry {
  StageSpec spec;
  double left_deg;
};

std::vector<StageEntry> canonical_stages(double theta_deg, double phi_deg) {
  const Angle theta = Angle::degrees(theta_deg);
  const Angle phi = Angle::degrees(phi_deg);
  return {{stage1(theta, phi), 90.0},
          {stage2(theta, phi), 0.0},
          {stage3(theta, phi), canonical_deg(canonical_deg(theta_deg) + 90.0)}};
}

json components_json(const FractionReport& r) {
  json table = json::object();
  for (const auto& [path, p] : *r.components) table[to_string(path)] = p;
  return table;
}

std::string render_stage(const RunConfig& c) {
  const auto stages = canonical_stages(c.theta_deg, c.phi_deg);
  if (c.format == Format::Json) {
    json doc;
    doc["theta_deg"] = c.theta_deg;
    doc["phi_deg"] = c.phi_deg;
    doc["stages"] = json::array();
    for (const StageEntry& e : stages) {
      const auto cond = quantum::condition_on_left(e.spec.left_outcome);
      const FractionReport qm = quantum::stage_fraction_qm(e.spec);
      const FractionReport pw = pilot_wave::pw_components(e.spec);
      json s;
      s["label"] = to_string(e.spec.label);
      s["left_outcome_deg"] = e.left_deg;
      s["left_probability"] = cond.probability;
      s["quantum"] = {{"coarse", qm.coarse}, {"components", nullptr}};
      s["pilot_wave"] = {{"coarse", pw.coarse}, {"components", components_json(pw)}};
      doc["stages"].push_back(std::move(s));
    }
    return doc.dump(2) + '\n';
  }
  std::string out = join_row({"stage", "model", "path", "probability"});
  for (const StageEntry& e : stages) {
    const std::string label = to_string(e.spec.label);
    out += join_row({label, "quantum", "", format_real(quantum::stage_fraction_qm(e.spec).coarse)});
    const FractionReport pw = pilot_wave::pw_components(e.spec);
    out += join_row({label, "pilot_wave", "", format_real(pw.coarse)});
    for (const auto& [path, p] : *pw.components) {
      out += join_row({label, "pilot_wave", to_string(path), format_real(p)});
    }
  }
  return out;
}

std::vector<std::string> scan_fields(const bell::InequalityReport& r, double theta_deg,
                                     double phi_deg) {
  return {format_real(theta_deg),     format_real(phi_deg),       format_real(r.f1.coarse),
          format_real(r.f1.first),    format_real(r.f1.second),   format_real(r.f2.coarse),
          format_real(r.f2.first),    format_real(r.f2.second),   format_real(r.f3.coarse),
          format_real(r.f3.first),    format_real(r.f3.second),   format_real(r.eq4_lhs),
          format_real(r.eq4_rhs),     format_real(r.eq5_residual), format_real(r.eq6_lhs),
          format_real(r.eq6_rhs),     bool_text(r.eq6_satisfied), format_real(r.identification_gap)};
}

std::string render_scan(const RunConfig& c) {
  const bool mc = c.model == "mc";
  bell::Model model = bell::ClosedForm{};
  if (mc) model = bell::MonteCarlo{c.n, c.seed, c.threads};
  const auto reports = bell::scan_grid_degrees(c.step_deg, model);
  const auto count = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(reports.size()))));

  if (c.format == Format::Json) {
    json doc;
    doc["model"] = c.model;
    doc["step_deg"] = c.step_deg;
    if (mc) {
      doc["n"] = c.n;
      doc["seed"] = c.seed;
      doc["seed_source"] = c.seed_source;
    }
    doc["points"] = json::array();
    for (std::size_t idx = 0; idx < reports.size(); ++idx) {
      const auto& r = reports[idx];
      json p;
      p["theta_deg"] = static_cast<double>(idx / count) * c.step_deg;
      p["phi_deg"] = static_cast<double>(idx % count) * c.step_deg;
      p["f1_coarse"] = r.f1.coarse;
      p["f1_xtheta_phi"] = r.f1.first;
      p["f1_xthetabar_phi"] = r.f1.second;
      p["f2_coarse"] = r.f2.coarse;
      p["f2_ytheta_phi"] = r.f2.first;
      p["f2_ytheta_phibar"] = r.f2.second;
      p["f3_coarse"] = r.f3.coarse;
      p["f3_xtheta_phi"] = r.f3.first;
      p["f3_ytheta_phi"] = r.f3.second;
      p["eq4_lhs"] = r.eq4_lhs;
      p["eq4_rhs"] = r.eq4_rhs;
      p["eq5_rhs"] = r.eq5_rhs;
      p["eq5_residual"] = r.eq5_residual;
      p["eq6_lhs"] = r.eq6_lhs;
      p["eq6_rhs"] = r.eq6_rhs;
      p["eq6_tolerance"] = r.eq6_tolerance;
      p["eq6_satisfied"] = r.eq6_satisfied;
      p["identification_gap"] = r.identification_gap;
      doc["points"].push_back(std::move(p));
    }
    return doc.dump(2) + '\n';
  }

  std::string out;
  if (mc) {
    out += "# model=mc n=" + std::to_string(c.n) + " seed=" + std::to_string(c.seed) +
           " seed_source=" + c.seed_source + '\n';
  }
  out += join_row(kScanColumns);
  for (std::size_t idx = 0; idx < reports.size(); ++idx) {
    out += join_row(scan_fields(reports[idx], static_cast<double>(idx / count) * c.step_deg,
                                static_cast<double>(idx % count) * c.step_deg));
  }
  return out;
}

std::string render_mc(const RunConfig& c) {
  std::vector<StageEntry> stages = canonical_stages(c.theta_deg, c.phi_deg);
  if (c.stage != "all") {
    const std::size_t pick = static_cast<std::size_t>(c.stage[0] - '1');
    stages = {stages[pick]};
  }

  json doc;
  doc["theta_deg"] = c.theta_deg;
  doc["phi_deg"] = c.phi_deg;
  doc["n"] = c.n;
  doc["seed"] = c.seed;
  doc["seed_source"] = c.seed_source;
  doc["stages"] = json::array();

  std::string csv = join_row({"stage", "seed", "seed_source", "n_trials", "n_conditioned", "path",
                              "detected", "count", "frequency", "stderr", "closed_form"});

  for (const StageEntry& e : stages) {
    const auto r = pilot_wave::pw_monte_carlo(e.spec, c.n, c.seed, {c.threads});
    const FractionReport closed = pilot_wave::pw_components(e.spec);
    const std::string label = to_string(e.spec.label);

    json s;
    s["label"] = label;
    s["n_trials"] = r.n_trials;
    s["n_conditioned"] = r.n_conditioned;
    s["detected"] = r.detected();
    s["coarse_frequency"] = r.coarse_frequency();
    s["coarse_stderr"] = r.coarse_standard_error();
    s["coarse_closed_form"] = closed.coarse;
    json rows = json::array();
    const std::vector<std::string> prefix = {label, std::to_string(r.seed), c.seed_source,
                                             std::to_string(r.n_trials),
                                             std::to_string(r.n_conditioned)};
    auto emit = [&](const ChannelPath& path, std::uint64_t count, bool detected) {
      const double freq = r.n_conditioned ? static_cast<double>(count) / static_cast<double>(r.n_conditioned) : 0.0;
      const double se = r.n_conditioned ? std::sqrt(freq * (1.0 - freq) / static_cast<double>(r.n_conditioned)) : 0.0;
      json row;
      row["path"] = to_string(path);
      row["detected"] = detected;
      row["count"] = count;
      row["frequency"] = freq;
      row["stderr"] = se;
      std::string closed_text;
      if (detected) {
        row["closed_form"] = closed.component(path);
        closed_text = format_real(closed.component(path));
      } else {
        row["closed_form"] = nullptr;
      }
      rows.push_back(std::move(row));
      std::vector<std::string> fields = prefix;
      fields.insert(fields.end(), {to_string(path), bool_text(detected), std::to_string(count),
                                   format_real(freq), format_real(se), closed_text});
      csv += join_row(fields);
    };
    // Every closed-form component gets a row, even when never sampled.
    for (const auto& [path, p] : *closed.components) {
      auto it = r.counts.find(path);
      emit(path, it == r.counts.end() ? 0 : it->second, true);
    }
    for (const auto& [path, count] : r.undetected) emit(path, count, false);
    s["paths"] = std::move(rows);
    doc["stages"].push_back(std::move(s));
  }
  return c.format == Format::Json ? doc.dump(2) + '\n' : csv;
}

std::string render_check(const RunConfig& c, bool& all_passed) {
  check::SuiteOptions opts;
  opts.step_deg = c.step_deg;
  opts.seed = c.seed;
  opts.threads = c.threads;
  const auto results = check::run_invariant_suites(opts);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  all_passed = passed == results.size();
  const std::string summary = std::to_string(passed) + "/" + std::to_string(results.size()) +
                              " suites passed";

  if (c.format == Format::Json) {
    json doc;
    doc["step_deg"] = c.step_deg;
    doc["seed"] = c.seed;
    doc["seed_source"] = c.seed_source;
    doc["suites"] = json::array();
    for (const auto& r : results) {
      doc["suites"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    }
    doc["all_passed"] = all_passed;
    doc["summary"] = summary;
    return doc.dump(2) + '\n';
  }
  std::string out = join_row({"suite", "status", "detail"});
  for (const auto& r : results) {
    out += join_row({r.name, r.passed ? "PASS" : "FAIL", csv_quote(r.detail)});
  }
  out += join_row({"summary", all_passed ? "PASS" : "FAIL", csv_quote(summary)});
  return out;
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned 64-bit integer: '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::optional<std::string> validate(const RunConfig& c) {
  if (!std::isfinite(c.theta_deg) || !std::isfinite(c.phi_deg)) {
    return "angles must be finite";
  }
  if ((c.command == Command::Scan || c.command == Command::Check) &&
      !(c.step_deg > 0.0 && c.step_deg <= 90.0)) {
    return "--step-deg must lie in (0, 90]";
  }
  const bool samples = c.command == Command::Mc || (c.command == Command::Scan && c.model == "mc");
  if (samples && c.n == 0) {
    return "--n must be at least 1";
  }
  if (c.model != "closed" && c.model != "mc") {
    return "--model must be 'closed' or 'mc'";
  }
  if (c.stage != "all" && c.stage != "1" && c.stage != "2" && c.stage != "3") {
    return "--stage must be 1, 2, 3 or all";
  }
  return std::nullopt;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (auto problem = validate(config)) {
    err << "polaudit: " << *problem << '\n';
    return kExitUsage;
  }
  std::string document;
  int status = kExitOk;
  try {
    switch (config.command) {
      case Command::Stage: document = render_stage(config); break;
      case Command::Scan: document = render_scan(config); break;
      case Command::Mc: document = render_mc(config); break;
      case Command::Check: {
        bool ok = false;
        document = render_check(config, ok);
        status = ok ? kExitOk : kExitInvariantFailure;
        break;
      }
    }
  } catch (const std::invalid_argument& e) {
    err << "polaudit: " << e.what() << '\n';
    return kExitUsage;
  }

  if (config.output.empty()) {
    out << document;
  } else {
    // Stage through a sibling file so a failed write never leaves a partial document.
    const std::filesystem::path target(config.output);
    std::filesystem::path staging = target;
    staging += ".partial";
    {
      std::ofstream file(staging, std::ios::binary | std::ios::trunc);
      file << document;
      file.flush();
      if (!file) {
        file.close();
        std::error_code ignored;
        std::filesystem::remove(staging, ignored);
        err << "polaudit: cannot write " << config.output << '\n';
        return kExitUsage;
      }
    }
    std::error_code ec;
    std::filesystem::rename(staging, target, ec);
    if (ec) {
      std::filesystem::remove(staging, ec);
      err << "polaudit: cannot write " << config.output << '\n';
      return kExitUsage;
    }
  }
  if (status != kExitOk) {
    err << "polaudit: invariant suite failed\n";
  }
  return status;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::optional<std::uint64_t> seed_flag;
  std::string format = "csv";

  CLI::App app{"Analyzer-loop polarization experiment: quantum and pilot-wave fractions, "
               "Bell-inequality audit"};
  app.require_subcommand(1);

  auto add_angles = [&](CLI::App* sub) {
    sub->add_option("--theta-deg", config.theta_deg, "Intermediate loop axis (degrees)");
    sub->add_option("--phi-deg", config.phi_deg, "Final loop axis (degrees)");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-o,--output", config.output, "Output file (default: standard output)");
    sub->add_option("--threads", config.threads, "Worker threads, 0 = all cores");
    sub->add_option("--seed", seed_flag, "RNG seed (overrides " + std::string(kSeedEnv) + ")");
  };

  CLI::App* stage = app.add_subcommand("stage", "Fractions of the three stages at one (theta, phi)");
  add_angles(stage);
  add_common(stage);

  CLI::App* scan = app.add_subcommand("scan", "Inequality report over an angle grid");
  scan->add_option("--step-deg", config.step_deg, "Grid step (degrees)");
  scan->add_option("--model", config.model, "closed or mc");
  scan->add_option("--n", config.n, "Trials per stage and point when --model mc");
  add_common(scan);

  CLI::App* check = app.add_subcommand("check", "Run every invariant suite");
  check->add_option("--step-deg", config.step_deg, "Grid step (degrees)");
  add_common(check);

  CLI::App* mc = app.add_subcommand("mc", "Pilot-wave Monte Carlo run");
  add_angles(mc);
  mc->add_option("--n", config.n, "Source emissions per stage");
  mc->add_option("--stage", config.stage, "1, 2, 3 or all");
  add_common(mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (stage->parsed()) config.command = Command::Stage;
  if (scan->parsed()) config.command = Command::Scan;
  if (check->parsed()) config.command = Command::Check;
  if (mc->parsed()) config.command = Command::Mc;
  config.format = format == "json" ? Format::Json : Format::Csv;

  try {
    if (seed_flag) {
      config.seed = *seed_flag;
      config.seed_source = "flag";
    } else if (const char* env = std::getenv(kSeedEnv)) {
      config.seed = parse_seed(env);
      config.seed_source = "env";
    }
  } catch (const UsageError& e) {
    err << "polaudit: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(config, out, err);
}

}  // namespace polaudit::cli
