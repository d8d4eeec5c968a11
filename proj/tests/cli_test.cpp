#include "polaudit/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"

using namespace polaudit::cli;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "polaudit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

class SeedEnvGuard {
 public:
  SeedEnvGuard() { ::unsetenv(kSeedEnv); }
  ~SeedEnvGuard() { ::unsetenv(kSeedEnv); }
};

}  // namespace

TEST(cli, stage_json_reports_all_three_stages) {
  const Outcome o = invoke({"stage", "--theta-deg", "30", "--phi-deg", "60", "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const json doc = json::parse(o.out);
  ASSERT_EQ(doc["stages"].size(), 3u);
  const json& s1 = doc["stages"][0];
  const json& s2 = doc["stages"][1];
  const json& s3 = doc["stages"][2];
  EXPECT_NEAR(s1["quantum"]["coarse"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(s2["quantum"]["coarse"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(s3["quantum"]["coarse"].get<double>(), 0.75, 1e-12);
  EXPECT_TRUE(s1["quantum"]["components"].is_null());
  EXPECT_NEAR(s1["pilot_wave"]["components"]["+++"].get<double>(), 0.1875, 1e-12);
  EXPECT_NEAR(s1["pilot_wave"]["components"]["+-+"].get<double>(), 0.0625, 1e-12);
  EXPECT_NEAR(s2["pilot_wave"]["components"]["-+-"].get<double>(), 0.0625, 1e-12);
  EXPECT_NEAR(s3["pilot_wave"]["components"]["-++"].get<double>(), 0.1875, 1e-12);
  EXPECT_EQ(s3["left_outcome_deg"].get<double>(), 120.0);
  EXPECT_EQ(s1["left_probability"].get<double>(), 0.5);
}

TEST(cli, stage_csv) {
  const Outcome o = invoke({"stage", "--theta-deg", "30", "--phi-deg", "60"});
  ASSERT_EQ(o.code, kExitOk);
  const auto rows = lines(o.out);
  EXPECT_EQ(rows[0], "stage,model,path,probability");
  EXPECT_EQ(rows[1].rfind("stage1,quantum,,0.2", 0), 0u);
}

TEST(cli, scan_csv_header_and_precision) {
  const Outcome o = invoke({"scan", "--step-deg", "90"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto rows = lines(o.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0],
            "theta_deg,phi_deg,f1_coarse,f1_xtheta_phi,f1_xthetabar_phi,f2_coarse,f2_ytheta_phi,"
            "f2_ytheta_phibar,f3_coarse,f3_xtheta_phi,f3_ytheta_phi,eq4_lhs,eq4_rhs,eq5_residual,"
            "eq6_lhs,eq6_rhs,eq6_satisfied,identification_gap");
  EXPECT_EQ(rows[1].rfind("0,0,1,1,0,", 0), 0u);
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(0.75), "0.75");
}

TEST(cli, scan_row_at_30_60) {
  const Outcome o = invoke({"scan", "--step-deg", "30", "--format", "json"});
  ASSERT_EQ(o.code, kExitOk);
  const json doc = json::parse(o.out);
  ASSERT_EQ(doc["points"].size(), 36u);
  const json& p = doc["points"][1 * 6 + 2];
  EXPECT_EQ(p["theta_deg"].get<double>(), 30.0);
  EXPECT_EQ(p["phi_deg"].get<double>(), 60.0);
  EXPECT_FALSE(p["eq6_satisfied"].get<bool>());
  EXPECT_NEAR(p["identification_gap"].get<double>(), -0.375, 1e-12);
}

TEST(cli, check_passes) {
  const Outcome o = invoke({"check", "--step-deg", "5"});
  EXPECT_EQ(o.code, kExitOk) << o.out;
  EXPECT_EQ(o.out.find("FAIL"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("summary,PASS"), std::string::npos);
}

TEST(cli, mc_aligned_axes) {
  SeedEnvGuard guard;
  const Outcome o = invoke({"mc", "--theta-deg", "0", "--phi-deg", "0", "--n", "1000", "--seed",
                            "7", "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const json doc = json::parse(o.out);
  EXPECT_EQ(doc["seed"].get<std::uint64_t>(), 7u);
  EXPECT_EQ(doc["seed_source"], "flag");
  const json& s3 = doc["stages"][2];
  EXPECT_EQ(s3["label"], "stage3");
  bool found = false;
  for (const json& row : s3["paths"]) {
    if (row["path"] == "+++" && row["detected"].get<bool>()) {
      EXPECT_EQ(row["frequency"].get<double>(), 1.0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(cli, mc_output_independent_of_threads) {
  SeedEnvGuard guard;
  const Outcome a = invoke({"mc", "--n", "50000", "--seed", "3", "--threads", "1"});
  const Outcome b = invoke({"mc", "--n", "50000", "--seed", "3", "--threads", "6"});
  ASSERT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
}

TEST(cli, seed_from_environment_is_echoed) {
  SeedEnvGuard guard;
  ::setenv(kSeedEnv, "99", 1);
  Outcome o = invoke({"mc", "--n", "10", "--stage", "1", "--format", "json"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  json doc = json::parse(o.out);
  EXPECT_EQ(doc["seed"].get<std::uint64_t>(), 99u);
  EXPECT_EQ(doc["seed_source"], "env");
  EXPECT_EQ(doc["stages"].size(), 1u);

  o = invoke({"mc", "--n", "10", "--seed", "5", "--format", "json"});
  doc = json::parse(o.out);
  EXPECT_EQ(doc["seed"].get<std::uint64_t>(), 5u);
  EXPECT_EQ(doc["seed_source"], "flag");

  ::setenv(kSeedEnv, "not-a-number", 1);
  o = invoke({"mc", "--n", "10"});
  EXPECT_EQ(o.code, kExitUsage);
  EXPECT_TRUE(o.out.empty());
}

TEST(cli, default_seed_source) {
  SeedEnvGuard guard;
  const Outcome o = invoke({"mc", "--n", "10", "--format", "json"});
  const json doc = json::parse(o.out);
  EXPECT_EQ(doc["seed"].get<std::uint64_t>(), kDefaultSeed);
  EXPECT_EQ(doc["seed_source"], "default");
}

TEST(cli, usage_errors) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"scan", "--step-deg", "0"},
           {"scan", "--step-deg", "-5"},
           {"mc", "--n", "0"},
           {"stage", "--theta-deg", "nan"},
           {"stage", "--format", "xml"},
           {"bogus"},
           {}}) {
    const Outcome o = invoke(args);
    EXPECT_EQ(o.code, kExitUsage) << (args.empty() ? "" : args[0]);
    EXPECT_TRUE(o.out.empty());
    EXPECT_FALSE(o.err.empty());
  }
}

TEST(cli, invalid_config_writes_no_file) {
  const auto path = std::filesystem::temp_directory_path() / "polaudit_cli_test_invalid.csv";
  std::filesystem::remove(path);
  const Outcome o = invoke({"scan", "--step-deg", "0", "--output", path.string()});
  EXPECT_EQ(o.code, kExitUsage);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(cli, output_file) {
  const auto path = std::filesystem::temp_directory_path() / "polaudit_cli_test_scan.csv";
  std::filesystem::remove(path);
  const Outcome o = invoke({"scan", "--step-deg", "45", "--output", path.string()});
  ASSERT_EQ(o.code, kExitOk);
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(path);
  std::stringstream body;
  body << in.rdbuf();
  EXPECT_EQ(lines(body.str()).size(), 17u);
  std::filesystem::remove(path);
}

TEST(cli, validate_direct) {
  RunConfig c;
  c.command = Command::Mc;
  c.n = 0;
  EXPECT_TRUE(validate(c).has_value());
  c.n = 1;
  EXPECT_FALSE(validate(c).has_value());
  c.stage = "4";
  EXPECT_TRUE(validate(c).has_value());
}
