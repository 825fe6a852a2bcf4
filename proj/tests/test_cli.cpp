#include <gtest/gtest.h>

#include <evenscat/cli.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace evenscat;
using cli::Json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

Felt first_member(const FieldCtx& F) { return frak_c_elements(enumerate_frak_C(F)).front(); }

}  // namespace

TEST(Cli, ParseChecks) {
  EXPECT_EQ(cli::parse_checks("lemmas,scattered_fiber,lemmas"),
            (std::vector<cli::Check>{cli::Check::scattered_fiber, cli::Check::lemmas}));
  EXPECT_EQ(cli::parse_checks("all").size(), 9u);
  EXPECT_THROW(cli::parse_checks("lemmas,bogus"), ParseError);
  EXPECT_THROW(cli::parse_checks(""), ParseError);
}

TEST(Cli, ConfigValidation) {
  cli::CampaignConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.e = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.s = 3;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.threads = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = {};
  cfg.checks.clear();
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(Cli, OperationalErrorsExitOne) {
  const auto r = run({"enumerate", "--e", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("e must be at least 1"), std::string::npos);
  EXPECT_EQ(run({"check", "--e", "2", "--c", "xyz"}).code, 1);
  EXPECT_EQ(run({"check", "--e", "2", "--c", "1000000"}).code, 1);
  EXPECT_EQ(run({"enumerate", "--e", "1", "--checks", "nope"}).code, 1);
  EXPECT_EQ(run({"enumerate", "--e", "1", "--s", "2"}).code, 1);
  EXPECT_EQ(run({"enumerate", "--e", "1", "--modulus", "0x40"}).code, 1);
  EXPECT_EQ(run({"oracle-q2", "--e", "2"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"enumerate", "--e", "1", "--out", "/nonexistent-dir/x.json"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, EnumerateJsonShape) {
  const auto r = run({"enumerate", "--e", "2", "--checks", "scattered_fiber,lemmas", "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys.front(), "e");
  EXPECT_EQ(j["e"], 2);
  EXPECT_EQ(j["q"], 4);
  EXPECT_EQ(j["frak_c_size"], 48);
  EXPECT_EQ(j["q_cubed"], 64);
  EXPECT_TRUE(j["frobenius_stable"].get<bool>());
  std::size_t members = 0;
  for (const auto& rec : j["records"]) {
    if (!rec["in_frak_c"].get<bool>()) continue;
    ++members;
    EXPECT_TRUE(rec["scattered"].get<bool>());
    EXPECT_EQ(rec["checks"].size(), 2u);
    EXPECT_TRUE(rec["checks"]["scattered_fiber"].get<bool>());
    EXPECT_TRUE(rec["checks"]["lemmas"].get<bool>());
  }
  EXPECT_EQ(members, 48u);
}

TEST(Cli, CsvHeaderFollowsJsonFieldOrder) {
  const std::vector<std::string> base = {"enumerate", "--e", "2", "--checks", "lemmas,scattered_fiber"};
  auto csv_args = base;
  csv_args.insert(csv_args.end(), {"--format", "csv"});
  const auto csv = run(csv_args), js = run(base);
  ASSERT_EQ(csv.code, 0);
  const Json j = Json::parse(js.out);
  std::istringstream lines(csv.out);
  std::string header;
  std::getline(lines, header);
  std::string expect;
  for (const auto& [k, v] : j["records"][0].items())
    if (k != "checks") expect += (expect.empty() ? "" : ",") + k;
  expect += ",scattered_fiber,lemmas";
  EXPECT_EQ(header, expect);
  std::size_t rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  EXPECT_EQ(rows, j["records"].size());
}

TEST(Cli, EnumerateIsDeterministicAcrossThreadCounts) {
  const std::vector<std::string> base = {"enumerate", "--e", "2", "--checks", "scattered_fiber,linset,mrd"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1"});
  b.insert(b.end(), {"--threads", "3"});
  const auto ra = run(a), rb = run(b);
  ASSERT_EQ(ra.code, 0);
  EXPECT_EQ(ra.out, rb.out);
}

TEST(Cli, CheckOnMemberPassesEverything) {
  const auto F = make_field(2);
  const std::string c = F.to_hex(first_member(F));
  for (const char* s : {"1", "5"}) {
    const auto r = run({"check", "--e", "2", "--s", s, "--c", c, "--threads", "2"});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_TRUE(j["in_frak_c"].get<bool>());
    EXPECT_EQ(j["checks"].size(), 9u);
    for (const auto& [k, v] : j["checks"].items()) EXPECT_TRUE(v.get<bool>()) << k;
  }
}

TEST(Cli, CheckOnNonMemberReportsWithoutFailing) {
  const auto r = run({"check", "--e", "2", "--c", "1", "--checks", "scattered_fiber,phi_identities"});
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_FALSE(j["in_frak_c"].get<bool>());
  EXPECT_FALSE(j["checks"]["scattered_fiber"].get<bool>());
  EXPECT_TRUE(j["checks"]["phi_identities"].is_null());
}

TEST(Cli, CodeReport) {
  const auto r = run({"code-report", "--e", "2", "--c", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = Json::parse(r.out);
  EXPECT_FALSE(j["is_mrd"].get<bool>());
  EXPECT_LT(j["min_distance"].get<int>(), 5);

  const auto F = make_field(2);
  const auto good = run({"code-report", "--e", "2", "--c", F.to_hex(first_member(F))});
  j = Json::parse(good.out);
  EXPECT_TRUE(j["is_mrd"].get<bool>());
  EXPECT_EQ(j["min_distance"], 5);
  EXPECT_EQ(j["dim_q"], 12);
  EXPECT_EQ(j["right_idealizer_order"], 16);
  EXPECT_EQ(j["left_idealizer_order"], 4096);
}

TEST(Cli, Linset) {
  const auto F = make_field(2);
  const auto r = run({"linset", "--e", "2", "--s", "5", "--c", F.to_hex(first_member(F)), "--format", "csv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("c,s,size,weight_histogram,max_scattered\n"), std::string::npos);
  EXPECT_NE(r.out.find(",5,1365,1:1365,true"), std::string::npos);
}

TEST(Cli, EquivMeetsBound) {
  const auto r = run({"equiv", "--e", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["frak_c_size"], 48);
  EXPECT_GE(j["class_count"].get<int>() * 12, 48);
  EXPECT_TRUE(j["bound_6e_met"].get<bool>());
  EXPECT_TRUE(j["bound_12e_plus_1_met"].get<bool>());
  std::size_t members = 0, witnesses = 0;
  for (const auto& c : j["classes"]) {
    members += c["members"].size();
    witnesses += c["witnesses"].size();
    for (const auto& w : c["witnesses"]) EXPECT_TRUE(w["valid"].get<bool>());
  }
  EXPECT_EQ(members, 96u);
  EXPECT_EQ(witnesses, 96u - j["class_count"].get<std::size_t>());
}

TEST(Cli, OracleQ2) {
  const auto r = run({"oracle-q2", "--e", "1", "--limit", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_FALSE(j["swap_a1_a5"].is_null());
  EXPECT_EQ(j["family_b_size"], 0);
  EXPECT_EQ(j["samples"].size(), 4u);
}

TEST(Cli, WritesToFile) {
  const auto path = std::filesystem::temp_directory_path() / "evenscat_cli_test.json";
  const auto r = run({"enumerate", "--e", "1", "--checks", "lemmas", "--out", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  const Json j = Json::parse(f);
  EXPECT_EQ(j["frak_c_size"], 0);
  std::filesystem::remove(path);
}

TEST(Cli, LimitSamplesDeterministically) {
  const std::vector<std::string> args = {"enumerate", "--e", "2", "--checks", "lemmas", "--limit", "5", "--seed", "9"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const Json j = Json::parse(a.out);
  EXPECT_EQ(j["records"].size(), 5u);
  EXPECT_EQ(j["frak_c_size"], 48);
}
