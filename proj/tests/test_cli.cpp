#include <gtest/gtest.h>

#include <algorithm>
#include <charconv>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "oracles.hpp"
#include "phasemix/io.hpp"

using namespace phasemix;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "phasemix");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string model(const std::string& name) { return std::string(PHASEMIX_MODELS_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / ("phasemix_test_" + name);
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST(Cli, TailOfExponentialMixtureAtOne) {
  const Outcome o = invoke({"tail", "-m", model("exp_exp.json"), "--x", "1"});
  ASSERT_EQ(o.status, 0) << o.err;
  const auto comma = o.out.find('\n') + 1;
  EXPECT_EQ(o.out.substr(0, comma), "x,tail\n");
  const std::string row = o.out.substr(comma);
  const double v = std::stod(row.substr(row.find(',') + 1));
  EXPECT_NEAR(v / (2.0 * oracle::bessel_k(1.0, 2.0)), 1.0, 1e-9);
}

TEST(Cli, MdaRoutesParetoToFrechet) {
  const Outcome o = invoke({"mda", "-m", model("exp_pareto25.json"), "--format", "json"});
  ASSERT_EQ(o.status, 0) << o.err;
  const Json j = Json::parse(o.out);
  EXPECT_EQ(j["mda"]["kind"], "frechet");
  EXPECT_EQ(j["mda"]["alpha"], 2.5);
  const Outcome csv = invoke({"mda", "-m", model("exp_pareto25.json")});
  EXPECT_NE(csv.out.find("mda,frechet\nalpha,2.5\n"), std::string::npos) << csv.out;
}

TEST(Cli, InvalidGeneratorIsValidationError) {
  const std::string p = write_temp("bad.json", R"({"ph": {"beta": [1], "lambda": [[0.5]]},
                                                    "scaler": {"family": "exponential", "rate": 1}})");
  const Outcome o = invoke({"tail", "-m", p, "--x", "1"});
  EXPECT_EQ(o.status, 2);
  EXPECT_NE(o.err.find("NotSubIntensity"), std::string::npos) << o.err;
  EXPECT_EQ(std::count(o.err.begin(), o.err.end(), '\n'), 1);
  EXPECT_TRUE(o.out.empty());
}

TEST(Cli, NumericFailureExitsThree) {
  const std::string p = write_temp("trunc.json", R"({"ph": {"beta": [1], "lambda": [[-1]]},
      "scaler": {"family": "zipf", "alpha": 3}, "policy": {"max_terms": 5}})");
  const Outcome o = invoke({"tail", "-m", p, "--x", "100"});
  EXPECT_EQ(o.status, 3);
  EXPECT_NE(o.err.find("TruncationBoundViolated"), std::string::npos) << o.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(invoke({"frobnicate", "-m", model("exp_exp.json")}).status, 2);
  EXPECT_EQ(invoke({"tail"}).status, 2);
  EXPECT_EQ(invoke({"tail", "-m", model("exp_exp.json"), "--x", "1", "--grid", "1:2:3"}).status, 2);
  EXPECT_EQ(invoke({"tail", "-m", model("exp_exp.json"), "--grid", "1:2"}).status, 2);
  EXPECT_EQ(invoke({"tail", "-m", "/nonexistent/model.json"}).status, 2);
  EXPECT_EQ(invoke({"compare", "-m", model("hyper_discrete.json")}).status, 2);
  EXPECT_EQ(invoke({"--help"}).status, 0);
}

TEST(Cli, ParseGrid) {
  const cli::GridSpec g = cli::parse_grid("0.5:2e3:4");
  EXPECT_EQ(g.lo, 0.5);
  EXPECT_EQ(g.hi, 2e3);
  EXPECT_EQ(g.per_decade, 4);
  for (const char* bad : {"", "1:2", "1:2:0", "2:1:3", "a:2:3", "1:2:3:4", "-1:2:3"}) {
    EXPECT_THROW(cli::parse_grid(bad), Error) << bad;
  }
}

TEST(Cli, DefaultGridHasEightPointsPerDecade) {
  const Outcome o = invoke({"pdf", "-m", model("exp_exp.json")});
  ASSERT_EQ(o.status, 0) << o.err;
  EXPECT_EQ(std::count(o.out.begin(), o.out.end(), '\n'), 1 + 4 * 8 + 1);
  EXPECT_NE(o.out.find("\n1000,"), std::string::npos);
}

TEST(Cli, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  for (int i = 0; i < 20000; ++i) {
    std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = cli::format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(std::memcmp(&back, &v, sizeof v), 0) << s;
  }
  EXPECT_EQ(cli::format_double(0.1), "0.1");
  EXPECT_EQ(cli::format_double(1e300 * 1e10), "inf");
}

TEST(Cli, CompareNumericColumnMatchesTailBitForBit) {
  const std::vector<std::string> common = {"-m", model("erlang2_zipf3.json"), "--grid", "1:1000:4", "--format", "json"};
  auto args = [&](const char* cmd) {
    std::vector<std::string> a{cmd};
    a.insert(a.end(), common.begin(), common.end());
    return a;
  };
  const Outcome tail = invoke(args("tail"));
  const Outcome cmp = invoke(args("compare"));
  ASSERT_EQ(tail.status, 0) << tail.err;
  ASSERT_EQ(cmp.status, 0) << cmp.err;
  const Json t = Json::parse(tail.out);
  const Json c = Json::parse(cmp.out);
  ASSERT_EQ(t["rows"].size(), c["rows"].size());
  for (std::size_t i = 0; i < t["rows"].size(); ++i) {
    const double numeric = c["rows"][i][1].get<double>();
    EXPECT_EQ(t["rows"][i][1].get<double>(), numeric);
    EXPECT_EQ(c["rows"][i][3].get<double>(), numeric / c["rows"][i][2].get<double>());
  }
}

TEST(Cli, SampleIsDeterministicPerSeed) {
  const auto a = invoke({"sample", "-m", model("erlang2_lognormal.json"), "--seed", "11", "--count", "500"});
  const auto b = invoke({"sample", "-m", model("erlang2_lognormal.json"), "--seed", "11", "--count", "500"});
  const auto c = invoke({"sample", "-m", model("erlang2_lognormal.json"), "--seed", "12", "--count", "500"});
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 501);
}

TEST(Cli, ThreadCountDoesNotChangeOutput) {
  cli::RunConfig c;
  c.command = cli::Command::SeriesBounds;
  c.model_path = model("erlang2_zipf3.json");
  c.grid = cli::GridSpec{0.1, 1e4, 6};
  std::ostringstream one, many, err;
  c.threads = 1;
  ASSERT_EQ(cli::run(c, one, err), 0) << err.str();
  c.threads = 7;
  ASSERT_EQ(cli::run(c, many, err), 0) << err.str();
  EXPECT_EQ(one.str(), many.str());
}

TEST(Cli, MomentsAndAsymptote) {
  const Outcome m = invoke({"moments", "-m", model("exp_pareto25.json"), "--order", "3"});
  ASSERT_EQ(m.status, 0) << m.err;
  // E[Y^n] E[S^n] with E[S^n] = alpha / (alpha - n): 5/3, 2 * 5, inf
  EXPECT_EQ(m.out, "order,moment\n1,1.6666666666666667\n2,10\n3,inf\n");
  const Outcome a = invoke({"asymptote", "-m", model("exp_geometric.json"), "--format", "json"});
  ASSERT_EQ(a.status, 0) << a.err;
  const Json j = Json::parse(a.out);
  EXPECT_EQ(j["kind"], "bessel_stretched");
  EXPECT_TRUE(j["calibrated"].get<bool>());
  EXPECT_NEAR(j["constants"]["c"].get<double>() / j["constants"]["c_nominal"].get<double>(), 1.0, 1e-3);
}

TEST(Cli, MdaThetaOverride) {
  const Outcome o = invoke({"mda", "-m", model("exp_exp.json"), "--theta", "0.2,3", "--format", "json"});
  ASSERT_EQ(o.status, 0) << o.err;
  const Json j = Json::parse(o.out);
  ASSERT_EQ(j["heavy_traces"].size(), 2u);
  EXPECT_EQ(j["heavy_traces"][0]["theta"], 0.2);
  EXPECT_TRUE(j["heavy_traces"][0]["increasing_last_decade"].get<bool>());
}
