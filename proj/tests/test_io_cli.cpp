#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dmetrics/error.hpp"
#include "dmetrics/io.hpp"
#include "dmetrics_cli/cli.hpp"

namespace dmetrics {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

TEST(Json, DefaultsAndRoundTrip) {
  const auto d = domain_from_json(json{{"kind", "ball"}, {"n", 2}});
  EXPECT_EQ(d.kind(), DomainKind::ball);
  EXPECT_DOUBLE_EQ(d.dist_to_boundary({0.0, 0.0}), 1.0);
  for (const auto& spec : {
           json{{"kind", "half_space"}, {"n", 2}, {"normal", {0, 1}}, {"offset", 0}, {"scale", 2}},
           json{{"kind", "convex_polygon"}, {"n", 2}, {"vertices", {{0, 0}, {1, 0}, {0, 1}}}},
           json{{"kind", "slit_disk"}, {"n", 2}},
           json{{"kind", "tangent_disk_cusp"}, {"n", 2}},
           json{{"kind", "punctured_disk"}, {"n", 2}, {"full_plane", true}},
       }) {
    const auto d1 = domain_from_json(spec);
    const auto d2 = domain_from_json(domain_to_json(d1));
    EXPECT_EQ(d1.describe(), d2.describe());
  }
}

TEST(Json, Errors) {
  auto message = [](const json& spec) {
    try {
      domain_from_json(spec);
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(json{{"kind", "convex_polygon"},
                         {"n", 2},
                         {"vertices", {{0, 0}, {2, 0}, {1, 0.5}, {2, 2}, {0, 2}}}})
                .find("polygon not convex"),
            std::string::npos);
  EXPECT_NE(message(json{{"kind", "ball"}, {"n", 2}, {"radius", 1}, {"colour", "red"}}), "");
  EXPECT_NE(message(json{{"kind", "klein_bottle"}, {"n", 2}}), "");
  EXPECT_NE(message(json{{"kind", "ball"}, {"n", 1}}), "");
  EXPECT_NE(message(json{{"kind", "slit_disk"}, {"n", 3}}), "");
  EXPECT_NE(message(json{{"n", 2}}), "");
}

TEST(Json, NumbersAndMetricValues) {
  EXPECT_EQ(number_json(INFINITY), json("inf"));
  EXPECT_EQ(number_json(0.5), json(0.5));
  const auto exact = to_json(MetricValue::exact(1.5));
  EXPECT_EQ(exact["exact"], true);
  const auto br = to_json(MetricValue{1.0, 0.9, 1.1, false});
  EXPECT_DOUBLE_EQ(br["lower"].get<double>(), 0.9);
  EXPECT_DOUBLE_EQ(br["upper"].get<double>(), 1.1);
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dmetrics_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    write("disk.json", R"({"kind": "ball", "n": 2, "center": [0, 0], "radius": 1})");
    write("slit.json", R"({"kind": "slit_disk", "n": 2})");
    write("half.json", R"({"kind": "half_space", "n": 2, "normal": [0, 1], "offset": 0, "scale": 4})");
    write("bad.json", R"({"kind": "convex_polygon", "n": 2, "vertices": [[0,0],[2,0],[1,0.5],[2,2],[0,2]]})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}), cli::usage_error);
  EXPECT_EQ(run({"frobnicate"}), cli::usage_error);
  EXPECT_EQ(run({"dist", "--x", "0,0", "--y", "0.5,0"}), cli::usage_error);
  EXPECT_EQ(run({"dist", "--domain", path("missing.json"), "--x", "0,0", "--y", "0.5,0"}),
            cli::usage_error);
  EXPECT_EQ(run({"dist", "--domain", path("bad.json"), "--x", "1,1", "--y", "0.5,1"}),
            cli::usage_error);
  EXPECT_NE(err_.str().find("polygon not convex"), std::string::npos);
  EXPECT_EQ(run({"dist", "--domain", path("disk.json"), "--x", "2,0", "--y", "0.5,0"}),
            cli::usage_error);
  EXPECT_EQ(run({"dist", "--domain", path("disk.json"), "--x", "0,0,0", "--y", "0.5,0"}),
            cli::usage_error);
  EXPECT_EQ(run({"dist", "--domain", path("disk.json"), "--x", "0,0", "--y", "0.5,0", "--h", "-1"}),
            cli::usage_error);
  EXPECT_EQ(run({"--help"}), cli::ok);
}

TEST_F(Cli, NumericalFailureExitCode) {
  EXPECT_EQ(run({"dist", "--domain", path("disk.json"), "--x", "0,0", "--y", "0.5,0", "--h", "0.01",
                 "--max-nodes", "50"}),
            cli::numerical_failure);
}

TEST_F(Cli, DistJson) {
  ASSERT_EQ(run({"dist", "--domain", path("disk.json"), "--x", "0,0", "--y", "0.5,0", "--h", "0.02",
                 "--json"}),
            cli::ok)
      << err_.str();
  const auto j = json::parse(out_.str());
  EXPECT_NEAR(j["metrics"]["alpha"]["value"].get<double>(), std::log(3.0), 1e-3);
  EXPECT_EQ(j["metrics"]["j"]["exact"], true);
}

TEST_F(Cli, GeodesicCsv) {
  ASSERT_EQ(run({"geodesic", "--domain", path("slit.json"), "--x", "0.5,0.1", "--y", "0.5,-0.1", "--h",
                 "0.02", "--weight", "euclidean"}),
            cli::ok)
      << err_.str();
  std::istringstream rows(out_.str());
  std::string line;
  std::getline(rows, line);
  EXPECT_EQ(line, "x0,x1");
  std::size_t n = 0;
  while (std::getline(rows, line)) ++n;
  EXPECT_GE(n, 3u);
  EXPECT_EQ(run({"geodesic", "--domain", path("slit.json"), "--x", "0.5,0.1", "--y", "0.5,-0.1",
                 "--weight", "taxicab"}),
            cli::usage_error);
}

TEST_F(Cli, VerifyIsDeterministic) {
  const std::vector<std::string> args{"verify", "--domain", path("slit.json"), "--pairs", "20", "--h",
                                      "0.04", "--seed", "7"};
  ASSERT_EQ(run(args), cli::ok) << err_.str();
  const std::string first = out_.str();
  ASSERT_EQ(run(args), cli::ok);
  EXPECT_EQ(out_.str(), first);
  EXPECT_EQ(json::parse(first)["failures"], 0);
}

TEST_F(Cli, ConstantsAndChain) {
  ASSERT_EQ(run({"constants", "--domain", path("slit.json"), "--pairs", "15", "--h", "0.04", "--csv",
                 path("pairs.csv")}),
            cli::ok)
      << err_.str();
  const auto report = json::parse(out_.str());
  EXPECT_TRUE(report.contains("constants"));
  EXPECT_TRUE(fs::exists(path("pairs.csv")));

  write("path.csv", "x0,x1\n0,0.1\n0,12.8\n");
  ASSERT_EQ(run({"chain", "--domain", path("half.json"), "--path", path("path.csv"), "--h", "0.2"}),
            cli::ok)
      << err_.str();
  const auto chain = json::parse(out_.str());
  EXPECT_EQ(chain["m"], 7);
  EXPECT_EQ(run({"chain", "--domain", path("half.json"), "--h", "0.2"}), cli::usage_error);
}

}  // namespace
}  // namespace dmetrics
