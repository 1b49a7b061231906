#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dstft/cli.hpp"
#include "dstft/io.hpp"

using namespace dstft;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dstft_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name) const { return (dir_ / name).string(); }

  std::string config(const std::string& name, json j) const {
    j["schema_version"] = 1;
    std::ofstream(file(name)) << j.dump();
    return file(name);
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "dstft");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  json read_json(const std::string& path) const {
    std::ifstream in(path);
    return json::parse(in);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

json grid2(std::size_t n, double h) { return {{"counts", {n, n}}, {"spacing", h}}; }

}  // namespace

TEST_F(Cli, GenHeavisideSamplesAndSidecar) {
  std::string out = file("h.dstf");
  auto cfg = config("gen.json", {{"grid", grid2(16, 0.25)},
                                 {"fixture", {{"kind", "heaviside_sheet"}, {"u", {1, 0}}, {"c", 0}}},
                                 {"output", out}});
  ASSERT_EQ(run({"gen", "--config", cfg}), kExitOk) << err_.str();
  Signal s = io::read_signal(out);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    auto t = s.grid.point(i);
    EXPECT_EQ(s.values[i].real(), t[0] >= 0.0 ? 1.0 : 0.0);
  }
  json side = read_json(out + ".json");
  ASSERT_EQ(side["singular_sheets"].size(), 1u);
  EXPECT_EQ(side["singular_sheets"][0]["directions"][1], json({-1.0, -0.0}));
}

TEST_F(Cli, GenGaussianPassesBoundaryCheck) {
  std::string out = file("g.dstf");
  auto cfg = config("gen.json", {{"grid", grid2(64, 0.125)}, {"fixture", {{"kind", "gaussian"}}}, {"output", out}});
  ASSERT_EQ(run({"gen", "--config", cfg}), kExitOk);
  EXPECT_TRUE(read_json(out + ".json")["boundary_mass_ok"].get<bool>());
  EXPECT_TRUE(err_.str().empty());
}

TEST_F(Cli, GenSumIsElementwise) {
  json g = {{"kind", "gaussian"}, {"width", 0.5}};
  json p = {{"kind", "plane_wave"}, {"xi0", {1, 0}}};
  auto mk = [&](const std::string& name, json fx) {
    auto cfg = config(name + ".json", {{"grid", grid2(16, 0.25)}, {"fixture", fx}, {"output", file(name)}});
    EXPECT_EQ(run({"gen", "--config", cfg}), kExitOk) << err_.str();
    return io::read_signal(file(name));
  };
  Signal a = mk("a", g), b = mk("b", p), s = mk("s", {{"kind", "sum"}, {"terms", {g, p}}});
  for (std::size_t i = 0; i < s.values.size(); ++i) EXPECT_EQ(s.values[i], a.values[i] + b.values[i]);
}

TEST_F(Cli, GenRejections) {
  auto bad_kind = config("a.json", {{"grid", grid2(8, 0.25)}, {"fixture", {{"kind", "sawtooth"}}}, {"output", file("x")}});
  EXPECT_EQ(run({"gen", "--config", bad_kind}), kExitInput);
  auto off = config("b.json", {{"grid", grid2(8, 0.25)},
                               {"fixture", {{"kind", "heaviside_sheet"}, {"u", {1, 0}}, {"c", 5.0}}},
                               {"output", file("x")}});
  EXPECT_EQ(run({"gen", "--config", off}), kExitInput);
  auto typo = config("c.json", {{"grid", grid2(8, 0.25)}, {"fixture", {{"kind", "gaussian"}, {"widht", 1}}},
                                {"output", file("x")}});
  EXPECT_EQ(run({"gen", "--config", typo}), kExitInput);
  EXPECT_NE(err_.str().find("widht"), std::string::npos);
  std::ofstream(file("v.json")) << R"({"schema_version": 7})";
  EXPECT_EQ(run({"gen", "--config", file("v.json")}), kExitInput);
  EXPECT_EQ(run({"gen"}), kExitInput);
  EXPECT_EQ(run({"frobnicate"}), kExitInput);
}

TEST_F(Cli, RoundtripGaussian) {
  json base = {{"grid", grid2(64, 0.125)},
               {"fixture", {{"kind", "gaussian"}, {"center", {0.3, -0.2}}}},
               {"window", {{"kind", "gaussian"}, {"sigma", 1.0}}},
               {"frame", {{"u", {{1, 0}}}}},
               {"report", file("rep.json")}};
  ASSERT_EQ(run({"roundtrip", "--config", config("rt.json", base)}), kExitOk) << err_.str();
  json rep = read_json(file("rep.json"));
  EXPECT_LE(rep["rel_l2_error"].get<double>(), 1e-3);
  EXPECT_FALSE(rep.contains("timings"));
  EXPECT_TRUE(json::parse(out_.str()).contains("timings"));
  base["tolerance"] = 0.0;
  EXPECT_EQ(run({"roundtrip", "--config", config("rt0.json", base)}), kExitFail);
}

TEST_F(Cli, RoundtripZeroSignalUsesAbsoluteError) {
  json cfg = {{"grid", grid2(16, 0.25)},
              {"fixture", {{"kind", "zero"}}},
              {"window", {{"kind", "gaussian"}, {"sigma", 1.0}}},
              {"frame", {{"u", {{1, 1}}}}}};
  ASSERT_EQ(run({"roundtrip", "--config", config("z.json", cfg)}), kExitOk);
  json rep = json::parse(out_.str());
  EXPECT_EQ(rep["error_kind"], "absolute");
  EXPECT_LE(rep["rel_l2_error"].get<double>(), 1e-12);
}

TEST_F(Cli, RoundtripInadmissiblePair) {
  json b = {{"kind", "gevrey_bump"}, {"radius", 0.5}, {"alpha", 2.0}};
  json l = b, r = b;
  l["shift"] = -1.5;
  r["shift"] = 1.5;
  json cfg = {{"grid", {{"counts", {32}}, {"spacing", 0.125}}},
              {"fixture", {{"kind", "gaussian"}}},
              {"window", l},
              {"synthesis_window", r},
              {"frame", {{"u", {{1}}}}}};
  EXPECT_EQ(run({"roundtrip", "--config", config("p.json", cfg)}), kExitInput);
  EXPECT_FALSE(json::parse(err_.str())["pairing"]["admissible"].get<bool>());
}

TEST_F(Cli, AnalyzeSynthesizePipelineIsReproducible) {
  auto gen = config("gen.json", {{"grid", grid2(16, 0.25)},
                                 {"fixture", {{"kind", "gaussian"}, {"width", 0.8}}},
                                 {"output", file("g.dstf")}});
  ASSERT_EQ(run({"gen", "--config", gen}), kExitOk);
  json w = {{"kind", "gaussian"}, {"sigma", 1.0}};
  auto an = config("an.json", {{"signal", file("g.dstf")}, {"window", w}, {"frame", {{"u", {{1, 1}}}}},
                               {"output", file("g.field")}, {"csv", file("slice.csv")}});
  ASSERT_EQ(run({"analyze", "--config", an, "--threads", "1"}), kExitOk) << err_.str();
  fs::copy_file(file("g.field"), file("g1.field"));
  ASSERT_EQ(run({"analyze", "--config", an, "--threads", "3"}), kExitOk);
  std::ifstream a(file("g.field"), std::ios::binary), b(file("g1.field"), std::ios::binary);
  EXPECT_TRUE(std::equal(std::istreambuf_iterator<char>(a), {}, std::istreambuf_iterator<char>(b)));
  ASSERT_EQ(run({"analyze", "--config", an, "--oracle"}), kExitOk);
  auto sy = config("sy.json", {{"field", file("g.field")}, {"window", w}, {"synthesis_window", w},
                               {"output", file("rec.dstf")}});
  ASSERT_EQ(run({"synthesize", "--config", sy}), kExitOk) << err_.str();
  Signal f = io::read_signal(file("g.dstf")), rec = io::read_signal(file("rec.dstf"));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    num += std::norm(rec.values[i] - f.values[i]);
    den += std::norm(f.values[i]);
  }
  EXPECT_LE(std::sqrt(num / den), 1e-3);
  auto clash = config("c.json", {{"signal", file("g.dstf")}, {"window", w}, {"frame", {{"u", {{1, 1}}}}},
                                 {"output", file("g.dstf")}});
  EXPECT_EQ(run({"analyze", "--config", clash}), kExitInput);
}

TEST_F(Cli, WavefrontVerdicts) {
  json grid = grid2(128, 1.0 / 32);
  json scan = {{"window", {{"kind", "gevrey_bump"}, {"radius", 0.5}, {"alpha", 1.5}}},
               {"frame", {{"u", {{1, 0}}}}},
               {"alpha", 1.5},
               {"cones", {{"count", 16}, {"half_angle_deg", 15}}},
               {"cells", {{"centers", {{-0.75}, {0.0}, {0.75}}}, {"radius", 0.05}}}};
  struct Fx {
    std::string name;
    json fixture;
    std::size_t singular;
  };
  for (const auto& fx : {Fx{"h", {{"kind", "heaviside_sheet"}, {"u", {1, 0}}, {"c", 0}}, 2},
                         Fx{"g", {{"kind", "gaussian"}, {"width", 0.7}}, 0}}) {
    auto gen = config(fx.name + "_gen.json", {{"grid", grid}, {"fixture", fx.fixture}, {"output", file(fx.name)}});
    ASSERT_EQ(run({"gen", "--config", gen}), kExitOk);
    json cfg = scan;
    cfg["signal"] = file(fx.name);
    cfg["report"] = file(fx.name + ".report.json");
    cfg["csv"] = file(fx.name + ".csv");
    ASSERT_EQ(run({"wavefront", "--config", config(fx.name + "_wf.json", cfg), "--strict-window"}), kExitOk)
        << out_.str() << err_.str();
    json summary = json::parse(out_.str());
    EXPECT_EQ(summary["verdict"], "PASS");
    EXPECT_EQ(summary["singular"].get<std::size_t>(), fx.singular);
    EXPECT_EQ(read_json(file(fx.name + ".report.json"))["entries"].size(), 48u);
  }
}

TEST_F(Cli, WavefrontWarningsAndStrictWindow) {
  auto gen = config("gen.json", {{"grid", grid2(32, 0.125)},
                                 {"fixture", {{"kind", "plane_wave"}, {"xi0", {1, 0}}}},
                                 {"output", file("p")}});
  ASSERT_EQ(run({"gen", "--config", gen}), kExitOk);
  json cfg = {{"signal", file("p")},
              {"window", {{"kind", "gevrey_bump"}, {"radius", 0.5}, {"alpha", 1.5}}},
              {"frame", {{"u", {{1, 0}}}}},
              {"alpha", 1.5},
              {"cones", {{"count", 8}, {"half_angle_deg", 25}}},
              {"cells", {{"centers", {{0.0}}}, {"radius", 0.1}}},
              {"report", file("p.report.json")}};
  int code = run({"wavefront", "--config", config("wf.json", cfg)});
  EXPECT_NE(code, kExitInput);
  EXPECT_NE(err_.str().find("boundary"), std::string::npos);
  EXPECT_TRUE(fs::exists(file("p.report.json")));

  cfg["window"] = {{"kind", "gaussian"}, {"sigma", 1.0}};
  EXPECT_EQ(run({"wavefront", "--config", config("wf2.json", cfg), "--strict-window"}), kExitInput);
  cfg["cones"] = {{"count", 3}, {"half_angle_deg", 100}};
  EXPECT_EQ(run({"wavefront", "--config", config("wf3.json", cfg)}), kExitInput);
}

TEST_F(Cli, SelftestPaths) {
  EXPECT_EQ(run({"selftest"}), kExitOk) << out_.str();
  EXPECT_EQ(out_.str().find("FAIL"), std::string::npos);

  EXPECT_EQ(run({"selftest", "--inject-fault", "dft-scale"}), kExitFail);
  std::string table = out_.str();
  auto pos = table.find("parseval");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NE(table.substr(pos, 40).find("FAIL"), std::string::npos);

  auto cap0 = config("cap.json", {{"oracle_cap", 0}});
  EXPECT_EQ(run({"selftest", "--config", cap0}), kExitOk);
  EXPECT_NE(out_.str().find("SKIPPED"), std::string::npos);
  EXPECT_NE(err_.str().find("warning"), std::string::npos);
}
