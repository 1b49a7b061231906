#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "dstft/fixtures.hpp"
#include "dstft/io.hpp"

using namespace dstft;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "dstft_io_test";
  fs::create_directories(d);
  return d / name;
}

}  // namespace

TEST(Io, SignalRoundtripIsBitExact) {
  Grid g({-1.5, 0.25}, {0.125, 0.5}, {12, 5});
  Signal f = fixtures::random_bandlimited(g, 17, 3.0);
  auto p = tmp("s.dstf").string();
  io::write_signal(p, f);
  Signal r = io::read_signal(p);
  EXPECT_TRUE(r.grid.same_as(g, 0.0));
  EXPECT_EQ(r.values, f.values);
}

TEST(Io, FieldRoundtrip) {
  Grid g = Grid::centered({8, 8}, {0.25, 0.25});
  Window w = gevrey_bump(Grid::centered({8}, {0.25}), 0.7, 2.0);
  DirectionFrame fr = build_frame({{1.0, 1.0}});
  DstftField F = dstft_fast(fixtures::random_bandlimited(g, 2, 1.0), w, fr, default_y_grid(g, 1));
  auto p = tmp("f.dstf").string();
  io::write_field(p, F);
  DstftField R = io::read_field(p);
  EXPECT_EQ(R.values, F.values);
  EXPECT_TRUE(R.y_grid.same_as(F.y_grid, 0.0));
  EXPECT_TRUE(R.xi_grid.same_as(F.xi_grid, 0.0));
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(R.frame.u[0][j], F.frame.u[0][j], 1e-15);
  EXPECT_NEAR(R.frame.detC, F.frame.detC, 1e-15);
  EXPECT_EQ(R.window_meta, F.window_meta);
  EXPECT_EQ(R.source_origin, F.source_origin);
  EXPECT_TRUE(R.source_grid().same_as(g));
}

TEST(Io, CsvRoundtrip) {
  Grid g = Grid::centered({6, 4}, {0.5, 0.5});
  Signal f = fixtures::random_bandlimited(g, 5, 2.0);
  auto p = tmp("s.csv").string();
  io::write_signal_csv(p, f);
  Signal r = io::read_signal_csv(p, g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(r.values[i], f.values[i]);
}

TEST(Io, MagnitudeSliceShape) {
  Grid g = Grid::centered({8, 4}, {0.25, 0.25});
  Window w = gaussian_window(Grid::centered({8}, {0.25}), {1.0});
  DstftField F = dstft_fast(fixtures::gaussian(g, {0.0, 0.0}, 1.0), w, identity_frame(2, 1),
                            default_y_grid(g, 1));
  auto p = tmp("m.csv").string();
  io::write_magnitude_slice_csv(p, F, 3);
  std::ifstream in(p);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
  }
  EXPECT_EQ(rows, 8);
  EXPECT_THROW(io::write_magnitude_slice_csv(p, F, 8), InputError);
}

TEST(Io, RejectsCorruptFiles) {
  auto p = tmp("bad.dstf").string();
  {
    std::ofstream out(p, std::ios::binary);
    out << "NOPE1234";
  }
  EXPECT_THROW(io::read_signal(p), InputError);
  Grid g = Grid::centered({4}, {0.5});
  io::write_signal(p, fixtures::gaussian(g, {0.0}, 1.0));
  EXPECT_THROW(io::read_field(p), InputError);
  fs::resize_file(p, fs::file_size(p) - 8);
  EXPECT_THROW(io::read_signal(p), InputError);
  EXPECT_THROW(io::read_signal(tmp("missing.dstf").string()), InputError);
}
