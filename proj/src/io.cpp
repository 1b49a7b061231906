#include "dstft/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dstft::io {
namespace {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

constexpr char kMagic[4] = {'D', 'S', 'T', 'F'};
constexpr std::uint32_t kSignalVersion = 1;
constexpr std::uint32_t kFieldVersion = 2;
constexpr std::uint32_t kMaxDim = 16;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw InputError("cannot open " + path + " for writing");
    path_ = path;
  }
  template <class T>
  void put(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void finish() {
    out_.flush();
    if (!out_) throw InputError("write to " + path_ + " failed");
  }

 private:
  std::ofstream out_;
  std::string path_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary), path_(path) {
    if (!in_) throw InputError("cannot open " + path);
  }
  template <class T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw InputError(path_ + ": truncated file");
    return v;
  }
  void bytes(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (!in_) throw InputError(path_ + ": truncated file");
  }
  void expect_end() {
    in_.peek();
    if (!in_.eof()) throw InputError(path_ + ": trailing bytes after the payload");
  }
  const std::string& path() const { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
};

void put_grid(Writer& w, const Grid& g) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.dim()));
  for (std::size_t a = 0; a < g.dim(); ++a) {
    w.put<double>(g.origin()[a]);
    w.put<double>(g.spacing()[a]);
    w.put<std::uint64_t>(g.counts()[a]);
  }
}

Grid get_grid(Reader& r) {
  auto dim = r.get<std::uint32_t>();
  if (dim == 0 || dim > kMaxDim) throw InputError(r.path() + ": bad grid dimension " + std::to_string(dim));
  std::vector<double> o(dim), h(dim);
  std::vector<std::size_t> n(dim);
  for (std::uint32_t a = 0; a < dim; ++a) {
    o[a] = r.get<double>();
    h[a] = r.get<double>();
    n[a] = static_cast<std::size_t>(r.get<std::uint64_t>());
  }
  return Grid(o, h, n);
}

void put_values(Writer& w, const std::vector<cd>& v) {
  for (const cd& x : v) {
    w.put<double>(x.real());
    w.put<double>(x.imag());
  }
}

std::vector<cd> get_values(Reader& r, std::size_t n) {
  std::vector<cd> v(n);
  for (auto& x : v) {
    double re = r.get<double>();
    double im = r.get<double>();
    x = cd(re, im);
  }
  return v;
}

void header(Reader& r, std::uint32_t want) {
  char m[4];
  r.bytes(m, 4);
  if (std::memcmp(m, kMagic, 4) != 0) throw InputError(r.path() + ": not a DSTF file");
  auto v = r.get<std::uint32_t>();
  if (v != want)
    throw InputError(r.path() + ": format version " + std::to_string(v) + ", expected " +
                     std::to_string(want));
}

}  // namespace

void write_signal(const std::string& path, const Signal& f) {
  f.validate();
  Writer w(path);
  w.bytes(kMagic, 4);
  w.put<std::uint32_t>(kSignalVersion);
  put_grid(w, f.grid);
  put_values(w, f.values);
  w.finish();
}

Signal read_signal(const std::string& path) {
  Reader r(path);
  header(r, kSignalVersion);
  Grid g = get_grid(r);
  Signal s(g, get_values(r, g.size()));
  r.expect_end();
  s.validate();
  return s;
}

void write_field(const std::string& path, const DstftField& F) {
  Writer w(path);
  w.bytes(kMagic, 4);
  w.put<std::uint32_t>(kFieldVersion);
  put_grid(w, F.y_grid);
  put_grid(w, F.xi_grid);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(F.frame.n));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(F.frame.k));
  for (const auto& row : F.frame.u)
    for (double x : row) w.put<double>(x);
  for (double x : F.source_origin) w.put<double>(x);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(F.window_meta.size()));
  w.bytes(F.window_meta.data(), F.window_meta.size());
  put_values(w, F.values);
  w.finish();
}

DstftField read_field(const std::string& path) {
  Reader r(path);
  header(r, kFieldVersion);
  DstftField F;
  F.y_grid = get_grid(r);
  F.xi_grid = get_grid(r);
  auto n = r.get<std::uint32_t>();
  auto k = r.get<std::uint32_t>();
  if (n != F.xi_grid.dim() || k != F.y_grid.dim())
    throw InputError(path + ": frame block does not match the grid headers");
  Matrix u(k, std::vector<double>(n));
  for (auto& row : u)
    for (double& x : row) x = r.get<double>();
  F.frame = build_frame(u);
  F.source_origin.resize(n);
  for (double& x : F.source_origin) x = r.get<double>();
  auto len = r.get<std::uint32_t>();
  if (len > (1U << 20)) throw InputError(path + ": window description too long");
  F.window_meta.resize(len);
  r.bytes(F.window_meta.data(), len);
  F.values = get_values(r, F.y_grid.size() * F.xi_grid.size());
  r.expect_end();
  return F;
}

void write_signal_csv(const std::string& path, const Signal& f) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out.precision(17);
  std::vector<std::size_t> idx(f.grid.dim());
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    f.grid.unravel(i, idx);
    for (std::size_t a = 0; a < idx.size(); ++a) out << idx[a] << ",";
    out << f.values[i].real() << "," << f.values[i].imag() << "\n";
  }
  if (!out) throw InputError("write to " + path + " failed");
}

Signal read_signal_csv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  Signal s(grid);
  std::vector<bool> seen(grid.size(), false);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> idx(grid.dim());
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != grid.dim() + 2)
      throw InputError(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(grid.dim() + 2) + " fields");
    try {
      for (std::size_t a = 0; a < grid.dim(); ++a) {
        idx[a] = std::stoull(cells[a]);
        if (idx[a] >= grid.counts()[a]) throw InputError("index out of range");
      }
      std::size_t flat = grid.ravel(idx);
      s.values[flat] = cd(std::stod(cells[grid.dim()]), std::stod(cells[grid.dim() + 1]));
      seen[flat] = true;
    } catch (const std::exception& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw InputError(path + ": missing sample at flat index " + std::to_string(i));
  s.validate();
  return s;
}

void write_magnitude_slice_csv(const std::string& path, const DstftField& F, std::size_t y_index) {
  if (y_index >= F.y_grid.size()) throw InputError("heatmap: y index out of range");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot open " + path + " for writing");
  out.precision(12);
  auto s = F.slice(y_index);
  const Grid& xg = F.xi_grid;
  if (xg.dim() == 2) {
    std::size_t cols = xg.counts()[1];
    for (std::size_t r = 0; r < xg.counts()[0]; ++r) {
      for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << std::abs(s[r * cols + c]);
      out << "\n";
    }
  } else {
    std::vector<double> xi(xg.dim());
    for (std::size_t m = 0; m < xg.size(); ++m) {
      xg.point(m, xi);
      for (double x : xi) out << x << ",";
      out << std::abs(s[m]) << "\n";
    }
  }
  if (!out) throw InputError("write to " + path + " failed");
}

}  // namespace dstft::io
