#include "dstft/grid.hpp"

#include <cmath>
#include <sstream>

namespace dstft {

Grid::Grid(std::vector<double> origin, std::vector<double> spacing,
           std::vector<std::size_t> counts)
    : origin_(std::move(origin)), spacing_(std::move(spacing)), counts_(std::move(counts)) {
  if (counts_.empty()) throw InputError("grid: dimension must be positive");
  if (origin_.size() != counts_.size() || spacing_.size() != counts_.size())
    throw InputError("grid: origin, spacing and counts must have equal length");
  size_ = 1;
  for (std::size_t a = 0; a < counts_.size(); ++a) {
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      throw InputError("grid: spacing on axis " + std::to_string(a) + " must be positive");
    if (!std::isfinite(origin_[a]))
      throw InputError("grid: origin on axis " + std::to_string(a) + " is not finite");
    if (counts_[a] < 2)
      throw InputError("grid: count on axis " + std::to_string(a) + " must be at least 2");
    size_ *= counts_[a];
  }
}

Grid Grid::centered(std::vector<std::size_t> counts, std::vector<double> spacing) {
  std::vector<double> origin(counts.size());
  for (std::size_t a = 0; a < counts.size() && a < spacing.size(); ++a)
    origin[a] = -static_cast<double>(counts[a] / 2) * spacing[a];
  return Grid(std::move(origin), std::move(spacing), std::move(counts));
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (double h : spacing_) v *= h;
  return v;
}

void Grid::unravel(std::size_t flat, std::span<std::size_t> index) const {
  for (std::size_t a = counts_.size(); a-- > 0;) {
    index[a] = flat % counts_[a];
    flat /= counts_[a];
  }
}

std::size_t Grid::ravel(std::span<const std::size_t> index) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < counts_.size(); ++a) flat = flat * counts_[a] + index[a];
  return flat;
}

void Grid::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = counts_.size(); a-- > 0;) {
    out[a] = coord(a, flat % counts_[a]);
    flat /= counts_[a];
  }
}

std::vector<double> Grid::point(std::size_t flat) const {
  std::vector<double> p(dim());
  point(flat, p);
  return p;
}

Grid Grid::dual() const {
  std::vector<double> origin(dim()), spacing(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    spacing[a] = 1.0 / (static_cast<double>(counts_[a]) * spacing_[a]);
    origin[a] = -static_cast<double>(counts_[a] / 2) * spacing[a];
  }
  return Grid(std::move(origin), std::move(spacing), counts_);
}

Grid Grid::project(std::size_t k) const {
  if (k == 0 || k > dim()) throw InputError("grid: cannot project onto " + std::to_string(k) + " axes");
  return Grid({origin_.begin(), origin_.begin() + static_cast<std::ptrdiff_t>(k)},
              {spacing_.begin(), spacing_.begin() + static_cast<std::ptrdiff_t>(k)},
              {counts_.begin(), counts_.begin() + static_cast<std::ptrdiff_t>(k)});
}

bool Grid::same_as(const Grid& other, double rel_tol) const {
  if (counts_ != other.counts_) return false;
  for (std::size_t a = 0; a < dim(); ++a) {
    double h = spacing_[a];
    if (std::abs(spacing_[a] - other.spacing_[a]) > rel_tol * h) return false;
    if (std::abs(origin_[a] - other.origin_[a]) > rel_tol * h * static_cast<double>(counts_[a]))
      return false;
  }
  return true;
}

std::string Grid::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "grid[";
  for (std::size_t a = 0; a < dim(); ++a) {
    if (a) os << " x ";
    os << counts_[a] << "@" << spacing_[a] << " from " << origin_[a];
  }
  os << "]";
  return os.str();
}

}  // namespace dstft
