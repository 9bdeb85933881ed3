#ifndef POGAMP_DOMAIN_HPP
#define POGAMP_DOMAIN_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "pogamp/common.hpp"

namespace pogamp {

struct Site {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Site& a, const Site& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline bool same_site(const Site& a, const Site& b) { return a.x == b.x && a.y == b.y; }

// Compact axis-aligned rectangle S.
struct Domain {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;

  void validate() const {
    if (!(x_max > x_min) || !(y_max > y_min))
      throw ConfigError("domain must have positive extent");
  }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Site centroid() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  bool contains(const Site& s, double tol = 0.0) const {
    return s.x >= x_min - tol && s.x <= x_max + tol && s.y >= y_min - tol &&
           s.y <= y_max + tol;
  }
  static Domain unit_square() { return Domain{0.0, 1.0, 0.0, 1.0}; }
  static Domain square(double side) { return Domain{0.0, side, 0.0, side}; }
};

// Ordered finite collection of sites.
struct LocationSet {
  std::vector<Site> sites;

  LocationSet() = default;
  explicit LocationSet(std::vector<Site> s) : sites(std::move(s)) {}

  std::size_t size() const { return sites.size(); }
  bool empty() const { return sites.empty(); }
  const Site& operator[](std::size_t i) const { return sites[i]; }
  Site& operator[](std::size_t i) { return sites[i]; }
  void append(const Site& s) { sites.push_back(s); }

  LocationSet subset(const std::vector<int>& idx) const {
    LocationSet out;
    out.sites.reserve(idx.size());
    for (int i : idx) out.sites.push_back(sites[static_cast<std::size_t>(i)]);
    return out;
  }
  // new locations first, as the inverse update expects
  static LocationSet concat(const LocationSet& first, const LocationSet& second) {
    LocationSet out = first;
    out.sites.insert(out.sites.end(), second.sites.begin(), second.sites.end());
    return out;
  }
  bool has_duplicates() const {
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = i + 1; j < sites.size(); ++j)
        if (same_site(sites[i], sites[j])) return true;
    return false;
  }
};

// Tiles S into K equal sub-rectangles. K must be a perfect square unless an
// explicit kx*ky grid is given.
std::vector<Domain> partition_domain(const Domain& d, int K);
std::vector<Domain> partition_domain(const Domain& d, int kx, int ky);

// Index of the tile containing s under the half-open convention used by the
// partition (upper boundary rows/columns belong to the last tile).
int partition_index(const Domain& d, int kx, int ky, const Site& s);

// Rotates every site about `center`. Pairwise distances are preserved. If
// `check` is given, throws RotatedOutOfDomain when a rotated site leaves it.
LocationSet rotate_locations(const LocationSet& locs, double angle, const Site& center,
                             const Domain* check = nullptr);

}  // namespace pogamp

#endif
