#include "pogamp/domain.hpp"

#include <cmath>

namespace pogamp {

std::vector<Domain> partition_domain(const Domain& d, int kx, int ky) {
  d.validate();
  if (kx < 1 || ky < 1) throw InvalidPartition("partition grid must be at least 1x1");
  std::vector<Domain> out;
  out.reserve(static_cast<std::size_t>(kx) * ky);
  const double dx = d.width() / kx;
  const double dy = d.height() / ky;
  for (int j = 0; j < ky; ++j) {
    for (int i = 0; i < kx; ++i) {
      Domain sub;
      sub.x_min = d.x_min + i * dx;
      sub.x_max = (i == kx - 1) ? d.x_max : d.x_min + (i + 1) * dx;
      sub.y_min = d.y_min + j * dy;
      sub.y_max = (j == ky - 1) ? d.y_max : d.y_min + (j + 1) * dy;
      out.push_back(sub);
    }
  }
  return out;
}

std::vector<Domain> partition_domain(const Domain& d, int K) {
  if (K < 1) throw InvalidPartition("K must be positive");
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(K))));
  if (k * k != K)
    throw InvalidPartition("K must be a perfect square (or supply a divisor pair)");
  return partition_domain(d, k, k);
}

int partition_index(const Domain& d, int kx, int ky, const Site& s) {
  const double fx = (s.x - d.x_min) / d.width();
  const double fy = (s.y - d.y_min) / d.height();
  int i = static_cast<int>(fx * kx);
  int j = static_cast<int>(fy * ky);
  if (i >= kx) i = kx - 1;
  if (j >= ky) j = ky - 1;
  if (i < 0) i = 0;
  if (j < 0) j = 0;
  return j * kx + i;
}

LocationSet rotate_locations(const LocationSet& locs, double angle, const Site& center,
                             const Domain* check) {
  if (!std::isfinite(angle)) throw ConfigError("rotation angle must be finite");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  LocationSet out;
  out.sites.reserve(locs.size());
  for (const Site& p : locs.sites) {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    Site r{center.x + c * dx - s * dy, center.y + s * dx + c * dy};
    if (check != nullptr && !check->contains(r, 1e-9))
      throw RotatedOutOfDomain("rotated site leaves the domain");
    out.sites.push_back(r);
  }
  return out;
}

}  // namespace pogamp
