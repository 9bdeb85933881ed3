#include "pogamp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pogamp/stats.hpp"

namespace pogamp {

double effective_sample_size(const std::vector<double>& chain) {
  const auto n = chain.size();
  if (n < 4) return static_cast<double>(n);
  const double m = mean(chain);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = chain[i] - m;
  const auto acov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += c[i] * c[i + lag];
    return acc / static_cast<double>(n);
  };
  const double c0 = acov(0);
  if (c0 <= 0.0) return static_cast<double>(n);

  double tau = 1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < n / 2; k += 2) {
    double pair = (acov(k) + acov(k + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);  // enforce monotone decrease
    tau += 2.0 * pair;
    prev_pair = pair;
  }
  return std::max(1.0, static_cast<double>(n) / tau);
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::vector<double>> halves;
  std::size_t min_len = std::numeric_limits<std::size_t>::max();
  for (const auto& ch : chains) min_len = std::min(min_len, ch.size());
  const std::size_t half = min_len / 2;
  if (half < 2) return std::numeric_limits<double>::quiet_NaN();
  for (const auto& ch : chains) {
    halves.emplace_back(ch.begin(), ch.begin() + static_cast<std::ptrdiff_t>(half));
    halves.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(half),
                        ch.begin() + static_cast<std::ptrdiff_t>(2 * half));
  }
  const double mct = static_cast<double>(halves.size());
  const double n = static_cast<double>(half);
  std::vector<double> means, vars;
  for (const auto& h : halves) {
    means.push_back(mean(h));
    vars.push_back(variance(h));
  }
  const double w = mean(vars);
  double b = 0.0;
  const double grand = mean(means);
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= n / (mct - 1.0);
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

}  // namespace pogamp
