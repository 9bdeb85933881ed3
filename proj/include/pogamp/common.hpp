#ifndef POGAMP_COMMON_HPP
#define POGAMP_COMMON_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace pogamp {

struct PogampError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : PogampError {
  using PogampError::PogampError;
};
struct InvalidPartition : PogampError {
  using PogampError::PogampError;
};
struct RotatedOutOfDomain : PogampError {
  using PogampError::PogampError;
};
struct UnsupportedFamily : PogampError {
  using PogampError::PogampError;
};
struct DegreesOfFreedomTooSmall : PogampError {
  using PogampError::PogampError;
};
struct UnboundedIntensity : PogampError {
  using PogampError::PogampError;
};
struct QuadratureFailure : PogampError {
  using PogampError::PogampError;
};
struct DerivativeDegenerate : PogampError {
  using PogampError::PogampError;
};
struct NotSymmetric : PogampError {
  using PogampError::PogampError;
};
struct DivergentChain : PogampError {
  using PogampError::PogampError;
};
struct ConfigError : PogampError {
  using PogampError::PogampError;
};

// Dataset / CSV errors carry their position so the CLI can report it.
struct ParseError : PogampError {
  long line;
  long column;
  ParseError(const std::string& msg, long line_, long column_)
      : PogampError(msg), line(line_), column(column_) {}
};
struct DuplicateLocation : PogampError {
  long row;
  DuplicateLocation(const std::string& msg, long row_) : PogampError(msg), row(row_) {}
};
struct OutOfDomain : PogampError {
  long row;
  OutOfDomain(const std::string& msg, long row_) : PogampError(msg), row(row_) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Random stream with cheap counter-based substreams. Replicated work gives
// substream i to replicate i, so results do not depend on how replicates are
// scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

  Rng substream(std::uint64_t index) const {
    return Rng(splitmix64(seed_ ^ splitmix64(index + 0x51ed2701a9b5d9ecULL)));
  }

  double uniform() { return unif_(gen_); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() { return normal_(gen_); }
  double gamma(double shape, double scale) {
    std::gamma_distribution<double> d(shape, scale);
    return d(gen_);
  }
  long poisson(double mean) {
    std::poisson_distribution<long> d(mean);
    return d(gen_);
  }
  // chi-square(nu) / nu, the scale mixing variable of the t families
  double scaled_chisq(double nu) { return gamma(0.5 * nu, 2.0 / nu); }

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pogamp

#endif
