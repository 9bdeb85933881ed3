#ifndef POGAMP_IO_HPP
#define POGAMP_IO_HPP

#include <string>

#include "pogamp/mcmc.hpp"

namespace pogamp {

struct Dataset {
  LocationSet obs_locs;
  Vector y_o;
};

// CSV with exact header `x,y,value`, decimal-point reals, UTF-8. Errors carry
// line/row positions.
Dataset load_dataset(const std::string& path, const Domain& domain);

// 17 significant digits, round-trip safe for doubles
std::string format_double(double v);

void write_trace_csv(const std::string& path, const ChainOutput& chain);

struct TraceData {
  std::vector<std::string> param_names;
  Matrix draws;
  std::vector<long> n_trace;
};
TraceData read_trace_csv(const std::string& path);

void write_matrix_csv(const std::string& path, const std::vector<std::string>& header,
                      const Matrix& values);

}  // namespace pogamp

#endif
