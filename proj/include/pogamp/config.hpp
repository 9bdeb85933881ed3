#ifndef POGAMP_CONFIG_HPP
#define POGAMP_CONFIG_HPP

#include <string>

#include "pogamp/predict.hpp"

namespace pogamp {

struct SimulateConfig {
  long replicates = 10000;
  LocationSet sites;      // empty means the domain centroid
  double grid_lo = -6.0;  // density-grid output range (values)
  double grid_hi = 6.0;
  int grid_points = 401;
  std::vector<double> lambdas;  // optional ladder; empty -> single model lambda
};

struct IoConfig {
  std::string dataset;
  std::string output_dir = ".";
  std::string prefix = "pogamp";
};

// Parsed, schema-validated run configuration. Unknown keys are rejected.
struct RunConfig {
  PogampModel model;
  PriorSpec priors;
  SampleFlags flags;
  McmcConfig mcmc;
  int chains = 1;
  std::uint64_t seed = 1;
  NngpSettings nngp;
  PredictiveRequest predict;
  bool has_predict = false;
  SimulateConfig simulate;
  IoConfig io;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace pogamp

#endif
