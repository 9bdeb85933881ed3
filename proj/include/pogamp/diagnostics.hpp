#ifndef POGAMP_DIAGNOSTICS_HPP
#define POGAMP_DIAGNOSTICS_HPP

#include <vector>

namespace pogamp {

// Effective sample size by Geyer's initial monotone sequence of
// autocovariance pairs.
double effective_sample_size(const std::vector<double>& chain);

// Split-Rhat: each chain is halved, then the usual between/within ratio.
double split_rhat(const std::vector<std::vector<double>>& chains);

}  // namespace pogamp

#endif
