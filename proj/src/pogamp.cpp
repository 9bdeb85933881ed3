#include "pogamp/pogamp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pogamp/parallel.hpp"
#include "pogamp/stats.hpp"

namespace pogamp {

namespace {

bool same_kernel(const CovKernel& a, const CovKernel& b) {
  return a.family == b.family && a.sigma2 == b.sigma2 && a.phi == b.phi &&
         a.tau2 == b.tau2 && a.mean == b.mean;
}

}  // namespace

void PogampModel::validate() const {
  domain.validate();
  kernel.validate();
  f.validate();
  intensity.validate(domain);
}

bool PogampModel::shared_scale() const { return same_kernel(kernel, f.scale_kernel); }

PogampDraw simulate(Rng& rng, const PogampModel& model, const LocationSet& s_r) {
  PogampDraw out;
  out.n = pp_sample(rng, model.intensity, model.domain);
  if (out.n.empty()) {
    out.y_n.resize(0);
    if (!s_r.empty()) {
      const GaussianConditional m = gp_marginal(s_r, model.kernel);
      out.y_r = mvn_sample(rng, m.mean, m.cov);
    }
    return out;
  }

  if (model.shared_scale()) {
    PreparedF pf(model.f, out.n.events,
                 cholesky(cov_matrix(model.kernel, out.n.events)));
    out.y_n = pf.sample(rng);
    if (!s_r.empty()) {
      const GaussianConditional c =
          gp_conditional(s_r, out.n.events, out.y_n, model.kernel, *pf.kernel_chol());
      out.y_r = mvn_sample(rng, c.mean, c.cov);
    }
  } else {
    PreparedF pf(model.f, out.n.events);
    out.y_n = pf.sample(rng);
    if (!s_r.empty()) {
      const SpdChol base = cholesky(cov_matrix(model.kernel, out.n.events));
      const GaussianConditional c =
          gp_conditional(s_r, out.n.events, out.y_n, model.kernel, base);
      out.y_r = mvn_sample(rng, c.mean, c.cov);
    }
  }
  return out;
}

double rn_weight(const PogampModel& model, const PointPattern& n, const Vector& y_n) {
  if (n.empty()) return 1.0;  // empty-product convention
  double logf, logg;
  if (model.shared_scale()) {
    PreparedF pf(model.f, n.events, cholesky(cov_matrix(model.kernel, n.events)));
    logf = pf.logdensity(y_n);
    logg = mvn_logdensity(y_n, Vector::Constant(y_n.size(), model.kernel.mean),
                          *pf.kernel_chol());
  } else {
    logf = fdist_logdensity(model.f, n.events, y_n);
    logg = mvn_logdensity(y_n, Vector::Constant(y_n.size(), model.kernel.mean),
                          cov_matrix(model.kernel, n.events));
  }
  return std::exp(logf - logg);
}

Matrix simulate_values(const PogampModel& model, const LocationSet& s_r, long replicates,
                       const Rng& rng, int threads) {
  Matrix out(replicates, static_cast<Eigen::Index>(s_r.size()));
  run_replicates(
      replicates,
      [&](long i) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(i));
        const PogampDraw d = simulate(sub, model, s_r);
        out.row(i) = d.y_r.transpose();
      },
      threads);
  return out;
}

namespace {

McEstimate reduce_mean_se(const std::vector<double>& values) {
  McEstimate e;
  e.draws = static_cast<long>(values.size());
  e.value = mean(values);
  e.se = std::sqrt(variance(values) / static_cast<double>(values.size()));
  return e;
}

}  // namespace

std::vector<McEstimate> fdd_density_mc_grid(const PogampModel& model,
                                            const LocationSet& s_r,
                                            const std::vector<Vector>& ys, long mc_draws,
                                            const Rng& rng, int threads) {
  if (mc_draws < 1000) throw ConfigError("fdd_density_mc needs at least 1e3 draws");
  const auto g = static_cast<Eigen::Index>(ys.size());
  constexpr long kBlock = 128;
  const long nblocks = (mc_draws + kBlock - 1) / kBlock;
  Matrix block_sum = Matrix::Zero(nblocks, g);
  Matrix block_sum2 = Matrix::Zero(nblocks, g);

  run_replicates(
      nblocks,
      [&](long blk) {
        const long lo = blk * kBlock;
        const long hi = std::min(mc_draws, lo + kBlock);
        for (long r = lo; r < hi; ++r) {
          Rng sub = rng.substream(static_cast<std::uint64_t>(r));
          const PointPattern n = pp_sample(sub, model.intensity, model.domain);
          GaussianConditional cond;
          if (n.empty()) {
            cond = gp_marginal(s_r, model.kernel);
          } else if (model.shared_scale()) {
            PreparedF pf(model.f, n.events,
                         cholesky(cov_matrix(model.kernel, n.events)));
            const Vector y_n = pf.sample(sub);
            cond = gp_conditional(s_r, n.events, y_n, model.kernel, *pf.kernel_chol());
          } else {
            PreparedF pf(model.f, n.events);
            const Vector y_n = pf.sample(sub);
            cond = gp_conditional(s_r, n.events, y_n, model.kernel,
                                  cholesky(cov_matrix(model.kernel, n.events)));
          }
          const SpdChol cc = cholesky(cond.cov);
          for (Eigen::Index j = 0; j < g; ++j) {
            const double v = std::exp(mvn_logdensity(ys[static_cast<std::size_t>(j)],
                                                     cond.mean, cc));
            block_sum(blk, j) += v;
            block_sum2(blk, j) += v * v;
          }
        }
      },
      threads);

  std::vector<McEstimate> out(static_cast<std::size_t>(g));
  const double n = static_cast<double>(mc_draws);
  for (Eigen::Index j = 0; j < g; ++j) {
    const double s1 = block_sum.col(j).sum();
    const double s2 = block_sum2.col(j).sum();
    const double m = s1 / n;
    const double var = std::max(0.0, (s2 - n * m * m) / (n - 1.0));
    out[static_cast<std::size_t>(j)] = {m, std::sqrt(var / n), mc_draws};
  }
  return out;
}

McEstimate fdd_density_mc(const PogampModel& model, const LocationSet& s_r,
                          const Vector& y, long mc_draws, const Rng& rng, int threads) {
  return fdd_density_mc_grid(model, s_r, {y}, mc_draws, rng, threads).front();
}

McEstimate kld_mc(const PogampModel& model, long mc_draws, const Rng& rng, int threads) {
  if (mc_draws < 1000) throw ConfigError("kld_mc needs at least 1e3 draws");
  std::vector<double> terms(static_cast<std::size_t>(mc_draws), 0.0);
  run_replicates(
      mc_draws,
      [&](long i) {
        Rng sub = rng.substream(static_cast<std::uint64_t>(i));
        const PointPattern n = pp_sample(sub, model.intensity, model.domain);
        if (n.empty()) return;  // log(f0/g0) = 0
        double logf, logg;
        Vector y;
        if (model.shared_scale()) {
          PreparedF pf(model.f, n.events, cholesky(cov_matrix(model.kernel, n.events)));
          y = pf.sample(sub);
          logf = pf.logdensity(y);
          logg = mvn_logdensity(y, Vector::Constant(y.size(), model.kernel.mean),
                                *pf.kernel_chol());
        } else {
          PreparedF pf(model.f, n.events);
          y = pf.sample(sub);
          logf = pf.logdensity(y);
          logg = mvn_logdensity(y, Vector::Constant(y.size(), model.kernel.mean),
                                cov_matrix(model.kernel, n.events));
        }
        terms[static_cast<std::size_t>(i)] = logf - logg;
      },
      threads);
  return reduce_mean_se(terms);
}

McEstimate empirical_cov(const PogampModel& model, const Site& s1, const Site& s2,
                         long replicates, const Rng& rng, int threads) {
  if (replicates < 10000) throw ConfigError("empirical_cov needs at least 1e4 replicates");
  const bool same = same_site(s1, s2);
  LocationSet s_r;
  s_r.append(s1);
  if (!same) s_r.append(s2);
  const Matrix values = simulate_values(model, s_r, replicates, rng, threads);

  std::vector<double> x(static_cast<std::size_t>(replicates)),
      y(static_cast<std::size_t>(replicates));
  for (long i = 0; i < replicates; ++i) {
    x[static_cast<std::size_t>(i)] = values(i, 0);
    y[static_cast<std::size_t>(i)] = same ? values(i, 0) : values(i, 1);
  }
  const double mx = mean(x), my = mean(y);
  std::vector<double> prod(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx) * (y[i] - my);
  McEstimate e;
  e.draws = replicates;
  e.value = std::accumulate(prod.begin(), prod.end(), 0.0) /
            static_cast<double>(replicates - 1);
  e.se = std::sqrt(variance(prod) / static_cast<double>(replicates));
  return e;
}

double SymmetryReport::min_p_value() const {
  double p = vector_sum.p_value;
  for (const auto& c : per_coordinate) p = std::min(p, c.p_value);
  return p;
}

namespace {

bool maps_onto(const LocationSet& rotated, const LocationSet& target, double tol) {
  if (rotated.size() != target.size()) return false;
  for (std::size_t i = 0; i < rotated.size(); ++i)
    if (distance(rotated[i], target[i]) > tol) return false;
  return true;
}

}  // namespace

SymmetryReport symmetry_check(const PogampModel& model, const LocationSet& set_a,
                              const LocationSet& set_b, long replicates, const Rng& rng,
                              int threads) {
  if (set_a.size() != set_b.size() || set_a.empty())
    throw NotSymmetric("location sets must be non-empty and of equal size");
  const Site center = model.domain.centroid();

  bool identical = maps_onto(set_a, set_b, 1e-12);
  double angle = 0.0;
  if (!identical) {
    std::vector<double> candidates;
    const bool square = std::abs(model.domain.width() - model.domain.height()) < 1e-12;
    if (square)
      candidates = {M_PI_2, M_PI, 3.0 * M_PI_2};
    else
      candidates = {M_PI};
    bool found = false;
    for (double cand : candidates) {
      const LocationSet rotated = rotate_locations(set_a, cand, center);
      if (maps_onto(rotated, set_b, 1e-9)) {
        angle = cand;
        found = true;
        break;
      }
    }
    if (!found)
      throw NotSymmetric("no domain rotation maps set_a onto set_b within 1e-9");
  }

  const auto r = static_cast<Eigen::Index>(set_a.size());
  const Matrix a_vals = simulate_values(model, set_a, replicates, rng, threads);
  Matrix b_vals;
  if (identical) {
    b_vals = a_vals;  // same draws: the statistic is exactly zero
  } else {
    Rng shifted = rng.substream(0x9d2c5680u);
    b_vals = simulate_values(model, set_b, replicates, shifted, threads);
  }

  SymmetryReport report;
  report.angle = angle;
  report.per_coordinate.resize(static_cast<std::size_t>(r));
  std::vector<double> sum_a(static_cast<std::size_t>(replicates), 0.0);
  std::vector<double> sum_b(static_cast<std::size_t>(replicates), 0.0);
  for (Eigen::Index j = 0; j < r; ++j) {
    std::vector<double> xa(static_cast<std::size_t>(replicates)),
        xb(static_cast<std::size_t>(replicates));
    for (long i = 0; i < replicates; ++i) {
      xa[static_cast<std::size_t>(i)] = a_vals(i, j);
      xb[static_cast<std::size_t>(i)] = b_vals(i, j);
      sum_a[static_cast<std::size_t>(i)] += a_vals(i, j);
      sum_b[static_cast<std::size_t>(i)] += b_vals(i, j);
    }
    const KsResult ks = ks_2sample(xa, xb);
    report.per_coordinate[static_cast<std::size_t>(j)] = {ks.statistic, ks.p_value};
  }
  const KsResult ks = ks_2sample(sum_a, sum_b);
  report.vector_sum = {ks.statistic, ks.p_value};
  return report;
}

std::vector<LadderPoint> convergence_ladder(const PogampModel& model_template,
                                            const std::vector<double>& lambdas,
                                            const Site& s_r, long replicates, const Rng& rng,
                                            int threads) {
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1]))
      throw ConfigError("lambda ladder must be strictly increasing");

  const double mu = model_template.kernel.mean;
  const double sm = std::sqrt(model_template.kernel.marginal_var());
  const F1d marginal = f_marginal_1d(model_template.f, model_template.f.scale_kernel.mean,
                                     model_template.f.scale_kernel.marginal_var());
  const GridCdf f_cdf = grid_cdf_from_logpdf(
      [&](double x) { return marginal.logpdf(x); }, mu - 40.0 * sm, mu + 40.0 * sm, 16001);

  LocationSet target;
  target.append(s_r);

  std::vector<LadderPoint> out;
  out.reserve(lambdas.size());
  std::uint64_t stream_shift = 1;
  for (double lam : lambdas) {
    PogampModel m = model_template;
    m.intensity = Intensity::homogeneous_rate(lam);
    Rng sub = rng.substream(stream_shift++);
    const Matrix vals = simulate_values(m, target, replicates, sub, threads);
    std::vector<double> x(static_cast<std::size_t>(replicates));
    for (long i = 0; i < replicates; ++i) x[static_cast<std::size_t>(i)] = vals(i, 0);
    LadderPoint pt;
    pt.lambda = lam;
    pt.ks_to_f = ks_1sample(x, [&](double v) { return f_cdf(v); }).statistic;
    pt.ks_to_gp = ks_1sample(x, [&](double v) { return norm_cdf((v - mu) / sm); }).statistic;
    out.push_back(pt);
  }
  return out;
}

double GridCdf::operator()(double v) const {
  if (v <= x.front()) return 0.0;
  if (v >= x.back()) return 1.0;
  const auto it = std::upper_bound(x.begin(), x.end(), v);
  const auto hi = static_cast<std::size_t>(it - x.begin());
  const std::size_t lo = hi - 1;
  const double t = (v - x[lo]) / (x[hi] - x[lo]);
  return cdf[lo] + t * (cdf[hi] - cdf[lo]);
}

GridCdf grid_cdf_from_logpdf(const std::function<double(double)>& logpdf, double lo,
                             double hi, int points) {
  GridCdf out;
  out.x.resize(static_cast<std::size_t>(points));
  out.cdf.resize(static_cast<std::size_t>(points));
  const double h = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> pdf(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out.x[static_cast<std::size_t>(i)] = lo + h * i;
    pdf[static_cast<std::size_t>(i)] = std::exp(logpdf(lo + h * i));
  }
  double acc = 0.0;
  out.cdf[0] = 0.0;
  for (int i = 1; i < points; ++i) {
    acc += 0.5 * h * (pdf[static_cast<std::size_t>(i - 1)] + pdf[static_cast<std::size_t>(i)]);
    out.cdf[static_cast<std::size_t>(i)] = acc;
  }
  for (double& v : out.cdf) v /= acc;  // normalize away truncation mass
  return out;
}

}  // namespace pogamp
