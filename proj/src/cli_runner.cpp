#include "pogamp/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "pogamp/config.hpp"
#include "pogamp/diagnostics.hpp"
#include "pogamp/io.hpp"
#include "pogamp/parallel.hpp"
#include "pogamp/stats.hpp"

namespace pogamp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string out_path(const IoConfig& io, const std::string& suffix) {
  return (fs::path(io.output_dir) / (io.prefix + suffix)).string();
}

std::vector<ChainOutput> run_chains(const RunConfig& cfg, const Dataset& data,
                                    int threads) {
  std::vector<ChainOutput> chains(static_cast<std::size_t>(cfg.chains));
  run_replicates(
      cfg.chains,
      [&](long c) {
        Rng rng(splitmix64(cfg.seed) ^ static_cast<std::uint64_t>(c));
        chains[static_cast<std::size_t>(c)] =
            run_gibbs(rng, data.obs_locs, data.y_o, cfg.model, cfg.priors, cfg.flags,
                      cfg.mcmc);
      },
      threads);
  return chains;
}

json rates_to_json(const BlockRates& r) {
  const auto one = [](const AcceptCounter& c) {
    return json{{"accepted", c.accepted}, {"proposed", c.proposed}, {"rate", c.rate()}};
  };
  return json{{"y_n", one(r.y_n)},     {"n_block", one(r.n_block)},
              {"sigma2", one(r.sigma2)}, {"phi", one(r.phi)},
              {"tau2", one(r.tau2)},   {"alpha", one(r.alpha)},
              {"nu", one(r.nu)},       {"theta_lambda", one(r.theta_lambda)}};
}

int cmd_fit(const RunConfig& cfg, int threads) {
  if (cfg.io.dataset.empty()) throw ConfigError("fit needs io.dataset");
  const Dataset data = load_dataset(cfg.io.dataset, cfg.model.domain);
  const std::vector<ChainOutput> chains = run_chains(cfg, data, threads);

  json diag;
  diag["chains"] = cfg.chains;
  diag["seed"] = cfg.seed;
  diag["K"] = chains.front().K;
  diag["M"] = chains.front().M;
  diag["iterations"] = chains.front().iterations;
  diag["burn_in"] = chains.front().burn_in;
  diag["thin"] = chains.front().thin;

  json per_chain = json::array();
  for (std::size_t c = 0; c < chains.size(); ++c) {
    write_trace_csv(out_path(cfg.io, "_chain" + std::to_string(c) + ".csv"), chains[c]);
    json entry;
    entry["acceptance"] = rates_to_json(chains[c].rates);
    json mean_n = 0.0;
    if (!chains[c].n_trace.empty()) {
      double acc = 0.0;
      for (long v : chains[c].n_trace) acc += static_cast<double>(v);
      mean_n = acc / static_cast<double>(chains[c].n_trace.size());
    }
    entry["mean_n_events"] = mean_n;
    per_chain.push_back(entry);
  }
  diag["per_chain"] = per_chain;

  json ess_json, rhat_json;
  const auto& names = chains.front().param_names;
  for (std::size_t p = 0; p < names.size(); ++p) {
    double ess_total = 0.0;
    std::vector<std::vector<double>> cols;
    for (const auto& ch : chains) {
      std::vector<double> col(static_cast<std::size_t>(ch.draws.rows()));
      for (Eigen::Index i = 0; i < ch.draws.rows(); ++i)
        col[static_cast<std::size_t>(i)] = ch.draws(i, static_cast<Eigen::Index>(p));
      ess_total += effective_sample_size(col);
      cols.push_back(std::move(col));
    }
    ess_json[names[p]] = ess_total;
    rhat_json[names[p]] = split_rhat(cols);
  }
  diag["ess"] = ess_json;
  diag["rhat"] = rhat_json;

  std::ofstream out(out_path(cfg.io, "_diagnostics.json"));
  out << diag.dump(2) << '\n';
  return 0;
}

int cmd_simulate(const RunConfig& cfg, int threads) {
  Rng rng(cfg.seed);
  const Matrix values =
      simulate_values(cfg.model, cfg.simulate.sites, cfg.simulate.replicates, rng, threads);

  std::vector<std::string> header;
  for (std::size_t s = 0; s < cfg.simulate.sites.size(); ++s)
    header.push_back("site_" + std::to_string(s));
  write_matrix_csv(out_path(cfg.io, "_draws.csv"), header, values);

  // density grid at the first site, one block per ladder value
  std::vector<double> lambdas = cfg.simulate.lambdas;
  if (lambdas.empty() && cfg.model.intensity.kind == IntensityKind::homogeneous)
    lambdas.push_back(cfg.model.intensity.lambda);

  const double mu = cfg.model.kernel.mean;
  const double sm = std::sqrt(cfg.model.kernel.marginal_var());
  const F1d f1 = f_marginal_1d(cfg.model.f, cfg.model.f.scale_kernel.mean,
                               cfg.model.f.scale_kernel.marginal_var());
  std::vector<double> grid(static_cast<std::size_t>(cfg.simulate.grid_points));
  for (int i = 0; i < cfg.simulate.grid_points; ++i)
    grid[static_cast<std::size_t>(i)] =
        cfg.simulate.grid_lo + (cfg.simulate.grid_hi - cfg.simulate.grid_lo) * i /
                                   (cfg.simulate.grid_points - 1);

  Matrix density(static_cast<Eigen::Index>(lambdas.size() * grid.size()), 5);
  Eigen::Index row = 0;
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    PogampModel m = cfg.model;
    m.intensity = Intensity::homogeneous_rate(lambdas[li]);
    Rng sub = rng.substream(1000 + li);
    LocationSet first;
    first.append(cfg.simulate.sites[0]);
    const Matrix draws = simulate_values(m, first, cfg.simulate.replicates, sub, threads);
    std::vector<double> x(static_cast<std::size_t>(draws.rows()));
    for (Eigen::Index i = 0; i < draws.rows(); ++i)
      x[static_cast<std::size_t>(i)] = draws(i, 0);
    const std::vector<double> kde = kde_gaussian(x, grid, silverman_bandwidth(x));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      density(row, 0) = lambdas[li];
      density(row, 1) = grid[g];
      density(row, 2) = kde[g];
      density(row, 3) = f1.pdf(grid[g]);
      density(row, 4) = norm_pdf((grid[g] - mu) / sm) / sm;
      ++row;
    }
  }
  write_matrix_csv(out_path(cfg.io, "_density.csv"),
                   {"lambda", "value", "empirical_density", "f_density", "gp_density"},
                   density);
  return 0;
}

int cmd_predict(const RunConfig& cfg, int threads) {
  if (!cfg.has_predict) throw ConfigError("predict needs a predict section");
  if (cfg.io.dataset.empty()) throw ConfigError("predict needs io.dataset");
  const Dataset data = load_dataset(cfg.io.dataset, cfg.model.domain);
  const std::vector<ChainOutput> chains = run_chains(cfg, data, threads);

  // pool retained states across chains
  ChainOutput pooled = chains.front();
  for (std::size_t c = 1; c < chains.size(); ++c)
    pooled.states.insert(pooled.states.end(), chains[c].states.begin(),
                         chains[c].states.end());

  Rng rng(splitmix64(cfg.seed) ^ 0xfeedULL);
  if (cfg.predict.kind == PredictiveRequest::Kind::sites) {
    const Matrix samples = predictive_samples(rng, pooled, data.obs_locs, data.y_o,
                                              cfg.model, cfg.predict.sites, cfg.nngp,
                                              threads);
    Matrix summary(static_cast<Eigen::Index>(cfg.predict.sites.size()), 7);
    for (std::size_t s = 0; s < cfg.predict.sites.size(); ++s) {
      std::vector<double> col(static_cast<std::size_t>(samples.rows()));
      for (Eigen::Index i = 0; i < samples.rows(); ++i)
        col[static_cast<std::size_t>(i)] = samples(i, static_cast<Eigen::Index>(s));
      const auto si = static_cast<Eigen::Index>(s);
      summary(si, 0) = cfg.predict.sites[s].x;
      summary(si, 1) = cfg.predict.sites[s].y;
      summary(si, 2) = mean(col);
      summary(si, 3) = sd(col);
      summary(si, 4) = quantile(col, 0.025);
      summary(si, 5) = quantile(col, 0.5);
      summary(si, 6) = quantile(col, 0.975);
    }
    write_matrix_csv(out_path(cfg.io, "_predict.csv"),
                     {"x", "y", "mean", "sd", "q025", "q50", "q975"}, summary);
  } else {
    const McEstimate est = functional_estimate(rng, pooled, data.obs_locs, data.y_o,
                                               cfg.model, cfg.predict, cfg.nngp, threads);
    Matrix summary(1, 3);
    summary(0, 0) = est.value;
    summary(0, 1) = est.se;
    summary(0, 2) = static_cast<double>(est.draws);
    write_matrix_csv(out_path(cfg.io, "_functional.csv"), {"estimate", "se", "draws"},
                     summary);
  }
  return 0;
}

int cmd_diagnose(const RunConfig& cfg) {
  json out;
  json ess_json, rhat_json;
  std::vector<TraceData> traces;
  for (int c = 0;; ++c) {
    const std::string path = out_path(cfg.io, "_chain" + std::to_string(c) + ".csv");
    if (!fs::exists(path)) break;
    traces.push_back(read_trace_csv(path));
  }
  if (traces.empty()) throw ConfigError("diagnose found no trace files");
  const auto& names = traces.front().param_names;
  for (std::size_t p = 0; p < names.size(); ++p) {
    double ess_total = 0.0;
    std::vector<std::vector<double>> cols;
    for (const auto& t : traces) {
      std::vector<double> col(static_cast<std::size_t>(t.draws.rows()));
      for (Eigen::Index i = 0; i < t.draws.rows(); ++i)
        col[static_cast<std::size_t>(i)] = t.draws(i, static_cast<Eigen::Index>(p));
      ess_total += effective_sample_size(col);
      cols.push_back(std::move(col));
    }
    ess_json[names[p]] = ess_total;
    rhat_json[names[p]] = split_rhat(cols);
  }
  out["chains"] = traces.size();
  out["ess"] = ess_json;
  out["rhat"] = rhat_json;
  std::ofstream f(out_path(cfg.io, "_ess.json"));
  f << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"POGAMP simulation, exact MCMC inference and prediction"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  int threads = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "path to the JSON run configuration")
        ->required();
    sub->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
      has_seed = true;
    });
    sub->add_option("--threads", threads, "worker pool cap (default: chains)");
  };

  CLI::App* sim = app.add_subcommand("simulate", "replicate draws and density grids");
  CLI::App* fit = app.add_subcommand("fit", "posterior sampling for a dataset");
  CLI::App* pred = app.add_subcommand("predict", "fit, then predictive summaries");
  CLI::App* diag = app.add_subcommand("diagnose", "ESS / R-hat from stored traces");
  int k_override = 0;
  fit->add_option("--K", k_override, "subregion count override (perfect square)");
  for (CLI::App* sub : {sim, fit, pred, diag}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return 2;
  }

  RunConfig cfg;
  try {
    cfg = parse_config_file(config_path);
    if (has_seed) cfg.seed = seed_override;
    if (k_override > 0) cfg.mcmc.K = k_override;
  } catch (const PogampError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  const int pool = threads > 0 ? threads : cfg.chains;

  try {
    if (sim->parsed()) return cmd_simulate(cfg, pool);
    if (fit->parsed()) return cmd_fit(cfg, pool);
    if (pred->parsed()) return cmd_predict(cfg, pool);
    if (diag->parsed()) return cmd_diagnose(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace pogamp
