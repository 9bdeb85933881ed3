#include "pogamp/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>

namespace pogamp {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (allowed.find(key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + context);
}

double get_num(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError("'" + key + "' must be a number");
  return obj[key].get<double>();
}

long get_int(const json& obj, const std::string& key, long fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return obj[key].get<long>();
}

bool get_bool(const json& obj, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean()) throw ConfigError("'" + key + "' must be a boolean");
  return obj[key].get<bool>();
}

std::string get_str(const json& obj, const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ConfigError("'" + key + "' must be a string");
  return obj[key].get<std::string>();
}

LocationSet parse_sites(const json& arr, const std::string& context) {
  if (!arr.is_array()) throw ConfigError(context + " must be an array of [x, y] pairs");
  LocationSet out;
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2)
      throw ConfigError(context + " entries must be [x, y] pairs");
    out.append(Site{pair[0].get<double>(), pair[1].get<double>()});
  }
  return out;
}

Domain parse_domain(const json& obj) {
  check_keys(obj, {"x_min", "x_max", "y_min", "y_max"}, "model.domain");
  Domain d;
  d.x_min = get_num(obj, "x_min", 0.0);
  d.x_max = get_num(obj, "x_max", 1.0);
  d.y_min = get_num(obj, "y_min", 0.0);
  d.y_max = get_num(obj, "y_max", 1.0);
  d.validate();
  return d;
}

CovKernel parse_kernel(const json& obj) {
  check_keys(obj, {"family", "sigma2", "phi", "tau2", "mean"}, "model.kernel");
  CovKernel k;
  k.family = kernel_family_from_string(get_str(obj, "family", "exponential"));
  k.sigma2 = get_num(obj, "sigma2", 1.0);
  k.phi = get_num(obj, "phi", 1.0);
  k.tau2 = get_num(obj, "tau2", 0.0);
  k.mean = get_num(obj, "mean", 0.0);
  k.validate();
  return k;
}

FDist parse_f(const json& obj, const CovKernel& base, bool* share_kernel) {
  check_keys(obj, {"family", "alpha", "nu", "match_moments", "share_kernel", "kernel"},
             "model.f");
  FDist f;
  f.family = ffamily_from_string(get_str(obj, "family", "skew_normal"));
  f.alpha = get_num(obj, "alpha", 0.0);
  f.nu = get_num(obj, "nu", 10.0);
  f.match_moments = get_bool(obj, "match_moments", true);
  *share_kernel = get_bool(obj, "share_kernel", true);
  if (*share_kernel) {
    if (obj.contains("kernel"))
      throw ConfigError("model.f.kernel conflicts with share_kernel=true");
    f.scale_kernel = base;
  } else {
    if (!obj.contains("kernel"))
      throw ConfigError("model.f needs its own kernel when share_kernel=false");
    f.scale_kernel = parse_kernel(obj["kernel"]);
  }
  f.validate_for_model();
  return f;
}

Intensity parse_intensity(const json& obj, const Domain& domain) {
  check_keys(obj, {"kind", "lambda", "form", "a", "b", "c", "x0", "y0", "w", "lambda_bar"},
             "model.intensity");
  Intensity in;
  const std::string kind = get_str(obj, "kind", "homogeneous");
  if (kind == "homogeneous") {
    in.kind = IntensityKind::homogeneous;
    in.lambda = get_num(obj, "lambda", 1.0);
  } else if (kind == "parametric") {
    in.kind = IntensityKind::parametric;
    const std::string form = get_str(obj, "form", "linear");
    if (form == "linear")
      in.form = IntensityForm::linear;
    else if (form == "gaussian_bump")
      in.form = IntensityForm::gaussian_bump;
    else
      throw ConfigError("unknown intensity form: " + form);
    in.a = get_num(obj, "a", 0.0);
    in.b = get_num(obj, "b", 0.0);
    in.c = get_num(obj, "c", 0.0);
    in.s0 = Site{get_num(obj, "x0", 0.0), get_num(obj, "y0", 0.0)};
    in.w = get_num(obj, "w", 1.0);
    in.lambda_bar = get_num(obj, "lambda_bar", 0.0);
    if (in.lambda_bar <= 0.0) in.lambda_bar = in.analytic_bound(domain);
  } else {
    throw ConfigError("unknown intensity kind: " + kind);
  }
  in.validate(domain);
  return in;
}

ParamPrior parse_param_prior(const json& obj, const std::string& context,
                             ParamPrior fallback) {
  if (obj.is_null()) return fallback;
  check_keys(obj, {"kind", "mu_log", "sd_log", "mu", "sd", "shape", "rate", "xi0", "zeta"},
             context);
  ParamPrior p = fallback;
  const std::string kind = get_str(obj, "kind", "lognormal");
  if (kind == "lognormal") {
    p.kind = ParamPrior::Kind::lognormal;
    p.lognormal.mu_log = get_num(obj, "mu_log", 0.0);
    p.lognormal.sd_log = get_num(obj, "sd_log", 1.0);
    if (!(p.lognormal.sd_log > 0.0)) throw ConfigError(context + ": sd_log must be > 0");
  } else if (kind == "normal") {
    p.kind = ParamPrior::Kind::normal;
    p.normal.mu = get_num(obj, "mu", 0.0);
    p.normal.sd = get_num(obj, "sd", 1.0);
    if (!(p.normal.sd > 0.0)) throw ConfigError(context + ": sd must be > 0");
  } else if (kind == "gamma") {
    p.kind = ParamPrior::Kind::gamma;
    p.gamma.shape = get_num(obj, "shape", 2.0);
    p.gamma.rate = get_num(obj, "rate", 1.0);
    if (!(p.gamma.shape > 0.0) || !(p.gamma.rate > 0.0))
      throw ConfigError(context + ": gamma prior needs positive shape and rate");
  } else if (kind == "pc") {
    p.kind = ParamPrior::Kind::pc;
    p.pc.xi0 = get_num(obj, "xi0", 0.0);
    p.pc.zeta = get_num(obj, "zeta", 1.0);
    if (!(p.pc.zeta > 0.0)) throw ConfigError(context + ": zeta must be > 0");
  } else {
    throw ConfigError(context + ": unknown prior kind " + kind);
  }
  return p;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, {"model", "mcmc", "predict", "simulate", "io"}, "config");
  if (!root.contains("model")) throw ConfigError("config needs a model section");

  RunConfig cfg;

  const json& model = root["model"];
  check_keys(model, {"domain", "kernel", "f", "intensity"}, "model");
  cfg.model.domain = model.contains("domain") ? parse_domain(model["domain"]) : Domain{};
  cfg.model.kernel = model.contains("kernel") ? parse_kernel(model["kernel"]) : CovKernel{};
  bool share = true;
  if (model.contains("f")) {
    cfg.model.f = parse_f(model["f"], cfg.model.kernel, &share);
  } else {
    cfg.model.f.scale_kernel = cfg.model.kernel;
  }
  cfg.model.intensity = model.contains("intensity")
                            ? parse_intensity(model["intensity"], cfg.model.domain)
                            : Intensity::homogeneous_rate(1.0);
  cfg.model.validate();

  if (root.contains("mcmc")) {
    const json& m = root["mcmc"];
    check_keys(m,
               {"iterations", "burn_in", "thin", "chains", "seed", "K", "M", "nngp", "mesh",
                "m", "sample", "priors", "debug_checks", "exact_inverses"},
               "mcmc");
    cfg.mcmc.iterations = get_int(m, "iterations", 4000);
    cfg.mcmc.burn_in = get_int(m, "burn_in", cfg.mcmc.iterations / 2);
    cfg.mcmc.thin = static_cast<int>(get_int(m, "thin", 1));
    cfg.chains = static_cast<int>(get_int(m, "chains", 1));
    cfg.seed = static_cast<std::uint64_t>(get_int(m, "seed", 1));
    cfg.mcmc.K = static_cast<int>(get_int(m, "K", 0));
    cfg.mcmc.M = static_cast<int>(get_int(m, "M", 500));
    cfg.nngp.enabled = get_bool(m, "nngp", false);
    cfg.nngp.mesh_resolution = static_cast<int>(get_int(m, "mesh", 20));
    cfg.nngp.m = static_cast<int>(get_int(m, "m", 15));
    cfg.mcmc.debug_checks = get_bool(m, "debug_checks", false);
    cfg.mcmc.exact_inverses = get_bool(m, "exact_inverses", false);
    if (cfg.chains < 1) throw ConfigError("chains must be >= 1");
    cfg.mcmc.validate();

    if (m.contains("sample")) {
      const json& s = m["sample"];
      check_keys(s, {"sigma2", "phi", "tau2", "alpha", "nu", "lambda", "theta_lambda"},
                 "mcmc.sample");
      cfg.flags.sigma2 = get_bool(s, "sigma2", true);
      cfg.flags.phi = get_bool(s, "phi", true);
      cfg.flags.tau2 = get_bool(s, "tau2", false);
      cfg.flags.alpha = get_bool(s, "alpha", false);
      cfg.flags.nu = get_bool(s, "nu", false);
      cfg.flags.lambda = get_bool(s, "lambda", true);
      cfg.flags.theta_lambda = get_bool(s, "theta_lambda", false);
    }

    ParamPrior ln_default;  // lognormal(0, 1)
    ParamPrior alpha_default;
    alpha_default.kind = ParamPrior::Kind::normal;
    alpha_default.normal = NormalPrior{0.0, 3.0};
    cfg.priors.sigma2 = ln_default;
    cfg.priors.phi = ln_default;
    cfg.priors.tau2 = ln_default;
    cfg.priors.alpha = alpha_default;
    cfg.priors.nu = ln_default;
    cfg.priors.theta_lambda = ln_default;
    if (m.contains("priors")) {
      const json& p = m["priors"];
      check_keys(p, {"lambda", "sigma2", "phi", "tau2", "alpha", "nu", "theta_lambda"},
                 "mcmc.priors");
      if (p.contains("lambda")) {
        check_keys(p["lambda"], {"shape", "rate"}, "mcmc.priors.lambda");
        cfg.priors.lambda_prior.shape = get_num(p["lambda"], "shape", 2.0);
        cfg.priors.lambda_prior.rate = get_num(p["lambda"], "rate", 1.0);
        if (!(cfg.priors.lambda_prior.shape > 0.0) || !(cfg.priors.lambda_prior.rate > 0.0))
          throw ConfigError("lambda prior needs positive shape and rate");
      }
      const auto grab = [&](const char* key, ParamPrior fallback) {
        return p.contains(key)
                   ? parse_param_prior(p[key], std::string("mcmc.priors.") + key, fallback)
                   : fallback;
      };
      cfg.priors.sigma2 = grab("sigma2", cfg.priors.sigma2);
      cfg.priors.phi = grab("phi", cfg.priors.phi);
      cfg.priors.tau2 = grab("tau2", cfg.priors.tau2);
      cfg.priors.alpha = grab("alpha", cfg.priors.alpha);
      cfg.priors.nu = grab("nu", cfg.priors.nu);
      cfg.priors.theta_lambda = grab("theta_lambda", cfg.priors.theta_lambda);
    }
  }

  if (root.contains("predict")) {
    cfg.has_predict = true;
    const json& p = root["predict"];
    check_keys(p, {"kind", "sites", "integrand", "threshold", "strata", "points_per_draw"},
               "predict");
    const std::string kind = get_str(p, "kind", "sites");
    if (kind == "sites") {
      cfg.predict.kind = PredictiveRequest::Kind::sites;
      if (!p.contains("sites")) throw ConfigError("predict.sites is required");
      cfg.predict.sites = parse_sites(p["sites"], "predict.sites");
      for (const Site& s : cfg.predict.sites.sites)
        if (!cfg.model.domain.contains(s))
          throw ConfigError("predict site outside the model domain");
    } else if (kind == "integral") {
      cfg.predict.kind = PredictiveRequest::Kind::integral;
      cfg.predict.g = integrand_from_string(get_str(p, "integrand", "identity"));
      cfg.predict.threshold = get_num(p, "threshold", 0.0);
      cfg.predict.strata = static_cast<int>(get_int(p, "strata", 1));
      cfg.predict.points_per_draw = static_cast<int>(get_int(p, "points_per_draw", 1));
    } else {
      throw ConfigError("unknown predict kind: " + kind);
    }
  }

  if (root.contains("simulate")) {
    const json& s = root["simulate"];
    check_keys(s, {"replicates", "sites", "grid", "lambdas"}, "simulate");
    cfg.simulate.replicates = get_int(s, "replicates", 10000);
    if (cfg.simulate.replicates < 1) throw ConfigError("simulate.replicates must be >= 1");
    if (s.contains("sites")) cfg.simulate.sites = parse_sites(s["sites"], "simulate.sites");
    if (s.contains("grid")) {
      check_keys(s["grid"], {"lo", "hi", "points"}, "simulate.grid");
      cfg.simulate.grid_lo = get_num(s["grid"], "lo", -6.0);
      cfg.simulate.grid_hi = get_num(s["grid"], "hi", 6.0);
      cfg.simulate.grid_points = static_cast<int>(get_int(s["grid"], "points", 401));
      if (cfg.simulate.grid_points < 2 || !(cfg.simulate.grid_hi > cfg.simulate.grid_lo))
        throw ConfigError("simulate.grid is degenerate");
    }
    if (s.contains("lambdas")) {
      if (!s["lambdas"].is_array()) throw ConfigError("simulate.lambdas must be an array");
      for (const auto& v : s["lambdas"]) cfg.simulate.lambdas.push_back(v.get<double>());
    }
  }
  if (cfg.simulate.sites.empty()) cfg.simulate.sites.append(cfg.model.domain.centroid());

  if (root.contains("io")) {
    const json& io = root["io"];
    check_keys(io, {"dataset", "output_dir", "prefix"}, "io");
    cfg.io.dataset = get_str(io, "dataset", "");
    cfg.io.output_dir = get_str(io, "output_dir", ".");
    cfg.io.prefix = get_str(io, "prefix", "pogamp");
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

}  // namespace pogamp
