// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "singprod/clt.hpp"
#include "singprod/distributions.hpp"
#include "singprod/estimators.hpp"
#include "singprod/hill.hpp"
#include "singprod/parallel.hpp"
#include "singprod/quadrature.hpp"
#include "singprod/random.hpp"
#include "singprod/serialize.hpp"
#include "singprod/version.hpp"

namespace singprod::cli {

using nlohmann::json;

namespace {

constexpr const char* kFooter = R"(Distribution flags (override the config file):
  --dist binary       --a A --b B --p P
  --dist uniform      --lo LO --hi HI          (LO <= 0 < HI)
  --dist exponential  --rate R [--sign -1]
  --dist laplace      --scale S
  --dist atoms        --atoms a1,a2,... --weights w1,w2,...
  (--atoms without --dist implies atoms)

Config file (--config FILE, JSON); every key is optional and flags win:
  {
    "distribution": {"kind": "binary", "a": 1, "b": 2, "p": 0.5},
    "n": 1000000, "reps": 1000, "seed": 42, "threads": 4,
    "format": "json" | "csv", "out": "report.json",
    "method": "block" | "direct",                 (estimate-lambda)
    "abs_tol": 1e-10, "rel_tol": 1e-10, "max_subdivisions": 4000,
    "lambda_source": "closed_form" | "estimate",  (clt-test)
    "degeneracy_tol": 1e-9,                       (classify)
    "hill": {"h": {"lo": 50, "hi": 100} | {"const": 10},
             "g": {"lo": 0.5, "hi": 2}  | {"const": 1}}
  }
  Distribution objects follow the same field names as the flags:
  binary{a,b,p} uniform{lo,hi} exponential{rate,sign} laplace{scale}
  atoms{atoms,weights}.

Reports are JSON on stdout (or --out) and embed the effective config, the
seed, the RNG algorithm and the version. CSV (--format csv) is available for
clt-test (one row per sample) and cancellation (one row per replication).
A saved JSON report is itself a valid --config and reproduces the run.

Exit codes:
  0  success
  1  internal error
  2  config error (bad flags, malformed config, unsupported option)
  3  validation error (ZeroAtom, CancellingAtoms, BadWeights, BadSupport,
     UnsupportedScale, ZeroEntry, ZeroParam, MissingLambda, ZeroVariance)
  4  quadrature nonconvergence
  5  degenerate-sample redraw cap exhausted
Errors are printed to stderr as {"error": CODE, "message": ..., "exit_code": N}.)";

struct Options {
  std::string config_path;
  std::optional<std::string> dist;
  std::optional<double> a, b, p, lo, hi, rate, scale;
  std::optional<int> sign;
  std::vector<double> atoms, weights;
  std::optional<std::uint64_t> n, reps, seed, max_subdivisions;
  std::optional<unsigned> threads;
  std::optional<std::string> format, out, method, lambda_source;
  std::optional<double> abs_tol, rel_tol, degeneracy_tol;
  std::optional<double> h_const, h_lo, h_hi, g_const, g_lo, g_hi;
};

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::ConfigError, msg);
}

void add_common(CLI::App& sub, Options& o) {
  sub.add_option("--config", o.config_path, "JSON config file");
  sub.add_option("--dist", o.dist, "binary|uniform|exponential|laplace|atoms");
  sub.add_option("--a", o.a, "binary atom a");
  sub.add_option("--b", o.b, "binary atom b");
  sub.add_option("--p", o.p, "binary P(x = a)");
  sub.add_option("--lo", o.lo, "uniform lower end (<= 0)");
  sub.add_option("--hi", o.hi, "uniform upper end (> 0)");
  sub.add_option("--rate", o.rate, "exponential rate");
  sub.add_option("--sign", o.sign, "exponential orientation (+1 or -1)");
  sub.add_option("--scale", o.scale, "laplace scale");
  sub.add_option("--atoms", o.atoms, "comma-separated atoms")->delimiter(',');
  sub.add_option("--weights", o.weights, "comma-separated weights")->delimiter(',');
  sub.add_option("--seed", o.seed, "64-bit seed (random and echoed when absent)");
  sub.add_option("--threads", o.threads, "worker threads (0 = machine parallelism)");
  sub.add_option("--format", o.format, "json|csv");
  sub.add_option("--out", o.out, "write the report to this path");
}

void add_sampling(CLI::App& sub, Options& o) {
  sub.add_option("--n", o.n, "path length");
  sub.add_option("--reps", o.reps, "replications");
}

void add_quadrature(CLI::App& sub, Options& o) {
  sub.add_option("--abs-tol", o.abs_tol, "quadrature absolute tolerance");
  sub.add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
  sub.add_option("--max-subdivisions", o.max_subdivisions, "quadrature cell budget");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) config_error("config file must hold a JSON object");
  // A previous report reruns with its effective config and seed.
  if (j.contains("command") && j.contains("config") && j["config"].is_object()) {
    json cfg = j["config"];
    if (j.contains("seed") && !cfg.contains("seed")) cfg["seed"] = j["seed"];
    return cfg;
  }
  return j;
}

// Flags override config values; the result is the effective config.
json merge(json cfg, const Options& o) {
  json dist = cfg.contains("distribution") ? cfg["distribution"] : json::object();
  if (!dist.is_object()) config_error("'distribution' must be an object");
  if (o.dist) {
    if (dist.value("kind", std::string()) != *o.dist) dist = json::object();
    dist["kind"] = *o.dist;
  } else if (!o.atoms.empty() && !dist.contains("kind")) {
    dist["kind"] = "atoms";
  }
  auto set = [&](const char* key, const auto& v) {
    if (v) dist[key] = *v;
  };
  set("a", o.a);
  set("b", o.b);
  set("p", o.p);
  set("lo", o.lo);
  set("hi", o.hi);
  set("rate", o.rate);
  set("sign", o.sign);
  set("scale", o.scale);
  if (!o.atoms.empty()) dist["atoms"] = o.atoms;
  if (!o.weights.empty()) dist["weights"] = o.weights;
  if (!dist.empty()) cfg["distribution"] = dist;

  auto put = [&](const char* key, const auto& v) {
    if (v) cfg[key] = *v;
  };
  put("n", o.n);
  put("reps", o.reps);
  put("seed", o.seed);
  put("threads", o.threads);
  put("format", o.format);
  put("out", o.out);
  put("method", o.method);
  put("lambda_source", o.lambda_source);
  put("abs_tol", o.abs_tol);
  put("rel_tol", o.rel_tol);
  put("max_subdivisions", o.max_subdivisions);
  put("degeneracy_tol", o.degeneracy_tol);

  auto put_law = [&](const char* role, const std::optional<double>& c,
                     const std::optional<double>& l, const std::optional<double>& h) {
    if (!c && !l && !h) return;
    json law = json::object();
    if (c) law["const"] = *c;
    if (l) law["lo"] = *l;
    if (h) law["hi"] = *h;
    cfg["hill"][role] = law;
  };
  put_law("h", o.h_const, o.h_lo, o.h_hi);
  put_law("g", o.g_const, o.g_lo, o.g_hi);
  return cfg;
}

std::uint64_t get_count(const json& cfg, const char* key, std::uint64_t fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    config_error(std::string("'") + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

double get_real(const json& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg.at(key).is_number()) config_error(std::string("'") + key + "' must be a number");
  return cfg.at(key).get<double>();
}

std::string get_text(const json& cfg, const char* key, const std::string& fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg.at(key).is_string()) config_error(std::string("'") + key + "' must be a string");
  return cfg.at(key).get<std::string>();
}

EntryDistribution get_distribution(const json& cfg) {
  if (!cfg.contains("distribution")) config_error("no distribution given (use --dist or config)");
  return distribution_from_json(cfg.at("distribution"));
}

QuadratureSpec get_quadrature(const json& cfg) {
  QuadratureSpec spec;
  spec.abs_tol = get_real(cfg, "abs_tol", spec.abs_tol);
  spec.rel_tol = get_real(cfg, "rel_tol", spec.rel_tol);
  spec.max_subdivisions =
      static_cast<std::size_t>(get_count(cfg, "max_subdivisions", spec.max_subdivisions));
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0) || spec.max_subdivisions == 0) {
    config_error("quadrature tolerances and max_subdivisions must be positive");
  }
  return spec;
}

void echo_quadrature(json& effective, const QuadratureSpec& s) {
  effective["abs_tol"] = s.abs_tol;
  effective["rel_tol"] = s.rel_tol;
  effective["max_subdivisions"] = s.max_subdivisions;
}

ScalarLaw get_law(const json& cfg, const char* role, ScalarLaw fallback) {
  if (!cfg.contains("hill") || !cfg.at("hill").contains(role)) return fallback;
  const auto& law = cfg.at("hill").at(role);
  if (law.contains("const")) return ConstantValue{get_real(law, "const", 0.0)};
  if (law.contains("lo") && law.contains("hi")) {
    return UniformInterval{get_real(law, "lo", 0.0), get_real(law, "hi", 0.0)};
  }
  config_error(std::string("hill.") + role + " needs 'const' or both 'lo' and 'hi'");
}

json law_echo(const ScalarLaw& law) {
  if (const auto* c = std::get_if<ConstantValue>(&law)) return {{"const", c->value}};
  const auto& u = std::get<UniformInterval>(law);
  return {{"lo", u.lo}, {"hi", u.hi}};
}

struct Context {
  json cfg;          // merged input
  json effective;    // echoed config
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

using Command = std::function<json(Context&)>;

void require_positive(std::uint64_t v, const char* what) {
  if (v == 0) config_error(std::string(what) + " must be positive");
}

json closed_form_cmd(Context& ctx) {
  const auto dist = get_distribution(ctx.cfg);
  ctx.effective["distribution"] = distribution_to_json(dist);
  return {{"lambda", optional_number(lambda_closed_form(dist))},
          {"sigma2", optional_number(sigma2_closed_form(dist))}};
}

json estimate_lambda_cmd(Context& ctx) {
  const auto dist = get_distribution(ctx.cfg);
  const auto method = get_text(ctx.cfg, "method", "block");
  const auto n = get_count(ctx.cfg, "n", 1000000);
  ctx.effective["distribution"] = distribution_to_json(dist);
  ctx.effective["method"] = method;
  ctx.effective["n"] = n;
  StreamFamily family(ctx.seed);
  LambdaEstimate est;
  if (method == "block") {
    RandomStream rng = family.stream(0);
    est = lambda_block_estimate(dist, n, rng);
  } else if (method == "direct") {
    const auto reps = get_count(ctx.cfg, "reps", 100);
    require_positive(reps, "reps");
    ctx.effective["reps"] = reps;
    est = lambda_direct_estimate(dist, n, reps, family, ctx.threads);
  } else {
    config_error("method must be 'block' or 'direct'");
  }
  json out = to_json(est);
  out["closed_form"] = optional_number(lambda_closed_form(dist));
  return out;
}

json estimate_sigma2_cmd(Context& ctx) {
  const auto dist = get_distribution(ctx.cfg);
  const auto n = get_count(ctx.cfg, "n", 1000000);
  ctx.effective["distribution"] = distribution_to_json(dist);
  ctx.effective["n"] = n;
  RandomStream rng = StreamFamily(ctx.seed).stream(0);
  json out = to_json(sigma2_block_estimate(dist, n, rng));
  out["closed_form_lambda"] = optional_number(lambda_closed_form(dist));
  out["closed_form_sigma2"] = optional_number(sigma2_closed_form(dist));
  return out;
}

json oracle_cmd(Context& ctx) {
  const auto dist = get_distribution(ctx.cfg);
  const auto spec = get_quadrature(ctx.cfg);
  ctx.effective["distribution"] = distribution_to_json(dist);
  echo_quadrature(ctx.effective, spec);
  return {{"lambda", to_json(lambda_quadrature(dist, spec))},
          {"sigma2", to_json(sigma2_quadrature(dist, spec))},
          {"closed_form_lambda", optional_number(lambda_closed_form(dist))},
          {"closed_form_sigma2", optional_number(sigma2_closed_form(dist))}};
}

LambdaSource get_lambda_source(const json& cfg) {
  const auto s = get_text(cfg, "lambda_source", "closed_form");
  if (s == "closed_form") return LambdaSource::ClosedForm;
  if (s == "estimate") return LambdaSource::Estimate;
  config_error("lambda_source must be 'closed_form' or 'estimate'");
}

json clt_cmd(Context& ctx, CltReport& report) {
  const auto dist = get_distribution(ctx.cfg);
  const auto n = get_count(ctx.cfg, "n", 4000);
  const auto reps = get_count(ctx.cfg, "reps", 5000);
  require_positive(n, "n");
  require_positive(reps, "reps");
  const auto source = get_lambda_source(ctx.cfg);
  const auto spec = get_quadrature(ctx.cfg);
  ctx.effective["distribution"] = distribution_to_json(dist);
  ctx.effective["n"] = n;
  ctx.effective["reps"] = reps;
  ctx.effective["lambda_source"] = source == LambdaSource::ClosedForm ? "closed_form" : "estimate";
  if (source == LambdaSource::Estimate) echo_quadrature(ctx.effective, spec);
  report = simulate_normalized(dist, n, reps, source, StreamFamily(ctx.seed), ctx.threads, spec);
  return to_json(report, false);
}

json cancellation_cmd(Context& ctx, CancellationReport& report) {
  const auto dist = get_distribution(ctx.cfg);
  const auto n = get_count(ctx.cfg, "n", 10000);
  const auto reps = get_count(ctx.cfg, "reps", 2000);
  ctx.effective["distribution"] = distribution_to_json(dist);
  ctx.effective["n"] = n;
  ctx.effective["reps"] = reps;
  report = even_odd_cancellation(dist, n, reps, StreamFamily(ctx.seed), ctx.threads);
  return to_json(report);
}

json classify_cmd(Context& ctx) {
  const auto dist = get_distribution(ctx.cfg);
  const double tol = get_real(ctx.cfg, "degeneracy_tol", kDefaultDegeneracyTolerance);
  if (!(tol > 0.0)) config_error("degeneracy_tol must be positive");
  ctx.effective["distribution"] = distribution_to_json(dist);
  ctx.effective["degeneracy_tol"] = tol;
  json out = to_json(classify_degeneracy(dist, tol));
  out["lambda"] = optional_number(lambda_closed_form(dist));
  out["sigma2"] = optional_number(sigma2_closed_form(dist));
  return out;
}

json hill_cmd(Context& ctx) {
  const auto h = get_law(ctx.cfg, "h", UniformInterval{50.0, 100.0});
  const auto g = get_law(ctx.cfg, "g", ConstantValue{1.0});
  const auto n = get_count(ctx.cfg, "n", 10000);
  const auto reps = get_count(ctx.cfg, "reps", 100);
  ctx.effective["hill"] = {{"h", law_echo(h)}, {"g", law_echo(g)}};
  ctx.effective["n"] = n;
  ctx.effective["reps"] = reps;
  return to_json(unstable_growth_check(h, g, n, reps, StreamFamily(ctx.seed), ctx.threads));
}

json paper_table_cmd(Context& ctx) {
  const auto n = get_count(ctx.cfg, "n", 1000000);
  const auto spec = get_quadrature(ctx.cfg);
  ctx.effective["n"] = n;
  echo_quadrature(ctx.effective, spec);

  const std::vector<std::pair<std::string, EntryDistribution>> rows = {
      {"binary(a=1,b=2,p=0.5)", Binary{1.0, 2.0, 0.5}},
      {"uniform[0,1]", Uniform{0.0, 1.0}},
      {"uniform[-1,1]", Uniform{-1.0, 1.0}},
      {"uniform[-1,2]", Uniform{-1.0, 2.0}},
      {"exponential(rate=1)", Exponential{1.0, 1}},
      {"laplace(scale=1)", Laplace{1.0}},
  };
  std::vector<json> out(rows.size());
  const StreamFamily family(ctx.seed);
  parallel_for(rows.size(), ctx.threads, [&](std::size_t i) {
    const auto& dist = rows[i].second;
    RandomStream rng = family.stream(i);
    const auto mc = sigma2_block_estimate(dist, n, rng);
    json row = {{"label", rows[i].first},
                {"distribution", distribution_to_json(dist)},
                {"closed_form", {{"lambda", optional_number(lambda_closed_form(dist))},
                                 {"sigma2", optional_number(sigma2_closed_form(dist))}}},
                {"monte_carlo", to_json(mc)}};
    if (is_continuous(dist)) {
      row["oracle"] = {{"lambda", to_json(lambda_quadrature(dist, spec))},
                       {"sigma2", to_json(sigma2_quadrature(dist, spec))}};
    } else {
      row["oracle"] = nullptr;
    }
    out[i] = std::move(row);
  });
  return {{"rows", out}};
}

void emit(const Context& ctx, const std::string& command, const json& result,
          const std::function<void(std::ostream&)>& csv, std::ostream& out) {
  const auto format = get_text(ctx.cfg, "format", "json");
  std::ofstream file;
  std::ostream* sink = &out;
  if (ctx.cfg.contains("out")) {
    const auto path = get_text(ctx.cfg, "out", "");
    file.open(path);
    if (!file) config_error("cannot open output file '" + path + "'");
    sink = &file;
  }
  if (format == "csv") {
    csv(*sink);
    return;
  }
  json report = {{"command", command},
                 {"version", std::string(kVersion)},
                 {"rng", std::string(kRngAlgorithm)},
                 {"seed", ctx.seed},
                 {"config", ctx.effective},
                 {"result", result}};
  *sink << report.dump(2) << '\n';
}

void print_error(std::ostream& err, const std::string& code, const std::string& msg, int exit) {
  json e = {{"error", code}, {"message", msg}, {"exit_code", exit}};
  err << e.dump() << '\n';
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigError: return kConfig;
    case ErrorCode::Nonconvergence: return kNonconvergence;
    case ErrorCode::DegenerateSample: return kDegenerateSample;
    case ErrorCode::ZeroAtom:
    case ErrorCode::CancellingAtoms:
    case ErrorCode::BadWeights:
    case ErrorCode::BadSupport:
    case ErrorCode::UnsupportedScale:
    case ErrorCode::ZeroEntry:
    case ErrorCode::ZeroParam:
    case ErrorCode::MissingLambda:
    case ErrorCode::ZeroVariance: return kValidation;
  }
  return kInternal;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"singprod: Lyapunov exponent and CLT variance of products of the singular "
               "random matrices [[1, x], [1/x, 1]]",
               "singprod"};
  app.footer(kFooter);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Options opt;
  struct Spec {
    const char* name;
    const char* help;
    bool sampling;
    bool quadrature;
  };
  const std::vector<Spec> specs = {
      {"closed-form", "exact lambda and sigma^2 where known", false, false},
      {"estimate-lambda", "Monte Carlo lambda (block or direct product)", true, false},
      {"estimate-sigma2", "Monte Carlo sigma^2 with batch-means error", true, false},
      {"oracle", "quadrature lambda and sigma^2 for continuous laws", false, true},
      {"clt-test", "normalized log-norm samples and KS test", true, true},
      {"cancellation", "even/odd partial-sum cancellation report", true, false},
      {"classify", "match against the zero-variance families", false, false},
      {"hill-demo", "exact vs approximated Hill transfer-matrix growth", true, false},
      {"paper-table", "closed form, Monte Carlo and oracle for the example laws", true, true},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& s : specs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common(*sub, opt);
    if (s.sampling) add_sampling(*sub, opt);
    if (s.quadrature) add_quadrature(*sub, opt);
    subs[s.name] = sub;
  }
  subs["estimate-lambda"]->add_option("--method", opt.method, "block|direct");
  subs["clt-test"]->add_option("--lambda-source", opt.lambda_source, "closed_form|estimate");
  subs["classify"]->add_option("--degeneracy-tol", opt.degeneracy_tol, "relative ratio tolerance");
  auto* hill = subs["hill-demo"];
  hill->add_option("--h-const", opt.h_const, "constant h");
  hill->add_option("--h-lo", opt.h_lo, "h uniform lower end");
  hill->add_option("--h-hi", opt.h_hi, "h uniform upper end");
  hill->add_option("--g-const", opt.g_const, "constant g");
  hill->add_option("--g-lo", opt.g_lo, "g uniform lower end");
  hill->add_option("--g-hi", opt.g_hi, "g uniform upper end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    print_error(err, "ConfigError", e.what(), kConfig);
    return kConfig;
  }

  std::string command;
  for (const auto& s : specs) {
    if (subs[s.name]->parsed()) command = s.name;
  }

  try {
    Context ctx;
    ctx.cfg = merge(load_config(opt.config_path), opt);
    if (ctx.cfg.contains("seed")) {
      ctx.seed = get_count(ctx.cfg, "seed", 0);
    } else {
      std::random_device rd;
      ctx.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    ctx.threads = static_cast<unsigned>(get_count(ctx.cfg, "threads", 0));
    const auto format = get_text(ctx.cfg, "format", "json");
    if (format != "json" && format != "csv") config_error("format must be 'json' or 'csv'");
    const bool csv_ok = command == "clt-test" || command == "cancellation";
    if (format == "csv" && !csv_ok) {
      config_error("csv output is only available for clt-test and cancellation");
    }

    json result;
    std::function<void(std::ostream&)> csv = [](std::ostream&) {};
    CltReport clt;
    CancellationReport cancel;
    if (command == "closed-form") result = closed_form_cmd(ctx);
    else if (command == "estimate-lambda") result = estimate_lambda_cmd(ctx);
    else if (command == "estimate-sigma2") result = estimate_sigma2_cmd(ctx);
    else if (command == "oracle") result = oracle_cmd(ctx);
    else if (command == "clt-test") {
      result = clt_cmd(ctx, clt);
      csv = [&](std::ostream& os) { write_csv(os, clt); };
    } else if (command == "cancellation") {
      result = cancellation_cmd(ctx, cancel);
      csv = [&](std::ostream& os) { write_csv(os, cancel); };
    } else if (command == "classify") result = classify_cmd(ctx);
    else if (command == "hill-demo") result = hill_cmd(ctx);
    else if (command == "paper-table") result = paper_table_cmd(ctx);
    emit(ctx, command, result, csv, out);
    return kOk;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    print_error(err, std::string(to_string(e.code())), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    print_error(err, "Internal", e.what(), kInternal);
    return kInternal;
  }
}

}  // namespace singprod::cli
