// SPDX-License-Identifier: Apache-2.0
#include "singprod/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "singprod/error.hpp"

namespace singprod {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::ConfigError, "distribution config: " + msg);
}

double number_field(const json& j, const char* key) {
  if (!j.contains(key)) config_error(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) config_error(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    config_error(std::string("field '") + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) config_error(std::string("field '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

EntryDistribution distribution_from_json(const json& j) {
  if (!j.is_object()) config_error("expected an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) config_error("missing string 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  EntryDistribution dist;
  if (kind == "binary") {
    dist = Binary{number_field(j, "a"), number_field(j, "b"), number_field(j, "p")};
  } else if (kind == "uniform") {
    dist = Uniform{number_field(j, "lo"), number_field(j, "hi")};
  } else if (kind == "exponential") {
    int sign = 1;
    if (j.contains("sign")) sign = static_cast<int>(number_field(j, "sign"));
    dist = Exponential{number_field(j, "rate"), sign};
  } else if (kind == "laplace") {
    dist = Laplace{number_field(j, "scale")};
  } else if (kind == "atoms") {
    dist = DiscreteAtoms{number_list(j, "atoms"), number_list(j, "weights")};
  } else {
    config_error("unknown kind '" + kind + "'");
  }
  validate(dist);
  return dist;
}

json distribution_to_json(const EntryDistribution& dist) {
  if (const auto* d = std::get_if<Binary>(&dist)) {
    return {{"kind", "binary"}, {"a", d->a}, {"b", d->b}, {"p", d->p}};
  }
  if (const auto* d = std::get_if<Uniform>(&dist)) {
    return {{"kind", "uniform"}, {"lo", d->lo}, {"hi", d->hi}};
  }
  if (const auto* d = std::get_if<Exponential>(&dist)) {
    return {{"kind", "exponential"}, {"rate", d->rate}, {"sign", d->sign}};
  }
  if (const auto* d = std::get_if<Laplace>(&dist)) {
    return {{"kind", "laplace"}, {"scale", d->scale}};
  }
  const auto& d = std::get<DiscreteAtoms>(dist);
  return {{"kind", "atoms"}, {"atoms", d.atoms}, {"weights", d.weights}};
}

json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

json to_json(const LambdaEstimate& e) {
  return {{"lambda_hat", e.lambda_hat},
          {"stderr", optional_number(e.stderr_lambda)},
          {"n_samples", e.n_samples}};
}

json to_json(const BlockMomentEstimate& e) {
  return {{"lambda_hat", e.lambda_hat},
          {"m2_hat", e.m2_hat},
          {"c1_hat", e.c1_hat},
          {"sigma2_hat", e.sigma2_hat},
          {"n_samples", e.n_samples},
          {"batches", e.batches},
          {"stderr_lambda", optional_number(e.stderr_lambda)},
          {"stderr_sigma2", optional_number(e.stderr_sigma2)}};
}

json to_json(const QuadratureResult& r) {
  return {{"value", r.value}, {"error_bound", r.error_bound}, {"evaluations", r.evaluations}};
}

json to_json(const DegeneracyVerdict& v) {
  json out = {{"form", to_string(v.form)}};
  if (v.form == DegeneracyForm::FormI || v.form == DegeneracyForm::FormII ||
      v.form == DegeneracyForm::FormIII) {
    out["a"] = v.atom;
    out["p"] = v.p;
  }
  return out;
}

json to_json(const KsResult& k) {
  return {{"ks_distance", k.distance},
          {"critical_value_1pct", k.critical_value},
          {"reject_at_1pct", k.reject_at_1pct}};
}

json to_json(const CltReport& r, bool include_samples) {
  json out = {{"n", r.n},
              {"reps", r.reps},
              {"lambda_used", r.lambda_used},
              {"sigma2_ref", r.sigma2_ref},
              {"empirical_mean", r.empirical_mean},
              {"empirical_var", r.empirical_var},
              {"ks", r.ks ? to_json(*r.ks) : json(nullptr)}};
  if (include_samples) out["samples"] = r.samples;
  return out;
}

json to_json(const CancellationReport& r) {
  return {{"n", r.n},
          {"reps", r.reps},
          {"lambda_used", r.lambda_used},
          {"var_total_over_n", r.var_total_over_n},
          {"var_even_over_half", r.var_even_over_half},
          {"var_odd_over_half", r.var_odd_over_half},
          {"correlation_even_odd", r.correlation_even_odd}};
}

json to_json(const GrowthCheck& g) {
  return {{"n", g.n},
          {"reps", g.reps},
          {"rate_exact", g.rate_exact},
          {"rate_approx", g.rate_approx},
          {"gap", g.gap},
          {"mean_log_h", g.mean_log_h},
          {"lambda_hat", g.lambda_hat},
          {"stderr_exact", optional_number(g.stderr_exact)}};
}

void write_csv(std::ostream& out, const CltReport& r) {
  out << "index,sample\n";
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    out << i << ',' << format_double(r.samples[i]) << '\n';
  }
}

void write_csv(std::ostream& out, const CancellationReport& r) {
  out << "index,s_total,s_even,s_odd\n";
  for (std::size_t i = 0; i < r.s_total.size(); ++i) {
    out << i << ',' << format_double(r.s_total[i]) << ',' << format_double(r.s_even[i])
        << ',' << format_double(r.s_odd[i]) << '\n';
  }
}

}  // namespace singprod
