#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "normalis/cli.hpp"
#include "normalis/error.hpp"

namespace normalis::cli {

namespace {

const std::set<std::string> kSubcommands = {"ifs", "pisot", "theta", "disint", "fourier", "normal",
                                            "bernoulli-pipeline"};

void only_keys(const Json& j, const std::set<std::string>& allowed, const std::string& field) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw InputError(field + ": unknown key '" + key + "' (allowed: " + list + ")");
    }
  }
}

mpq_class parse_rational(const Json& j, const std::string& field) {
  const ExactNumber x = parse_exact(j, field);
  const auto q = x.as_rational();
  if (!q) throw InputError(field + ": expected a rational number");
  return *q;
}

long parse_long(const Json& j, const std::string& field, long min_value) {
  if (!j.is_number_integer()) throw InputError(field + ": expected an integer");
  const long v = j.get<long>();
  if (v < min_value) throw InputError(field + ": must be at least " + std::to_string(min_value));
  return v;
}

}  // namespace

ExactNumber parse_exact(const Json& j, const std::string& field) {
  try {
    if (j.is_string()) return ExactNumber::parse(j.get<std::string>());
    if (j.is_number_integer()) return ExactNumber(j.get<long>());
    if (j.is_number_float())
      throw InputError("non-integer numbers must be quoted (e.g. \"0.5\" or \"1/2\") so they parse exactly");
    if (j.is_object()) {
      if (j.size() != 1) throw InputError("expected exactly one of 'rational' or 'algebraic'");
      if (j.contains("rational")) {
        if (!j["rational"].is_string()) throw InputError("'rational' must be a \"num/den\" string");
        const ExactNumber x = ExactNumber::parse(j["rational"].get<std::string>());
        return x;
      }
      if (j.contains("algebraic")) {
        const Json& a = j["algebraic"];
        if (!a.is_object()) throw InputError("'algebraic' must be an object");
        only_keys(a, {"poly", "interval"}, field + ".algebraic");
        if (!a.contains("poly") || !a["poly"].is_array()) throw InputError("'algebraic.poly' must be an integer list");
        if (!a.contains("interval") || !a["interval"].is_array() || a["interval"].size() != 2)
          throw InputError("'algebraic.interval' must be [\"lo\", \"hi\"]");
        std::vector<long> coeffs;
        for (const auto& c : a["poly"]) {
          if (!c.is_number_integer()) throw InputError("'algebraic.poly' entries must be integers");
          coeffs.push_back(c.get<long>());
        }
        const mpq_class lo = parse_rational(a["interval"][0], field + ".algebraic.interval[0]");
        const mpq_class hi = parse_rational(a["interval"][1], field + ".algebraic.interval[1]");
        return ExactNumber::algebraic(Polynomial::from_integers(coeffs), lo, hi);
      }
      throw InputError("expected 'rational' or 'algebraic'");
    }
    throw InputError("expected an exact number");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(field, 0) == 0) throw;
    throw InputError(field + ": " + msg);
  }
}

Json to_json(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Json to_json(const ExactNumber& x) {
  if (const auto q = x.as_rational()) return Json{{"rational", to_json(*q)}};
  const Polynomial poly = x.minimal_polynomial();
  const auto [lo, hi] = x.isolating_interval();
  Json coeffs = Json::array();
  for (long c : poly.integer_coeffs_as_long()) coeffs.push_back(c);
  return Json{{"algebraic", {{"poly", coeffs}, {"interval", {to_json(lo), to_json(hi)}}}}};
}

Json to_json(const Interval& x) { return Json{{"lo", x.lo_double()}, {"hi", x.hi_double()}}; }

IfsSpec parse_ifs(const Json& j, const std::string& field) {
  if (!j.is_object()) throw InputError(field + ": expected an object");
  only_keys(j, {"lambda", "translations", "probs"}, field);
  if (!j.contains("lambda")) throw InputError(field + ": missing 'lambda'");
  if (!j.contains("translations") || !j["translations"].is_array() || j["translations"].empty())
    throw InputError(field + ": 'translations' must be a nonempty list");
  const ExactNumber lambda = parse_exact(j["lambda"], field + ".lambda");
  if (abs(lambda) >= ExactNumber(1L) || lambda.is_zero())
    throw InputError(field + ".lambda: |lambda| must lie in (0, 1), got " + lambda.to_string());
  std::vector<ExactNumber> t;
  for (std::size_t i = 0; i < j["translations"].size(); ++i)
    t.push_back(parse_exact(j["translations"][i], field + ".translations[" + std::to_string(i) + "]"));
  ProbVector p = ProbVector::uniform(t.size());
  if (j.contains("probs")) {
    const Json& pj = j["probs"];
    if (!pj.is_array() || pj.size() != t.size())
      throw InputError(field + ".probs: expected " + std::to_string(t.size()) + " weights");
    std::vector<mpq_class> w;
    for (std::size_t i = 0; i < pj.size(); ++i)
      w.push_back(parse_rational(pj[i], field + ".probs[" + std::to_string(i) + "]"));
    try {
      p = ProbVector(std::move(w));
    } catch (const InputError& e) {
      throw InputError(field + ".probs: " + e.what());
    }
  }
  return IfsSpec{EquicontractiveIFS(lambda, std::move(t)), std::move(p)};
}

IfsSpec normalize_pipeline(const IfsSpec& spec) {
  auto [trimmed, p1] = trim_support(spec.ifs, spec.probs);
  auto [squared, p2] = square_if_negative(trimmed, p1);
  return IfsSpec{normalize_to_unit(squared), std::move(p2)};
}

RunConfig load_config(std::istream& in, const std::string& source) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  if (!j.is_object()) throw InputError(source + ": top level must be an object");
  only_keys(j, {"ifs", "base", "seed", "workers", "format", "precision_cap", "params"}, source);
  RunConfig cfg;
  if (j.contains("ifs")) cfg.ifs = parse_ifs(j["ifs"]);
  if (j.contains("base")) cfg.base = parse_long(j["base"], "base", 2);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw InputError("seed: expected a nonnegative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("workers")) cfg.workers = static_cast<unsigned>(parse_long(j["workers"], "workers", 1));
  if (j.contains("format")) {
    if (!j["format"].is_string() || (j["format"] != "json" && j["format"] != "csv"))
      throw InputError("format: expected \"json\" or \"csv\"");
    cfg.format = j["format"].get<std::string>();
  }
  if (j.contains("precision_cap")) cfg.precision_cap = parse_long(j["precision_cap"], "precision_cap", 64);
  if (j.contains("params")) {
    const Json& params = j["params"];
    if (!params.is_object()) throw InputError("params: expected an object");
    only_keys(params, kSubcommands, "params");
    for (const auto& [key, value] : params.items())
      if (!value.is_object()) throw InputError("params." + key + ": expected an object");
    cfg.params = params;
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  if (path == "-") return load_config(std::cin, "<stdin>");
  std::ifstream f(path);
  if (!f) throw InputError("cannot read config file '" + path + "'");
  return load_config(f, path);
}

}  // namespace normalis::cli
