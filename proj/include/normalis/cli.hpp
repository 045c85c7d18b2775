#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "normalis/algebra.hpp"
#include "normalis/ifs.hpp"

namespace normalis::cli {

using Json = nlohmann::ordered_json;

struct IfsSpec {
  EquicontractiveIFS ifs;
  ProbVector probs;
};

struct RunConfig {
  std::optional<IfsSpec> ifs;
  std::optional<long> base;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> format;
  std::optional<Bits> precision_cap;
  Json params = Json::object();  // {"<subcommand>": {"<option>": value}}
};

/// Validated configuration. Diagnostics name the line (syntax) or the field path (schema).
RunConfig load_config(std::istream& in, const std::string& source = "<stdin>");
/// "-" reads stdin.
RunConfig load_config_file(const std::string& path);

/// ExactNumber from "3/4", "0.125", an integer, {"rational": "n/d"} or
/// {"algebraic": {"poly": [...], "interval": ["lo", "hi"]}}. `field` prefixes errors.
ExactNumber parse_exact(const Json& j, const std::string& field);
Json to_json(const ExactNumber& x);
Json to_json(const Interval& x);
Json to_json(const mpq_class& q);

IfsSpec parse_ifs(const Json& j, const std::string& field = "ifs");

/// trim_support -> square_if_negative -> normalize_to_unit; steps recorded in provenance.
IfsSpec normalize_pipeline(const IfsSpec& spec);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct RunReport {
  std::string command;       // echo without scheduling flags
  std::vector<std::string> provenance;
  Json results = Json::object();
  Json checks = Json::array();  // [{"name", "pass"}]
  std::optional<Table> table;   // CSV rendering
  double wall_time = 0;
  Bits max_precision_used = 0;
  bool pass = true;
  int exit_code = 0;

  void check(const std::string& name, bool ok);
};

/// Deterministic part of the report (no wall time).
Json payload(const RunReport& report);
std::string render(const RunReport& report, const std::string& format, bool timing);

/// Parses argv-style arguments (without the program name), runs the command and
/// writes the report to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace normalis::cli
