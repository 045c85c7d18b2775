#include <sstream>

#include "normalis/cli.hpp"
#include "normalis/precision.hpp"

namespace normalis::cli {

namespace {

std::string csv_cell(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

void RunReport::check(const std::string& name, bool ok) {
  checks.push_back(Json{{"name", name}, {"pass", ok}});
  pass = pass && ok;
}

Json payload(const RunReport& report) {
  Json j = Json::object();
  j["command"] = report.command;
  j["provenance"] = report.provenance;
  j["results"] = report.results;
  j["checks"] = report.checks;
  j["pass"] = report.pass;
  j["precision"] = {{"max_bits_used", report.max_precision_used}, {"cap", precision_cap()}};
  return j;
}

std::string render(const RunReport& report, const std::string& format, bool timing) {
  std::ostringstream os;
  if (format == "csv") {
    if (report.table) {
      for (std::size_t k = 0; k < report.table->header.size(); ++k)
        os << (k ? "," : "") << csv_cell(report.table->header[k]);
      os << '\n';
      for (const auto& row : report.table->rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_cell(row[k]);
        os << '\n';
      }
    } else {
      os << "key,value\n";
      for (const auto& [key, value] : report.results.items()) os << csv_cell(key) << ',' << csv_cell(scalar_text(value)) << '\n';
      os << "pass," << (report.pass ? "true" : "false") << '\n';
    }
    return os.str();
  }
  Json j = payload(report);
  if (timing) j["wall_time_s"] = report.wall_time;
  os << j.dump(2) << '\n';
  return os.str();
}

}  // namespace normalis::cli
