#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dpmimo/experiments.hpp"
#include "json.hpp"

#ifndef DPMIMO_VERSION
#define DPMIMO_VERSION "0.0.0"
#endif

namespace dpmimo {

const char* artifact_version() { return DPMIMO_VERSION; }

std::string format_float(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.M << ',' << r.K << ',' << to_string(r.precoder) << ','
        << to_string(r.setup) << ',' << format_float(r.xpd_db) << ',' << r.drop_index << ','
        << r.ue_index << ',' << format_float(r.se) << ',' << r.method << ',' << r.seed << '\n';
  }
}

std::vector<ResultRow> read_rows_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultCsvHeader) {
    throw std::runtime_error("read_rows_csv: missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    auto bad = [&] {
      return std::runtime_error("read_rows_csv: malformed line " + std::to_string(line_no));
    };
    if (f.size() != 11) throw bad();
    ResultRow r;
    try {
      r.experiment = f[0];
      r.M = std::stoi(f[1]);
      r.K = std::stoi(f[2]);
      if (f[3] == "MR") r.precoder = PrecoderScheme::kMR;
      else if (f[3] == "ZF") r.precoder = PrecoderScheme::kZF;
      else throw bad();
      if (f[4] == "dual") r.setup = Setup::kDual;
      else if (f[4] == "uni") r.setup = Setup::kUni;
      else throw bad();
      r.xpd_db = std::strtod(f[5].c_str(), nullptr);
      r.drop_index = std::stoi(f[6]);
      r.ue_index = std::stoi(f[7]);
      r.se = std::strtod(f[8].c_str(), nullptr);
      r.method = f[9];
      r.seed = std::stoull(f[10]);
    } catch (const std::logic_error&) {
      throw bad();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_metadata_json(std::ostream& out, const SystemConfig& config,
                         const std::string& experiment) {
  nlohmann::ordered_json meta;
  meta["experiment"] = experiment;
  meta["artifact_version"] = artifact_version();
  meta["config_digest"] = config_digest(config);
  meta["seed"] = config.seed;
  meta["config"] = serialize_config(config);
  out << meta.dump(2) << '\n';
}

}  // namespace dpmimo
