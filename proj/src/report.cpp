// SPDX-License-Identifier: Apache-2.0

#include "mixce/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mixce {

namespace {

std::string format_g10(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

std::string to_csv_row(const NmseReport& report) {
  std::string bits =
      report.point.bits_low ? std::to_string(*report.point.bits_low) : "inf";
  std::ostringstream row;
  row << report.point.method << "," << format_g10(report.point.snr_db) << ","
      << format_g10(report.point.eta) << "," << pattern_name(report.point.pattern)
      << "," << bits << "," << format_g10(report.nmse) << ","
      << format_g10(report.nmse_db) << "," << report.sample_count << ","
      << report.seed << "," << report.model_path;
  return row.str();
}

void write_report_csv(const std::filesystem::path& path,
                      std::vector<NmseReport> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const NmseReport& a, const NmseReport& b) {
                     if (a.point.method != b.point.method)
                       return a.point.method < b.point.method;
                     if (a.point.snr_db != b.point.snr_db)
                       return a.point.snr_db < b.point.snr_db;
                     return a.point.eta < b.point.eta;
                   });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path.string());
  out << kReportCsvHeader << "\n";
  for (const NmseReport& report : reports) out << to_csv_row(report) << "\n";
  if (!out) throw std::runtime_error("failed writing report: " + path.string());
}

std::vector<NmseReport> read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kReportCsvHeader)
    throw std::runtime_error("unrecognized report header in " + path.string());
  std::vector<NmseReport> reports;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 10)
      throw std::runtime_error("malformed report row in " + path.string());
    NmseReport r;
    r.point.method = f[0];
    r.point.snr_db = std::stod(f[1]);
    r.point.eta = std::stod(f[2]);
    r.point.pattern = pattern_from_name(f[3]);
    r.point.bits_low = f[4] == "inf" ? std::nullopt
                                     : std::optional<int>(std::stoi(f[4]));
    r.nmse = std::stod(f[5]);
    r.nmse_db = std::stod(f[6]);
    r.sample_count = std::stoll(f[7]);
    r.seed = std::stoull(f[8]);
    r.model_path = f[9];
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace mixce
