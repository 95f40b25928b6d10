// SPDX-License-Identifier: Apache-2.0
//
// CSV report rows. Numeric fields are decimal text with 10 significant
// digits; rows are ordered by (method, snr_db, eta).

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mixce/operating_point.hpp"

namespace mixce {

inline constexpr const char* kReportCsvHeader =
    "method,snr_db,eta,pattern,bits_low,nmse,nmse_db,n_test,seed,model_path";

std::string to_csv_row(const NmseReport& report);

// Sorts a copy by (method, snr_db, eta) and writes header + rows.
void write_report_csv(const std::filesystem::path& path,
                      std::vector<NmseReport> reports);

std::vector<NmseReport> read_report_csv(const std::filesystem::path& path);

}  // namespace mixce
