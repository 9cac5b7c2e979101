#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mixbound/mc_harness.hpp"

namespace mixbound {

// One CSV line of a certification report; mirrors a Verdict plus the chain
// context columns.
struct ReportRow {
    std::string chain;
    std::string bound;
    double p = 0.0;
    std::uint64_t n = 0;
    std::uint64_t tau = 0;
    double sigma = 0.0;
    double bound_value = 0.0;
    double empirical_value = 0.0;
    double std_error = 0.0;
    double ratio = 0.0;
    bool holds = false;
};

inline constexpr const char* kReportHeader =
    "chain,bound,p,n,tau,sigma,bound_value,empirical_value,std_error,ratio,holds";

std::vector<ReportRow> make_report_rows(const std::string& chain_name,
                                        const CertifyResult& result);

// Doubles are rendered with 17 significant digits, so parsing the emitted
// text reproduces every field bit for bit.
std::string report_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_csv(const std::string& text);

std::string report_to_json(const std::vector<ReportRow>& rows);

// Whole-file write: stream to <path>.tmp, then rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mixbound
