#include "mixbound/report.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mixbound {

namespace {

std::string fmt_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

double parse_double(const std::string& token, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error("report csv line " + std::to_string(line) +
                                 ": bad numeric field '" + token + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& token, std::size_t line) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0' || errno == ERANGE)
        throw std::runtime_error("report csv line " + std::to_string(line) +
                                 ": bad integer field '" + token + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

}  // namespace

std::vector<ReportRow> make_report_rows(const std::string& chain_name,
                                        const CertifyResult& result) {
    std::vector<ReportRow> rows;
    rows.reserve(result.verdicts.size());
    for (const Verdict& v : result.verdicts) {
        ReportRow row;
        row.chain = chain_name;
        row.bound = v.bound_name;
        row.p = v.p;
        row.n = v.n;
        row.tau = result.tau;
        row.sigma = result.sigma;
        row.bound_value = v.bound_value;
        row.empirical_value = v.empirical_value;
        row.std_error = v.std_error;
        row.ratio = v.ratio;
        row.holds = v.holds;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    out << kReportHeader << '\n';
    for (const ReportRow& r : rows) {
        out << r.chain << ',' << r.bound << ',' << fmt_double(r.p) << ',' << r.n << ',' << r.tau
            << ',' << fmt_double(r.sigma) << ',' << fmt_double(r.bound_value) << ','
            << fmt_double(r.empirical_value) << ',' << fmt_double(r.std_error) << ','
            << fmt_double(r.ratio) << ',' << (r.holds ? "true" : "false") << '\n';
    }
    return out.str();
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kReportHeader)
        throw std::runtime_error("report csv: missing or unexpected header");

    std::vector<ReportRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 11)
            throw std::runtime_error("report csv line " + std::to_string(line_no) +
                                     ": expected 11 fields, got " + std::to_string(f.size()));
        ReportRow row;
        row.chain = f[0];
        row.bound = f[1];
        row.p = parse_double(f[2], line_no);
        row.n = parse_u64(f[3], line_no);
        row.tau = parse_u64(f[4], line_no);
        row.sigma = parse_double(f[5], line_no);
        row.bound_value = parse_double(f[6], line_no);
        row.empirical_value = parse_double(f[7], line_no);
        row.std_error = parse_double(f[8], line_no);
        row.ratio = parse_double(f[9], line_no);
        if (f[10] == "true")
            row.holds = true;
        else if (f[10] == "false")
            row.holds = false;
        else
            throw std::runtime_error("report csv line " + std::to_string(line_no) +
                                     ": bad boolean field '" + f[10] + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string report_to_json(const std::vector<ReportRow>& rows) {
    nlohmann::json doc = nlohmann::json::array();
    for (const ReportRow& r : rows) {
        nlohmann::json entry;
        entry["chain"] = r.chain;
        entry["bound"] = r.bound;
        entry["p"] = r.p;
        entry["n"] = r.n;
        entry["tau"] = r.tau;
        entry["sigma"] = r.sigma;
        entry["bound_value"] = r.bound_value;
        entry["empirical_value"] = r.empirical_value;
        entry["std_error"] = r.std_error;
        // JSON has no literal for infinities; fall back to the CSV rendering.
        if (std::isfinite(r.ratio))
            entry["ratio"] = r.ratio;
        else
            entry["ratio"] = fmt_double(r.ratio);
        entry["holds"] = r.holds;
        doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error(tmp.string() + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace mixbound
