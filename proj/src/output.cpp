#include "crowd/output.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "crowd/common.hpp"

namespace crowd {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string csv_header() {
    return "experiment_id,axis_name,axis_value,policy,metric_name,value,stderr,seed\n";
}

std::string to_csv(const OutputRow& row) {
    std::ostringstream os;
    os << row.experiment_id << ',' << row.axis_name << ',' << format_real(row.axis_value)
       << ',' << row.policy << ',' << row.metric_name << ',' << format_real(row.value) << ','
       << format_real(row.std_error) << ',' << row.seed << '\n';
    return os.str();
}

std::string to_csv(const std::vector<OutputRow>& rows) {
    std::string out = csv_header();
    for (const OutputRow& r : rows) out += to_csv(r);
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_real(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw ConfigError("malformed real in table: '" + s + "'");
    }
    return v;
}

}  // namespace

std::vector<OutputRow> parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line + "\n" != csv_header()) {
        throw ConfigError("table header does not match the documented schema");
    }
    std::vector<OutputRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 8) throw ConfigError("table row does not have 8 fields");
        rows.push_back(OutputRow{f[0], f[1], parse_real(f[2]), f[3], f[4], parse_real(f[5]),
                                 parse_real(f[6]),
                                 static_cast<std::uint64_t>(std::strtoull(f[7].c_str(), nullptr, 10))});
    }
    return rows;
}

}  // namespace crowd
