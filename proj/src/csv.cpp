#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "rissk/errors.hpp"
#include "rissk/experiment.hpp"

namespace rissk {

namespace {

constexpr const char* kHeader = "snr_db,value,std_error,method,label";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Splits one record, honouring quoted fields that may span lines.
bool read_record(std::istream& is, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool quoted = false, any = false;
    char c;
    while (is.get(c)) {
        any = true;
        if (quoted) {
            if (c == '"') {
                if (is.peek() == '"') {
                    is.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            field += c;
        }
    }
    if (!any) return false;
    if (quoted) throw ConfigError("csv: unterminated quoted field");
    fields.push_back(std::move(field));
    return true;
}

double parse_num(const std::string& s, std::size_t line) {
    // strtod keeps subnormals that std::stod rejects as out of range.
    char* end = nullptr;
    const double v = s.empty() || std::isspace(static_cast<unsigned char>(s[0])) ? 0.0 : std::strtod(s.c_str(), &end);
    if (end == nullptr || end != s.c_str() + s.size() || !std::isfinite(v))
        throw ConfigError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

}  // namespace

void write_csv(const std::vector<CurveSeries>& series, std::ostream& os) {
    os << kHeader << '\n';
    for (const auto& s : series)
        for (const auto& p : s.points) {
            os << num(p.snr_db) << ',' << (p.value ? num(*p.value) : std::string()) << ',' << num(p.std_error) << ','
               << quote(p.method) << ',' << quote(s.label) << '\n';
        }
}

void emit_csv(const std::vector<CurveSeries>& series, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(series, os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

void emit_csv(const CurveSeries& series, const std::filesystem::path& path) {
    emit_csv(std::vector<CurveSeries>{series}, path);
}

std::vector<CurveSeries> read_csv(std::istream& is) {
    std::vector<std::string> f;
    if (!read_record(is, f) || f.size() != 5 || f[0] != "snr_db" || f[1] != "value" || f[2] != "std_error" ||
        f[3] != "method" || f[4] != "label")
        throw ConfigError(std::string("csv: header must be ") + kHeader);

    std::vector<CurveSeries> out;
    std::size_t line = 1;
    while (read_record(is, f)) {
        ++line;
        if (f.size() == 1 && f[0].empty()) continue;
        if (f.size() != 5) throw ConfigError("csv line " + std::to_string(line) + ": expected 5 fields");
        CurvePoint p;
        p.snr_db = parse_num(f[0], line);
        if (!f[1].empty()) p.value = parse_num(f[1], line);
        p.std_error = parse_num(f[2], line);
        p.method = f[3];
        auto it = std::find_if(out.begin(), out.end(), [&](const CurveSeries& s) { return s.label == f[4]; });
        if (it == out.end()) {
            out.push_back({f[4], {}});
            it = out.end() - 1;
        }
        it->points.push_back(std::move(p));
    }
    return out;
}

std::vector<CurveSeries> read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_csv(is);
}

}  // namespace rissk
