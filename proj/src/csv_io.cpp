#include "spenra/csv_io.hpp"

#include "spenra/error.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace spenra {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    if (field.empty()) return false;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

}  // namespace

Series read_series_csv(std::istream& in, std::string label) {
    std::vector<double> values;
    std::vector<double> times;
    std::size_t columns = 0;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto fields = split_commas(view);
        if (columns == 0) columns = fields.size();
        if (fields.size() != columns || columns > 2) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(columns == 0 ? 1 : columns) +
                                                   " column(s) (value or time,value)");
        }
        if (header_allowed) {
            header_allowed = false;
            const bool header = columns == 1 ? fields[0] == "value" : (fields[0] == "time" && fields[1] == "value");
            if (header) continue;
        }
        std::array<double, 2> parsed{};
        for (std::size_t c = 0; c < columns; ++c) {
            if (!parse_double(fields[c], parsed[c])) {
                throw Error(ErrorCode::ParseError,
                            "line " + std::to_string(line_no) + ": cannot parse '" + std::string(fields[c]) + "'");
            }
        }
        if (columns == 1) {
            values.push_back(parsed[0]);
        } else {
            times.push_back(parsed[0]);
            values.push_back(parsed[1]);
        }
    }
    if (values.empty()) {
        throw Error(ErrorCode::TooShort, "input contains no data rows");
    }
    if (columns == 2) return Series(std::move(values), std::move(times), std::move(label));
    return Series(std::move(values), std::nullopt, std::move(label));
}

Series read_series_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    }
    return read_series_csv(in, path.filename().string());
}

std::string format_full(double x) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), ptr);
}

std::string format_short(double x) {
    std::array<char, 64> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.6g", x);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

void write_trailers(std::ostream& out, const Trailers& trailers) {
    for (const auto& [key, value] : trailers) {
        out << "# " << key << '=' << value << '\n';
    }
}

void write_series_csv(std::ostream& out, const Series& s, const Trailers& trailers) {
    const auto v = s.values();
    if (s.has_timestamps()) {
        const auto ts = s.timestamps();
        out << "time,value\n";
        for (std::size_t i = 0; i < v.size(); ++i) out << format_full(ts[i]) << ',' << format_full(v[i]) << '\n';
    } else {
        out << "value\n";
        for (double x : v) out << format_full(x) << '\n';
    }
    write_trailers(out, trailers);
}

}  // namespace spenra
