#include "pairs/series.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pairs/errors.hpp"

namespace pairs {

namespace {

bool parse_iso_date(const std::string& s, int& y, int& m, int& d) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    y = std::stoi(s.substr(0, 4));
    m = std::stoi(s.substr(5, 2));
    d = std::stoi(s.substr(8, 2));
    return m >= 1 && m <= 12 && d >= 1 && d <= 31;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const std::array<int, 12> base{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : base[static_cast<std::size_t>(m - 1)];
}

double parse_price(const std::string& field, std::size_t line_no, const char* column) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        std::ostringstream msg;
        msg << "line " << line_no << ": malformed " << column << " value \"" << field << "\"";
        throw ValidationError(msg.str());
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "line " << line_no << ": nonpositive price in column " << column;
        throw ValidationError(msg.str());
    }
    return value;
}

}  // namespace

std::string add_days(const std::string& iso_date, int n) {
    int y, m, d;
    if (!parse_iso_date(iso_date, y, m, d)) throw ValidationError("bad ISO date " + iso_date);
    for (int i = 0; i < n; ++i) {
        if (++d > days_in_month(y, m)) {
            d = 1;
            if (++m > 12) {
                m = 1;
                ++y;
            }
        }
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

PriceSeries load_csv(const std::string& path, double dt) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open CSV file " + path);
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");

    PriceSeries s;
    s.dt = dt;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ValidationError("empty CSV file " + path);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,s1,s2")
        throw ValidationError("bad CSV header, expected exactly \"date,s1,s2\"");

    std::string prev_date;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected 3 comma-separated fields";
            throw ValidationError(msg.str());
        }
        const std::string date = line.substr(0, c1);
        int y, m, d;
        if (!parse_iso_date(date, y, m, d)) {
            std::ostringstream msg;
            msg << "line " << line_no << ": bad ISO-8601 date \"" << date << "\"";
            throw ValidationError(msg.str());
        }
        if (!prev_date.empty() && date <= prev_date) {
            std::ostringstream msg;
            msg << "line " << line_no << ": dates not strictly increasing";
            throw ValidationError(msg.str());
        }
        prev_date = date;

        s.dates.push_back(date);
        s.s1.push_back(parse_price(line.substr(c1 + 1, c2 - c1 - 1), line_no, "s1"));
        s.s2.push_back(parse_price(line.substr(c2 + 1), line_no, "s2"));
    }
    if (s.size() < 2) throw ValidationError("CSV must contain at least 2 rows of data");
    return s;
}

void save_csv(const std::string& path, const PriceSeries& series) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << "date,s1,s2\n";
    char buf[96];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n", series.dates[i].c_str(), series.s1[i],
                      series.s2[i]);
        out << buf;
    }
    if (!out) throw ValidationError("write failed for " + path);
}

PriceSeries series_from_path(const PricePath& path, const std::string& start_date) {
    PriceSeries s;
    s.dt = path.dt;
    const std::size_t n = path.x.size();
    s.dates.reserve(n);
    s.s1.reserve(n);
    s.s2.reserve(n);
    std::string date = start_date;
    for (std::size_t i = 0; i < n; ++i) {
        s.dates.push_back(date);
        s.s1.push_back(std::exp(path.x[i]));
        s.s2.push_back(std::exp(path.y[i]));
        date = add_days(date, 1);
    }
    return s;
}

}  // namespace pairs
