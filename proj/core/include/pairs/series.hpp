// series.hpp
// Two-asset daily price series, CSV ingestion and export. The file format is
// a UTF-8 CSV with header exactly `date,s1,s2`, ISO-8601 dates, '.' decimals.

#pragma once

#include <string>
#include <vector>

#include "pairs/simulate.hpp"

namespace pairs {

struct PriceSeries {
    std::vector<std::string> dates;  // ISO-8601, strictly increasing
    std::vector<double> s1;
    std::vector<double> s2;
    double dt = 1.0 / 251.0;  // years per observation

    std::size_t size() const { return s1.size(); }
    double span() const { return static_cast<double>(size()) * dt; }
};

// Parses and validates; errors carry the offending line number. dt defaults
// to one trading day (1/251 years) per row unless overridden.
PriceSeries load_csv(const std::string& path, double dt = 1.0 / 251.0);

void save_csv(const std::string& path, const PriceSeries& series);

// Wraps a simulated log-price path as a price series with synthetic
// consecutive calendar dates, matching the backtester input format exactly.
PriceSeries series_from_path(const PricePath& path, const std::string& start_date = "2013-01-02");

// "YYYY-MM-DD" plus n calendar days (Gregorian).
std::string add_days(const std::string& iso_date, int n);

}  // namespace pairs
