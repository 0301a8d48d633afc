#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreadnet/dynamics.hpp"
#include "spreadnet/types.hpp"

namespace spreadnet {

/// Densities are printed with 9 significant digits everywhere, so exported
/// files are stable golden-test inputs.
inline std::string format_density(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

/// Trace CSV schema: step,r_percent,s,i,phase. r_percent maps the step onto
/// the spreading progress R = 100*t/t_f; the phase column flips to confirmed
/// at t_a exactly.
inline void write_trace_csv(std::ostream& os, const SpreadTrace& trace) {
    os << "step,r_percent,s,i,phase\n";
    const std::size_t last = trace.steps() - 1;
    const std::size_t t_f = trace.end_step.value_or(last);
    const double denom = t_f > 0 ? static_cast<double>(t_f) : 1.0;
    for (std::size_t t = 0; t < trace.steps(); ++t) {
        const double r = 100.0 * static_cast<double>(t) / denom;
        const double i = trace.known_density[t];
        const bool confirmed = trace.announce_step && t >= *trace.announce_step;
        os << t << ',' << format_density(r) << ',' << format_density(1.0 - i) << ','
           << format_density(i) << ',' << (confirmed ? "confirmed" : "unconfirmed") << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    return fields;
}

inline double parse_double(const std::string& s, const std::string& context) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(context + ": cannot parse number '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument(context + ": trailing garbage in '" + s + "'");
    return v;
}

}  // namespace detail

/// Parse a trace CSV back into a SpreadTrace (t_a recovered from the phase
/// column, t_f left unset — it is derived data).
inline SpreadTrace read_trace_csv(std::istream& is, const std::string& context = "trace csv") {
    std::string line;
    if (!std::getline(is, line) || line != "step,r_percent,s,i,phase")
        throw std::invalid_argument(context + ": bad or missing header");
    SpreadTrace trace;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 5) throw std::invalid_argument(context + ": expected 5 columns");
        trace.known_density.push_back(detail::parse_double(f[3], context));
        if (f[4] == "confirmed") {
            if (!trace.announce_step) trace.announce_step = trace.known_density.size() - 1;
        } else if (f[4] != "unconfirmed") {
            throw std::invalid_argument(context + ": unknown phase '" + f[4] + "'");
        }
    }
    if (trace.known_density.empty()) throw std::invalid_argument(context + ": no data rows");
    return trace;
}

/// External comparison series: spreading progress in percent against known
/// density, as exported by other tooling. CSV schema: r_percent,density.
struct ExternalSeries {
    std::vector<double> r_percent;
    std::vector<double> density;
};

inline ExternalSeries read_external_series_csv(std::istream& is,
                                               const std::string& context = "external series") {
    std::string line;
    if (!std::getline(is, line) || line != "r_percent,density")
        throw std::invalid_argument(context + ": expected header 'r_percent,density'");
    ExternalSeries series;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 2) throw std::invalid_argument(context + ": expected 2 columns");
        series.r_percent.push_back(detail::parse_double(f[0], context));
        series.density.push_back(detail::parse_double(f[1], context));
    }
    if (series.r_percent.empty()) throw std::invalid_argument(context + ": no data rows");
    return series;
}

inline void write_external_series_csv(std::ostream& os, const ExternalSeries& series) {
    os << "r_percent,density\n";
    for (std::size_t j = 0; j < series.r_percent.size(); ++j)
        os << format_density(series.r_percent[j]) << ',' << format_density(series.density[j])
           << '\n';
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    return os;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");
    return is;
}

}  // namespace spreadnet
