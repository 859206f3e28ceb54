// io.hpp: CSV tables with metadata headers and a minimal SVG line plot

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ccme/errors.hpp"

#ifndef CCME_VERSION
#define CCME_VERSION "1.0.0"
#endif

namespace ccme {

inline constexpr const char* kCodeVersion = CCME_VERSION;

/// Locale-independent, fixed-precision number formatting.
inline std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

struct CsvColumn {
    std::string name;
    std::string unit;  // printed in brackets in the header row
};

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<CsvColumn> columns;
    std::vector<std::vector<double>> rows;

    void add_meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }

    void add_row(std::vector<double> row)
    {
        if (row.size() != columns.size()) throw DimensionMismatch("CsvTable: row width does not match the header");
        rows.push_back(std::move(row));
    }

    std::vector<double> column(std::size_t c) const
    {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r.at(c));
        return out;
    }

    std::string str() const
    {
        std::ostringstream os;
        for (const auto& [k, v] : metadata) os << "# " << k << " = " << v << "\n";
        for (std::size_t c = 0; c < columns.size(); ++c) {
            os << (c ? "," : "") << columns[c].name << " [" << columns[c].unit << "]";
        }
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << format_number(r[c]);
            os << "\n";
        }
        return os.str();
    }
};

/// Writes through a temporary file and a rename so readers never see partial output.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// SVG

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
    std::vector<double> reference_lines;  // horizontal guides at these y values

    std::string svg() const;
};

namespace detail {

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string px(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double map(double v) const
    {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double t = log ? std::log10(v) : v;
        return b > a ? (t - a) / (b - a) : 0.5;
    }

    std::vector<double> ticks() const
    {
        std::vector<double> out;
        if (log) {
            for (int e = static_cast<int>(std::floor(std::log10(lo))); e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
                const double v = std::pow(10.0, e);
                if (v >= lo * (1 - 1e-12) && v <= hi * (1 + 1e-12)) out.push_back(v);
            }
            return out;
        }
        const double span = hi - lo;
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
        return out;
    }
};

inline Axis make_axis(const std::vector<const std::vector<double>*>& data, bool log, const std::vector<double>& extra = {})
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto take = [&](double v) {
        if (!std::isfinite(v) || (log && v <= 0.0)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    for (const auto* d : data) for (double v : *d) take(v);
    for (double v : extra) take(v);
    if (!std::isfinite(lo)) {
        lo = log ? 1.0 : 0.0;
        hi = log ? 10.0 : 1.0;
    }
    if (hi == lo) {
        if (log) {
            lo /= 2.0;
            hi *= 2.0;
        } else {
            const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
            lo -= pad;
            hi += pad;
        }
    } else if (!log) {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

} // namespace detail

inline std::string LinePlot::svg() const
{
    using detail::px;
    constexpr double width = 720, height = 460;
    constexpr double left = 80, right = 190, top = 40, bottom = 60;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#d62728", "#2ca02c", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    const detail::Axis ax = detail::make_axis(xs, log_x);
    const detail::Axis ay = detail::make_axis(ys, log_y, reference_lines);
    auto X = [&](double v) { return left + ax.map(v) * pw; };
    auto Y = [&](double v) { return top + (1.0 - ay.map(v)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << px(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << detail::xml_escape(title) << "</text>\n";
    os << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        os << "<line x1=\"" << px(X(t)) << "\" y1=\"" << px(top + ph) << "\" x2=\"" << px(X(t)) << "\" y2=\""
           << px(top + ph + 5) << "\" stroke=\"black\"/>";
        os << "<text x=\"" << px(X(t)) << "\" y=\"" << px(top + ph + 18) << "\" text-anchor=\"middle\">"
           << format_number(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        os << "<line x1=\"" << px(left - 5) << "\" y1=\"" << px(Y(t)) << "\" x2=\"" << px(left) << "\" y2=\"" << px(Y(t))
           << "\" stroke=\"black\"/>";
        os << "<text x=\"" << px(left - 8) << "\" y=\"" << px(Y(t) + 4) << "\" text-anchor=\"end\">" << format_number(t)
           << "</text>\n";
    }
    os << "<text x=\"" << px(left + pw / 2) << "\" y=\"" << px(height - 15) << "\" text-anchor=\"middle\">"
       << detail::xml_escape(x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << px(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << detail::xml_escape(y_label) << "</text>\n";
    for (double r : reference_lines) {
        if (log_y && r <= 0.0) continue;
        os << "<line x1=\"" << px(left) << "\" y1=\"" << px(Y(r)) << "\" x2=\"" << px(left + pw) << "\" y2=\"" << px(Y(r))
           << "\" stroke=\"#999999\"/>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = palette[k % 10];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
        if (s.dashed) os << " stroke-dasharray=\"6,4\"";
        os << " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((log_x && s.x[i] <= 0.0) || (log_y && s.y[i] <= 0.0)) continue;
            os << (first ? "" : " ") << px(X(s.x[i])) << "," << px(Y(s.y[i]));
            first = false;
        }
        os << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(k);
        os << "<line x1=\"" << px(left + pw + 10) << "\" y1=\"" << px(ly) << "\" x2=\"" << px(left + pw + 35) << "\" y2=\""
           << px(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
           << "/>";
        os << "<text x=\"" << px(left + pw + 40) << "\" y=\"" << px(ly + 4) << "\">" << detail::xml_escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace ccme
