#pragma once

// Deterministic artifact writers: CSV tables (comma-separated, '.' decimal
// point) and self-contained SVG line plots built from polylines only.
// Output bytes depend on nothing but the data, so repeated runs of a
// scenario produce identical files.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hjlb/numeric.hpp"

namespace hjlb {

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }

    void header(const std::vector<std::string>& names) { raw_row(names); }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (const double v : values) cells.push_back(format_double(v));
        raw_row(cells);
    }

    void raw_row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal SVG line plot; axes box plus one polyline per series.
inline void write_svg_lines(const std::string& path,
                            const std::vector<PlotSeries>& series, int width = 640,
                            int height = 420) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double mx = 50.0, my = 30.0;
    auto px = [&](double x) {
        return mx + (x - xmin) / (xmax - xmin) * (width - 2 * mx);
    };
    auto py = [&](double y) {
        return height - my - (y - ymin) / (ymax - ymin) * (height - 2 * my);
    };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                            "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<rect x=\"" << mx << "\" y=\"" << my << "\" width=\"" << width - 2 * mx
        << "\" height=\"" << height - 2 * my
        << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[k % 8]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            if (i) out << ' ';
            out << format_double(px(series[k].x[i])) << ','
                << format_double(py(series[k].y[i]));
        }
        out << "\"/>\n";
        out << "<text x=\"" << mx + 8 << "\" y=\"" << my + 16 + 16 * k
            << "\" fill=\"" << colors[k % 8] << "\" font-size=\"12\">"
            << series[k].label << "</text>\n";
    }
    out << "</svg>\n";
}

inline void ensure_dir(const std::string& dir) {
    std::filesystem::create_directories(dir);
}

// ---------------------------------------------------------------------------
// Field CSV: header row names the geometry, data rows carry (t, u_0 .. u_N).
//   xmin,xmax,cells,ntimes
//   <xmin>,<xmax>,<cells>,<ntimes>
//   t,u...                      (one row per stored level)

struct FieldCsv {
    double xmin = 0.0;
    double xmax = 1.0;
    int cells = 1;
    std::vector<double> times;
    std::vector<std::vector<double>> values;
};

inline void write_field_csv(const std::string& path, const FieldCsv& f) {
    CsvWriter w(path);
    w.header({"xmin", "xmax", "cells", "ntimes"});
    w.row({f.xmin, f.xmax, static_cast<double>(f.cells),
           static_cast<double>(f.times.size())});
    for (std::size_t k = 0; k < f.times.size(); ++k) {
        std::vector<double> row;
        row.reserve(f.values[k].size() + 1);
        row.push_back(f.times[k]);
        for (const double v : f.values[k]) row.push_back(v);
        w.row(row);
    }
}

inline FieldCsv read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open field CSV: " + path);
    FieldCsv f;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty field CSV");
    if (!std::getline(in, line)) throw std::runtime_error("truncated field CSV");
    {
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> head;
        while (std::getline(ss, tok, ',')) head.push_back(std::strtod(tok.c_str(), nullptr));
        if (head.size() != 4) throw std::runtime_error("bad field CSV header");
        f.xmin = head[0];
        f.xmax = head[1];
        f.cells = static_cast<int>(head[2]);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ss, tok, ',')) row.push_back(std::strtod(tok.c_str(), nullptr));
        if (row.size() != static_cast<std::size_t>(f.cells) + 2)
            throw std::runtime_error("bad field CSV row width");
        f.times.push_back(row[0]);
        f.values.emplace_back(row.begin() + 1, row.end());
    }
    return f;
}

}  // namespace hjlb
