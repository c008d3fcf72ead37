#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slabcgo/grid.hpp"

namespace slabcgo {

/// RFC-4180-style CSV writer: one header row, one comment row describing the
/// quantity, then data rows. Doubles are printed with %.17g so identical runs
/// produce byte-identical files.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns,
              const std::string& quantity_note) {
        out_.open(path);
        if (!out_) throw std::runtime_error("cannot open " + path);
        out_ << "# " << quantity_note << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<double>& values) {
        char buf[40];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            out_ << buf << (i + 1 < values.size() ? "," : "\n");
        }
    }

  private:
    std::ofstream out_;
};

/// Flat binary field dump. Header: three u32 dims, three f64 spacings, one
/// u32 component count; body: interleaved complex doubles, little-endian,
/// index order (i, j, k) with k fastest and components innermost.
inline void dump_field(const GridField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    std::uint32_t dims[3] = {std::uint32_t(f.grid.n[0]), std::uint32_t(f.grid.n[1]),
                             std::uint32_t(f.grid.n[2])};
    double sp[3] = {f.grid.h.x, f.grid.h.y, f.grid.h.z};
    std::uint32_t nc = std::uint32_t(f.ncomp);
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(sp), sizeof sp);
    out.write(reinterpret_cast<const char*>(&nc), sizeof nc);
    out.write(reinterpret_cast<const char*>(f.data.data()), std::streamsize(f.data.size() * sizeof(cplx)));
}

inline GridField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::uint32_t dims[3];
    double sp[3];
    std::uint32_t nc;
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    in.read(reinterpret_cast<char*>(sp), sizeof sp);
    in.read(reinterpret_cast<char*>(&nc), sizeof nc);
    Grid3 g;
    g.n = {int(dims[0]), int(dims[1]), int(dims[2])};
    g.h = {sp[0], sp[1], sp[2]};
    GridField f(g, int(nc));
    in.read(reinterpret_cast<char*>(f.data.data()), std::streamsize(f.data.size() * sizeof(cplx)));
    if (!in) throw std::runtime_error("truncated field dump: " + path);
    return f;
}

/// Emits a small gnuplot script plotting chosen CSV columns.
inline void write_plot_script(const std::string& path, const std::string& csv,
                              const std::vector<std::pair<int, int>>& xy_columns,
                              bool loglog, const std::string& title) {
    std::ofstream out(path);
    out << "set datafile separator ','\n";
    out << "set key left\n";
    if (loglog) out << "set logscale xy\n";
    out << "set title '" << title << "'\n";
    out << "plot ";
    for (std::size_t i = 0; i < xy_columns.size(); ++i) {
        out << "'" << csv << "' using " << xy_columns[i].first << ":" << xy_columns[i].second
            << " with linespoints";
        if (i + 1 < xy_columns.size()) out << ", ";
    }
    out << "\n";
}

}  // namespace slabcgo
