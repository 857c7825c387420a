#include "spectool/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace spectool::io {

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw IoError("fmt_double: conversion failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{})
        throw IoError("parse_double: not a number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);  // binary: no \r\n translation
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace

core::Spectrum read_spectrum(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 2) throw IoError(path.string() + ": spectrum file too short");
    const auto header = split(lines[0], ',');
    if (header.size() != 2) throw IoError(path.string() + ": malformed spectrum header");
    core::AxisUnit unit;
    if (header[0] == "wavelength_nm")
        unit = core::AxisUnit::Nanometer;
    else if (header[0] == "energy_eV")
        unit = core::AxisUnit::ElectronVolt;
    else
        throw IoError(path.string() + ": unknown axis unit '" + header[0] + "'");

    std::vector<double> axis, inten;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != 2) throw IoError(path.string() + ": malformed spectrum row");
        axis.push_back(parse_double(cells[0]));
        inten.push_back(parse_double(cells[1]));
    }
    try {
        return core::Spectrum(std::move(axis), std::move(inten), unit);
    } catch (const std::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_spectrum(const std::filesystem::path& path, const core::Spectrum& s) {
    auto out = open_out(path);
    out << (s.unit == core::AxisUnit::Nanometer ? "wavelength_nm" : "energy_eV") << ",intensity\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << fmt_double(s.axis[i]) << ',' << fmt_double(s.intensities[i]) << '\n';
}

GridData read_grid(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw IoError(path.string() + ": empty grid file");
    GridData g;
    for (const auto& line : lines) {
        const auto cells = split(line, ',');
        if (g.cols == 0)
            g.cols = static_cast<int>(cells.size());
        else if (static_cast<int>(cells.size()) != g.cols)
            throw IoError(path.string() + ": ragged grid row");
        for (const auto& c : cells) g.values.push_back(parse_double(c));
        ++g.rows;
    }
    return g;
}

void write_grid(const std::filesystem::path& path, const std::vector<double>& values, int rows,
                int cols) {
    auto out = open_out(path);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c) out << ',';
            out << fmt_double(values[static_cast<std::size_t>(r) * cols + c]);
        }
        out << '\n';
    }
}

core::CountTrace read_trace(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw IoError(path.string() + ": empty trace file");
    const auto header = split(lines[0], ',');
    if (header.size() != 2 || header[0] != "bin_width_s")
        throw IoError(path.string() + ": malformed trace header");
    core::CountTrace t;
    t.bin_width_s = parse_double(header[1]);
    for (std::size_t i = 1; i < lines.size(); ++i)
        t.counts.push_back(static_cast<std::int64_t>(std::llround(parse_double(lines[i]))));
    t.validate();
    return t;
}

void write_trace(const std::filesystem::path& path, const core::CountTrace& t) {
    auto out = open_out(path);
    out << "bin_width_s," << fmt_double(t.bin_width_s) << '\n';
    for (auto c : t.counts) out << c << '\n';
}

core::G2Histogram read_g2(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.size() < 3) throw IoError(path.string() + ": g2 file too short");
    const auto header = split(lines[0], ',');
    if (header.size() != 2 || header[0] != "bin_width_s")
        throw IoError(path.string() + ": malformed g2 header");
    core::G2Histogram g;
    g.bin_width_s = parse_double(header[1]);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != 2) throw IoError(path.string() + ": malformed g2 row");
        g.delays.push_back(parse_double(cells[0]));
        g.coincidences.push_back(parse_double(cells[1]));
    }
    g.validate();
    return g;
}

void write_g2(const std::filesystem::path& path, const core::G2Histogram& g) {
    auto out = open_out(path);
    out << "bin_width_s," << fmt_double(g.bin_width_s) << '\n';
    out << "delay_s,coincidences\n";
    for (std::size_t i = 0; i < g.delays.size(); ++i)
        out << fmt_double(g.delays[i]) << ',' << fmt_double(g.coincidences[i]) << '\n';
}

std::vector<fitting::TransitionSet> read_transitions(const std::filesystem::path& path,
                                                     std::size_t* skipped) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw IoError(path.string() + ": empty transitions file");
    if (lines[0] != "emitter_id,zpl_eV,transitions_eV")
        throw IoError(path.string() + ": malformed transitions header");
    std::vector<fitting::TransitionSet> sets;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        try {
            const auto cells = split(lines[i], ',');
            if (cells.size() != 3) throw IoError(path.string() + ": malformed transitions row");
            fitting::TransitionSet ts;
            ts.emitter_id = static_cast<int>(std::llround(parse_double(cells[0])));
            ts.zpl_energy = parse_double(cells[1]);
            if (!cells[2].empty())
                for (const auto& v : split(cells[2], ';'))
                    ts.transitions.push_back(parse_double(v));
            std::sort(ts.transitions.begin(), ts.transitions.end());
            for (std::size_t a = 0; a < ts.transitions.size(); ++a)
                for (std::size_t b = a + 1; b < ts.transitions.size(); ++b)
                    ts.pairwise_diffs.push_back(ts.transitions[b] - ts.transitions[a]);
            sets.push_back(std::move(ts));
        } catch (const IoError&) {
            if (!skipped) throw;
            ++*skipped;
        }
    }
    return sets;
}

void write_transitions(const std::filesystem::path& path,
                       const std::vector<fitting::TransitionSet>& sets) {
    auto out = open_out(path);
    out << "emitter_id,zpl_eV,transitions_eV\n";
    for (const auto& s : sets) {
        out << s.emitter_id << ',' << fmt_double(s.zpl_energy) << ',';
        for (std::size_t i = 0; i < s.transitions.size(); ++i) {
            if (i) out << ';';
            out << fmt_double(s.transitions[i]);
        }
        out << '\n';
    }
}

void write_density(const std::filesystem::path& path, const correlation::DensityMap& map) {
    auto out = open_out(path);
    out << "center_eV,value\n";
    for (std::size_t i = 0; i < map.centers.size(); ++i)
        out << fmt_double(map.centers[i]) << ',' << fmt_double(map.values[i]) << '\n';
}

void write_heatmap(const std::filesystem::path& path, const correlation::HeatMap& map) {
    auto out = open_out(path);
    out << "slice_eV\\density_eV";
    for (double c : map.density_centers) out << ',' << fmt_double(c);
    out << '\n';
    for (std::size_t r = 0; r < map.slice_centers.size(); ++r) {
        out << fmt_double(map.slice_centers[r]);
        for (double v : map.matrix[r]) out << ',' << fmt_double(v);
        out << '\n';
    }
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw IoError(path.string() + ": empty manifest");
    if (lines[0] != "id,ple,pl,trace,g2,opt_x,opt_y,saturation")
        throw IoError(path.string() + ": malformed manifest header");
    std::vector<ManifestEntry> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split(lines[i], ',');
        if (cells.size() != 8) throw IoError(path.string() + ": malformed manifest row");
        ManifestEntry e;
        e.id = static_cast<int>(std::llround(parse_double(cells[0])));
        e.ple = cells[1];
        e.pl = cells[2];
        e.trace = cells[3];
        e.g2 = cells[4];
        e.opt_x = cells[5];
        e.opt_y = cells[6];
        e.saturation = cells[7];
        out.push_back(std::move(e));
    }
    return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    auto out = open_out(path);
    out << "id,ple,pl,trace,g2,opt_x,opt_y,saturation\n";
    for (const auto& e : entries)
        out << e.id << ',' << e.ple << ',' << e.pl << ',' << e.trace << ',' << e.g2 << ','
            << e.opt_x << ',' << e.opt_y << ',' << e.saturation << '\n';
}

core::EmitterRecord load_record(const std::filesystem::path& base, const ManifestEntry& entry) {
    core::EmitterRecord rec;
    rec.id = entry.id;
    if (!entry.ple.empty()) rec.ple = read_spectrum(base / entry.ple);
    if (!entry.pl.empty()) rec.pl = read_spectrum(base / entry.pl);
    if (!entry.trace.empty()) rec.trace = read_trace(base / entry.trace);
    if (!entry.g2.empty()) rec.g2 = read_g2(base / entry.g2);
    if (!entry.opt_x.empty()) rec.optimization_traces.push_back(read_trace(base / entry.opt_x));
    if (!entry.opt_y.empty()) rec.optimization_traces.push_back(read_trace(base / entry.opt_y));
    if (!entry.saturation.empty()) rec.saturation = read_spectrum(base / entry.saturation);
    return rec;
}

}  // namespace spectool::io
