#include "swingreach/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace swingreach::io {

std::string format_double(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

double parse_double(std::string_view token) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw std::invalid_argument("parse_double: bad number '" + std::string(token) + "'");
    }
    return value;
}

long parse_long(std::string_view token) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw std::invalid_argument("parse_long: bad integer '" + std::string(token) + "'");
    }
    return value;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

std::string field_to_csv(const ScalarField& field) {
    const GridSpec& g = field.spec();
    std::string out = "delta_min,delta_max,omega_min,omega_max,n_delta,n_omega\n";
    out += format_double(g.delta_min) + ',' + format_double(g.delta_max) + ',' +
           format_double(g.omega_min) + ',' + format_double(g.omega_max) + ',' +
           std::to_string(g.n_delta) + ',' + std::to_string(g.n_omega) + '\n';
    for (int i = 0; i < g.n_delta; ++i) {
        for (int j = 0; j < g.n_omega; ++j) {
            out += format_double(field.at(i, j));
            out += (j + 1 < g.n_omega) ? ',' : '\n';
        }
    }
    return out;
}

ScalarField field_from_csv(std::string_view text) {
    auto lines = split(text, '\n');
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.size() < 3) throw std::invalid_argument("field_from_csv: truncated input");
    auto header = split(lines[1], ',');
    if (header.size() != 6) throw std::invalid_argument("field_from_csv: bad header row");
    GridSpec g;
    g.delta_min = parse_double(header[0]);
    g.delta_max = parse_double(header[1]);
    g.omega_min = parse_double(header[2]);
    g.omega_max = parse_double(header[3]);
    g.n_delta = static_cast<int>(parse_long(header[4]));
    g.n_omega = static_cast<int>(parse_long(header[5]));
    g.validate();
    if (lines.size() != 2 + static_cast<std::size_t>(g.n_delta)) {
        throw std::invalid_argument("field_from_csv: row count does not match n_delta");
    }
    std::vector<double> values;
    values.reserve(g.node_count());
    for (int i = 0; i < g.n_delta; ++i) {
        auto row = split(lines[2 + i], ',');
        if (row.size() != static_cast<std::size_t>(g.n_omega)) {
            throw std::invalid_argument("field_from_csv: row width does not match n_omega");
        }
        for (auto cell : row) values.push_back(parse_double(cell));
    }
    return ScalarField(g, std::move(values));
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
    write_text_file(path, field_to_csv(field));
}

ScalarField read_field_csv(const std::filesystem::path& path) {
    return field_from_csv(read_text_file(path));
}

nlohmann::json contour_to_json(const Contour& contour) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& line : contour.polylines) {
        nlohmann::json pts = nlohmann::json::array();
        for (const State& p : line) {
            pts.push_back({p.delta, p.omega});
        }
        lines.push_back(std::move(pts));
    }
    return lines;
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "t,delta,omega,d,relay\n";
    for (const Sample& s : traj.samples) {
        out += format_double(s.t) + ',' + format_double(s.state.delta) + ',' +
               format_double(s.state.omega) + ',' + format_double(s.d) + ',' +
               (s.relay == RelayStatus::Closed ? "1" : "0") + '\n';
    }
    return out;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    write_text_file(path, trajectory_to_csv(traj));
}

std::string attack_signal_csv(const Trajectory& traj) {
    std::string out = "t,d\n";
    for (const Sample& s : traj.samples) {
        out += format_double(s.t) + ',' + format_double(s.d) + '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return std::move(ss).str();
}

}  // namespace swingreach::io
