#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "swingreach/grid.hpp"
#include "swingreach/plant.hpp"

namespace swingreach::io {

/// Shortest decimal rendering that parses back to the same double.
std::string format_double(double x);

/// Strict full-token parse. Throws std::invalid_argument on junk.
double parse_double(std::string_view token);
long parse_long(std::string_view token);

// Field CSV layout:
//   line 1: delta_min,delta_max,omega_min,omega_max,n_delta,n_omega
//   line 2: the six values, same order
//   then one row per delta index with n_omega comma-separated values.
std::string field_to_csv(const ScalarField& field);
ScalarField field_from_csv(std::string_view text);

void write_field_csv(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_field_csv(const std::filesystem::path& path);

/// JSON array of polylines, each an array of [delta, omega] pairs.
nlohmann::json contour_to_json(const Contour& contour);

/// Columns t,delta,omega,d,relay with relay encoded 1=closed, 0=open.
std::string trajectory_to_csv(const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Columns t,d only (the injected signal over time).
std::string attack_signal_csv(const Trajectory& traj);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace swingreach::io
