// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oed/models/sensors.hpp"
#include "oed/types.hpp"

namespace oed::io {

/// CSV with a header row; data rows are written row-major.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& values,
                      const std::vector<std::string>& column_names);

/// Grid field as an ny-row, nx-column CSV (header row c0..c{nx-1}).
void write_field_csv(const std::filesystem::path& path, const Vector& field,
                     Index nx, Index ny);

/// Sensor design as (index, x, y, weight) rows.
void write_design_csv(const std::filesystem::path& path,
                      const std::vector<models::Point2>& coords,
                      const Vector& weights);

/// Observation-time design as (index, time, weight) rows.
void write_time_design_csv(const std::filesystem::path& path,
                           const Vector& times, const Vector& weights);

}  // namespace oed::io
