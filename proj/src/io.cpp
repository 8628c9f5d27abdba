// SPDX-License-Identifier: Apache-2.0
#include "oed/io.hpp"

#include <fstream>
#include <iomanip>

namespace oed::io {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("io: cannot open " + path.string() + " for writing");
  }
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Matrix& values,
                      const std::vector<std::string>& column_names) {
  require(static_cast<Index>(column_names.size()) == values.cols(),
          "write_matrix_csv: header size mismatch");
  std::ofstream out = open_for_write(path);
  for (std::size_t c = 0; c < column_names.size(); ++c) {
    out << (c ? "," : "") << column_names[c];
  }
  out << "\n";
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      out << (c ? "," : "") << values(r, c);
    }
    out << "\n";
  }
}

void write_field_csv(const std::filesystem::path& path, const Vector& field,
                     Index nx, Index ny) {
  require(field.size() == nx * ny, "write_field_csv: field size mismatch");
  Matrix grid(ny, nx);
  for (Index j = 0; j < ny; ++j) {
    grid.row(j) = field.segment(j * nx, nx).transpose();
  }
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(nx));
  for (Index i = 0; i < nx; ++i) names.push_back("c" + std::to_string(i));
  write_matrix_csv(path, grid, names);
}

void write_design_csv(const std::filesystem::path& path,
                      const std::vector<models::Point2>& coords,
                      const Vector& weights) {
  require(static_cast<Index>(coords.size()) == weights.size(),
          "write_design_csv: size mismatch");
  Matrix rows(weights.size(), 4);
  for (Index i = 0; i < weights.size(); ++i) {
    rows(i, 0) = static_cast<double>(i);
    rows(i, 1) = coords[static_cast<std::size_t>(i)].x;
    rows(i, 2) = coords[static_cast<std::size_t>(i)].y;
    rows(i, 3) = weights[i];
  }
  write_matrix_csv(path, rows, {"index", "x", "y", "weight"});
}

void write_time_design_csv(const std::filesystem::path& path,
                           const Vector& times, const Vector& weights) {
  require(times.size() == weights.size(), "write_time_design_csv: size mismatch");
  Matrix rows(times.size(), 3);
  for (Index i = 0; i < times.size(); ++i) {
    rows(i, 0) = static_cast<double>(i);
    rows(i, 1) = times[i];
    rows(i, 2) = weights[i];
  }
  write_matrix_csv(path, rows, {"index", "time", "weight"});
}

}  // namespace oed::io
