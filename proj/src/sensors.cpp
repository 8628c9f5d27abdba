// SPDX-License-Identifier: Apache-2.0
#include "oed/models/sensors.hpp"

#include <algorithm>
#include <cmath>

namespace oed::models {

SensorArray::SensorArray(std::vector<Point2> coords, Index nx, Index ny,
                         double length_x, double length_y)
    : coords_(std::move(coords)), nx_(nx), ny_(ny) {
  require(nx_ >= 2 && ny_ >= 2, "SensorArray: grid must be at least 2x2");
  require(!coords_.empty(), "SensorArray: need at least one sensor");
  const double hx = length_x / static_cast<double>(nx_);
  const double hy = length_y / static_cast<double>(ny_);

  stencils_.reserve(coords_.size());
  for (const Point2& p : coords_) {
    require(p.x > 0.0 && p.x < length_x && p.y > 0.0 && p.y < length_y,
            "SensorArray: sensor must lie strictly inside the domain");
    // Cell centers sit at ((i+1/2)hx, (j+1/2)hy). Clamp to the center strip so
    // boundary-adjacent sensors interpolate between the nearest interior
    // centers (weights still sum to one).
    const double sx = std::clamp(p.x / hx - 0.5, 0.0,
                                 static_cast<double>(nx_ - 1) - 1e-12);
    const double sy = std::clamp(p.y / hy - 0.5, 0.0,
                                 static_cast<double>(ny_ - 1) - 1e-12);
    const Index i0 = static_cast<Index>(std::floor(sx));
    const Index j0 = static_cast<Index>(std::floor(sy));
    const double tx = sx - static_cast<double>(i0);
    const double ty = sy - static_cast<double>(j0);

    Stencil s;
    s.index = {j0 * nx_ + i0, j0 * nx_ + i0 + 1, (j0 + 1) * nx_ + i0,
               (j0 + 1) * nx_ + i0 + 1};
    s.weight = {(1.0 - tx) * (1.0 - ty), tx * (1.0 - ty), (1.0 - tx) * ty,
                tx * ty};
    stencils_.push_back(s);
  }
}

Vector SensorArray::extract(const Vector& field) const {
  require(field.size() == grid_size(), "SensorArray::extract: dimension mismatch");
  Vector data(size());
  for (Index k = 0; k < size(); ++k) {
    const Stencil& s = stencils_[static_cast<std::size_t>(k)];
    double value = 0.0;
    for (int c = 0; c < 4; ++c) value += s.weight[c] * field[s.index[c]];
    data[k] = value;
  }
  return data;
}

Vector SensorArray::extract_transpose(const Vector& data) const {
  require(data.size() == size(), "SensorArray::extract_transpose: dimension mismatch");
  Vector field = Vector::Zero(grid_size());
  for (Index k = 0; k < size(); ++k) {
    const Stencil& s = stencils_[static_cast<std::size_t>(k)];
    for (int c = 0; c < 4; ++c) field[s.index[c]] += s.weight[c] * data[k];
  }
  return field;
}

std::vector<Point2> sensor_lattice(Index ns_x, Index ns_y, double length_x,
                                   double length_y, double margin) {
  require(ns_x >= 1 && ns_y >= 1, "sensor_lattice: counts must be >= 1");
  require(margin > 0.0 && margin < 0.5, "sensor_lattice: margin in (0, 0.5)");
  std::vector<Point2> coords;
  coords.reserve(static_cast<std::size_t>(ns_x * ns_y));
  for (Index j = 0; j < ns_y; ++j) {
    for (Index i = 0; i < ns_x; ++i) {
      const double fx = ns_x == 1 ? 0.5
                                  : margin + (1.0 - 2.0 * margin) *
                                                 static_cast<double>(i) /
                                                 static_cast<double>(ns_x - 1);
      const double fy = ns_y == 1 ? 0.5
                                  : margin + (1.0 - 2.0 * margin) *
                                                 static_cast<double>(j) /
                                                 static_cast<double>(ns_y - 1);
      coords.push_back({fx * length_x, fy * length_y});
    }
  }
  return coords;
}

}  // namespace oed::models
