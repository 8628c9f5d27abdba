// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "oed/types.hpp"

namespace oed::models {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Candidate sensor locations together with their extraction stencils on a
/// cell-centered uniform grid. Each sensor reads the field by bilinear
/// interpolation between the four nearest cell centers; the interpolation
/// weights of every sensor sum to one.
class SensorArray {
public:
  SensorArray(std::vector<Point2> coords, Index nx, Index ny, double length_x,
              double length_y);

  Index size() const { return static_cast<Index>(coords_.size()); }
  const std::vector<Point2>& coords() const { return coords_; }

  /// d = B u where u is the grid field (row-major, j*nx + i).
  Vector extract(const Vector& field) const;

  /// B^T d back onto the grid.
  Vector extract_transpose(const Vector& data) const;

  Index grid_size() const { return nx_ * ny_; }

private:
  struct Stencil {
    std::array<Index, 4> index;
    std::array<double, 4> weight;
  };

  std::vector<Point2> coords_;
  std::vector<Stencil> stencils_;
  Index nx_;
  Index ny_;
};

/// Regular ns_x-by-ns_y lattice of sensors inset from the domain boundary by
/// `margin` (as a fraction of each side length).
std::vector<Point2> sensor_lattice(Index ns_x, Index ns_y, double length_x,
                                   double length_y, double margin = 0.1);

}  // namespace oed::models
