#pragma once

#include <Eigen/Dense>

namespace nbp::detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// P(l, j) = int hat_j(r) r / sqrt(t_l^2 - r^2) dr over [0, t_l] for the unit
/// r grid r_j = j and times t_l = l * ratio (ratio a positive integer, so every
/// cell ends on or before t_l). hat_j is the piecewise-linear basis function of
/// node j. Rows l = 0 .. rows - 1, columns j = 0 .. cols - 1.
RowMatrix hat_abel_weights(int rows, int cols, int ratio);

/// Weight of sample j + 1 in the right-endpoint product rule on the unit grid:
/// (sqrt((j+1)^2 - l^2) - sqrt(j^2 - l^2)) / (j + 1), zero for j < l.
double step_abel_weight(int l, int j);

/// Moments of the cell [j, j+1] (j >= l) against the weight t / sqrt(t^2 - l^2)
/// on the unit grid, split onto the linear basis at both ends:
/// left = int (j + 1 - t) w dt, right = int (t - j) w dt.
void linear_abel_cell(int l, int j, double& left, double& right);

}  // namespace nbp::detail
