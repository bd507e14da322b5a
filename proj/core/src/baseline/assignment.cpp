/*
 * Copyright 2026 The ACDC Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "acdc/baseline/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace acdc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Cost assigned to gated-out pairs; large enough that the optimum avoids them
// whenever any feasible alternative exists.
constexpr double kBlocked = 1e9;

// Potentials formulation over a (rows+1) x (cols+1) matrix with 1-based
// indexing; requires rows <= cols.
std::vector<int> hungarian(const std::vector<std::vector<double>>& a, int rows, int cols) {
  std::vector<double> u(rows + 1, 0.0), v(cols + 1, 0.0);
  std::vector<int> p(cols + 1, 0), way(cols + 1, 0);
  for (int i = 1; i <= rows; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(cols + 1, kInf);
    std::vector<char> used(cols + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= cols; ++j) {
        if (used[j]) continue;
        const double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= cols; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= cols; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

}  // namespace

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int rows = static_cast<int>(cost.size());
  if (rows == 0) return {};
  const int cols = static_cast<int>(cost[0].size());
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != cols)
      throw std::invalid_argument("solve_assignment: ragged cost matrix");
  if (cols == 0) return std::vector<int>(rows, -1);

  if (rows <= cols) return hungarian(cost, rows, cols);

  // More rows than columns: solve the transpose and invert the mapping.
  std::vector<std::vector<double>> t(cols, std::vector<double>(rows));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t[j][i] = cost[i][j];
  const std::vector<int> col_to_row = hungarian(t, cols, rows);
  std::vector<int> row_to_col(rows, -1);
  for (int j = 0; j < cols; ++j)
    if (col_to_row[j] >= 0) row_to_col[col_to_row[j]] = j;
  return row_to_col;
}

Association associate(const std::vector<cv::Point2d>& track_centers,
                      const std::vector<cv::Point2d>& detection_centers, double gate) {
  if (!(gate > 0)) throw std::invalid_argument("associate: gate must be > 0");
  const int n = static_cast<int>(track_centers.size());
  const int m = static_cast<int>(detection_centers.size());

  std::vector<std::vector<double>> cost(n, std::vector<double>(m));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double d = cv::norm(track_centers[i] - detection_centers[j]);
      cost[i][j] = d <= gate ? d : kBlocked;
    }

  const std::vector<int> row_to_col = solve_assignment(cost);

  Association out;
  std::vector<char> det_used(m, 0);
  for (int i = 0; i < n; ++i) {
    const int j = row_to_col[i];
    if (j >= 0 && cost[i][j] < kBlocked) {
      out.matches.emplace_back(i, j);
      det_used[j] = 1;
    } else {
      out.unmatched_tracks.push_back(i);
    }
  }
  for (int j = 0; j < m; ++j)
    if (!det_used[j]) out.unmatched_detections.push_back(j);
  return out;
}

}  // namespace acdc
