#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarorder {

// Equality-constrained feasibility: find x >= 0 with coefficients * x = rhs.
struct FeasibilityProblem {
  std::size_t variable_count = 0;
  std::vector<std::vector<double>> coefficients;
  std::vector<double> rhs;
};

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> solution;
};

class IterationLimitError : public std::runtime_error {
 public:
  explicit IterationLimitError(std::size_t limit)
      : std::runtime_error("simplex hit the iteration limit of " + std::to_string(limit) +
                           " without converging") {}
};

// Phase-1 simplex with Bland's rule. Artificials start basic; the problem is
// feasible iff their total can be driven below tol. Throws on the iteration
// cap instead of guessing an answer.
inline FeasibilityResult find_feasible_point(const FeasibilityProblem& p, double tol = 1e-9,
                                             std::size_t max_iterations = 0) {
  const std::size_t n = p.variable_count;
  const std::size_t m = p.coefficients.size();
  if (p.rhs.size() != m) throw std::invalid_argument("feasibility problem needs one rhs entry per row");
  for (const auto& row : p.coefficients) {
    if (row.size() != n) throw std::invalid_argument("feasibility row does not match variable count");
  }
  if (max_iterations == 0) max_iterations = 2000 + 50 * (n + m);

  constexpr double kPivotTol = 1e-11;
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m, std::vector<double>(width, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    double sign = p.rhs[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * p.coefficients[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = sign * p.rhs[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Reduced costs for minimizing the artificial total, kept in canonical form.
  std::vector<double> cost(width, 0.0);
  for (std::size_t j = 0; j < width; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += t[i][j];
    cost[j] = (j >= n && j < n + m ? 1.0 : 0.0) - s;
  }

  for (std::size_t iter = 0;; ++iter) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (cost[j] < -tol) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;
    if (iter == max_iterations) throw IterationLimitError(max_iterations);

    std::size_t leave = m;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= kPivotTol) continue;
      double ratio = t[i][n + m] / t[i][enter];
      if (leave == m || ratio < best_ratio - kPivotTol ||
          (std::abs(ratio - best_ratio) <= kPivotTol && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) break;  // bounded objective means this is numerical noise

    double piv = t[leave][enter];
    for (std::size_t j = 0; j < width; ++j) t[leave][j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      double f = t[i][enter];
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
    }
    double f = cost[enter];
    if (f != 0.0) {
      for (std::size_t j = 0; j < width; ++j) cost[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  double artificial_total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= n) artificial_total += t[i][n + m];
  }
  FeasibilityResult result;
  if (std::abs(artificial_total) > tol) return result;

  result.feasible = true;
  result.solution.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) result.solution[basis[i]] = std::max(t[i][n + m], 0.0);
  }
  return result;
}

}  // namespace polarorder
