#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "polarorder/channel.hpp"
#include "polarorder/delta.hpp"
#include "polarorder/simplex.hpp"

namespace polarorder {

struct CutThreshold {
  double delta = 0.0;
};

struct ViolationWitness {
  double t = 0.0;
  double stop_loss_left = 0.0;
  double stop_loss_right = 0.0;
};

struct OrderingVerdict {
  bool holds = false;
  std::string method;
  std::variant<std::monostate, CutThreshold, ViolationWitness, Kernel> witness;
};

namespace detail {

inline std::vector<double> support_union(const DeltaDistribution& x, const DeltaDistribution& y) {
  std::vector<double> knots;
  knots.reserve(x.size() + y.size());
  for (const Atom& a : x.atoms()) knots.push_back(a.value);
  for (const Atom& a : y.atoms()) knots.push_back(a.value);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  return knots;
}

// Stop-loss values of d at each knot, knots ascending. Suffix sweep keeps it
// linear and avoids cancellation from re-summing the full tail per knot.
inline std::vector<double> stop_loss_profile(const DeltaDistribution& d, const std::vector<double>& knots) {
  std::vector<double> out(knots.size(), 0.0);
  const auto& atoms = d.atoms();
  std::size_t i = atoms.size();
  CompensatedSum tail_w, tail_wv;
  for (std::size_t k = knots.size(); k-- > 0;) {
    while (i > 0 && atoms[i - 1].value > knots[k]) {
      --i;
      tail_w.add(atoms[i].weight);
      tail_wv.add(atoms[i].weight * atoms[i].value);
    }
    out[k] = tail_wv.value() - knots[k] * tail_w.value();
  }
  return out;
}

inline std::vector<double> cdf_profile(const DeltaDistribution& d, const std::vector<double>& knots) {
  std::vector<double> out(knots.size(), 0.0);
  const auto& atoms = d.atoms();
  std::size_t i = 0;
  CompensatedSum mass;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    while (i < atoms.size() && atoms[i].value <= knots[k]) {
      mass.add(atoms[i].weight);
      ++i;
    }
    out[k] = mass.value();
  }
  return out;
}

}  // namespace detail

// X precedes Y in the increasing convex order iff E[(X-t)+] <= E[(Y-t)+] for
// all t. Both stop-loss functions are piecewise linear with kinks only at
// support points, and their difference is constant left of the smallest knot
// and zero right of the largest, so checking the union of supports is exact.
// On failure the witness is the worst-violating threshold.
inline OrderingVerdict icx_check(const DeltaDistribution& x, const DeltaDistribution& y,
                                 double tol = kStochasticTol) {
  auto knots = detail::support_union(x, y);
  auto slx = detail::stop_loss_profile(x, knots);
  auto sly = detail::stop_loss_profile(y, knots);
  double worst = 0.0;
  std::size_t worst_k = knots.size();
  for (std::size_t k = 0; k < knots.size(); ++k) {
    double gap = slx[k] - sly[k];
    if (gap > worst) {
      worst = gap;
      worst_k = k;
    }
  }
  OrderingVerdict v;
  v.method = "icx";
  if (worst <= tol) {
    v.holds = true;
  } else {
    v.holds = false;
    v.witness = ViolationWitness{knots[worst_k], slx[worst_k], sly[worst_k]};
  }
  return v;
}

// Decreasing convex order: X dcv Y iff Y icx X.
inline OrderingVerdict dcv_check(const DeltaDistribution& x, const DeltaDistribution& y,
                                 double tol = kStochasticTol) {
  OrderingVerdict v = icx_check(y, x, tol);
  v.method = "dcv";
  return v;
}

// Convex order: equal means plus icx.
inline OrderingVerdict cx_check(const DeltaDistribution& x, const DeltaDistribution& y,
                                double mean_tol = kFeasibilityTol, double tol = kStochasticTol) {
  OrderingVerdict v;
  v.method = "cx";
  if (std::abs(x.mean() - y.mean()) > mean_tol) {
    v.holds = false;
    return v;
  }
  OrderingVerdict inner = icx_check(x, y, tol);
  v.holds = inner.holds;
  v.witness = std::move(inner.witness);
  return v;
}

// |Delta_V| icx |Delta_W|: the preserved comparison for symmetric convex
// functionals.
inline OrderingVerdict symmetric_convex_check(const DeltaDistribution& v_delta,
                                              const DeltaDistribution& w_delta,
                                              double tol = kStochasticTol) {
  OrderingVerdict v = icx_check(abs_distribution(v_delta), abs_distribution(w_delta), tol);
  v.method = "symmetric-convex";
  return v;
}

inline OrderingVerdict symmetric_convex_check(const Channel& v, const Channel& w,
                                              double tol = kStochasticTol) {
  return symmetric_convex_check(delta_distribution(v), delta_distribution(w), tol);
}

// Single-crossing test: X icx Y holds with threshold delta when
// mean(X) <= mean(Y) and F_X - F_Y changes sign at most once, from - to +,
// across the union of supports. More than one crossing is inconclusive, not
// a refutation.
inline OrderingVerdict cut_criterion(const DeltaDistribution& x, const DeltaDistribution& y,
                                     double tol = kStochasticTol) {
  OrderingVerdict v;
  double mx = x.mean(), my = y.mean();
  if (mx > my + tol) {
    v.holds = false;
    v.method = "cut";
    double t = std::min(x.min_value(), y.min_value());
    v.witness = ViolationWitness{t, mx - t, my - t};
    return v;
  }
  auto knots = detail::support_union(x, y);
  auto fx = detail::cdf_profile(x, knots);
  auto fy = detail::cdf_profile(y, knots);
  int seen_plus = -1;  // knot index of the first + sign
  bool single_crossing = true;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    double diff = fx[k] - fy[k];
    if (diff > tol) {
      if (seen_plus < 0) seen_plus = static_cast<int>(k);
    } else if (diff < -tol && seen_plus >= 0) {
      single_crossing = false;
      break;
    }
  }
  if (single_crossing) {
    v.holds = true;
    v.method = "cut";
    v.witness = CutThreshold{seen_plus >= 0 ? knots[seen_plus] : knots.back()};
  } else {
    v.holds = false;
    v.method = "cut-inconclusive";
  }
  return v;
}

// Exhibits V = P after W as an explicit kernel, or reports that none exists.
// Variables P(y|z) >= 0 with unit row sums and the two image constraints.
inline OrderingVerdict degradation_check(const Channel& w, const Channel& v,
                                         double tol = kFeasibilityTol) {
  const std::size_t nz = w.output_count();
  const std::size_t ny = v.output_count();
  FeasibilityProblem p;
  p.variable_count = nz * ny;
  auto var = [ny](std::size_t z, std::size_t y) { return z * ny + y; };
  for (std::size_t z = 0; z < nz; ++z) {
    std::vector<double> row(p.variable_count, 0.0);
    for (std::size_t y = 0; y < ny; ++y) row[var(z, y)] = 1.0;
    p.coefficients.push_back(std::move(row));
    p.rhs.push_back(1.0);
  }
  for (int input = 0; input < 2; ++input) {
    for (std::size_t y = 0; y < ny; ++y) {
      std::vector<double> row(p.variable_count, 0.0);
      for (std::size_t z = 0; z < nz; ++z) row[var(z, y)] = w.row(input)[z];
      p.coefficients.push_back(std::move(row));
      p.rhs.push_back(v.row(input)[y]);
    }
  }
  FeasibilityResult r = find_feasible_point(p, tol);
  OrderingVerdict verdict;
  verdict.method = "degradation";
  verdict.holds = r.feasible;
  if (r.feasible) {
    std::vector<std::vector<double>> rows(nz, std::vector<double>(ny, 0.0));
    for (std::size_t z = 0; z < nz; ++z) {
      double sum = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        rows[z][y] = std::max(r.solution[var(z, y)], 0.0);
        sum += rows[z][y];
      }
      if (std::abs(sum - 1.0) > tol) {
        throw std::runtime_error("degradation witness row drifted off stochastic by " +
                                 detail::format_double(sum - 1.0));
      }
      for (std::size_t y = 0; y < ny; ++y) rows[z][y] /= sum;
    }
    verdict.witness = Kernel(w.output_labels(), v.output_labels(), std::move(rows));
  }
  return verdict;
}

// Mean-preserving kernel from supp(X) to supp(Y): rows stochastic, row z has
// barycenter x_z, and pushing the X weights through lands on the Y weights.
// One exists iff X cx Y.
inline std::optional<Kernel> find_mean_preserving_kernel(const DeltaDistribution& x,
                                                         const DeltaDistribution& y,
                                                         double tol = kFeasibilityTol) {
  const auto& xa = x.atoms();
  const auto& ya = y.atoms();
  const std::size_t nx = xa.size();
  const std::size_t ny = ya.size();
  FeasibilityProblem p;
  p.variable_count = nx * ny;
  auto var = [ny](std::size_t i, std::size_t j) { return i * ny + j; };
  for (std::size_t i = 0; i < nx; ++i) {
    std::vector<double> row(p.variable_count, 0.0);
    for (std::size_t j = 0; j < ny; ++j) row[var(i, j)] = 1.0;
    p.coefficients.push_back(std::move(row));
    p.rhs.push_back(1.0);
  }
  for (std::size_t i = 0; i < nx; ++i) {
    std::vector<double> row(p.variable_count, 0.0);
    for (std::size_t j = 0; j < ny; ++j) row[var(i, j)] = ya[j].value;
    p.coefficients.push_back(std::move(row));
    p.rhs.push_back(xa[i].value);
  }
  for (std::size_t j = 0; j < ny; ++j) {
    std::vector<double> row(p.variable_count, 0.0);
    for (std::size_t i = 0; i < nx; ++i) row[var(i, j)] = xa[i].weight;
    p.coefficients.push_back(std::move(row));
    p.rhs.push_back(ya[j].weight);
  }
  FeasibilityResult r = find_feasible_point(p, tol);
  if (!r.feasible) return std::nullopt;

  auto label = [](double v) { return detail::format_double(v); };
  std::vector<std::string> in_labels, out_labels;
  for (const Atom& a : xa) in_labels.push_back(label(a.value));
  for (const Atom& a : ya) out_labels.push_back(label(a.value));
  std::vector<std::vector<double>> rows(nx, std::vector<double>(ny, 0.0));
  for (std::size_t i = 0; i < nx; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      rows[i][j] = std::max(r.solution[var(i, j)], 0.0);
      sum += rows[i][j];
    }
    for (std::size_t j = 0; j < ny; ++j) rows[i][j] /= sum;
  }
  return Kernel(std::move(in_labels), std::move(out_labels), std::move(rows));
}

// Smallest erasure probability whose erasure channel the variational
// criterion places above W: eps = 1 - E|Delta_W|.
inline double dominating_bec_variational(const Channel& w) {
  double eps = 1.0 - abs_distribution(delta_distribution(w)).mean();
  return std::clamp(eps, 0.0, 1.0);
}

// Same via the Bhattacharyya route: eps = E[sqrt(1 - Delta_W^2)].
inline double dominating_bec_bhattacharyya(const Channel& w) {
  double eps = b_distribution(delta_distribution(w)).mean();
  return std::clamp(eps, 0.0, 1.0);
}

// Smallest t in [lo, hi] with pred(t) true, to within resolution. pred must
// be monotone (false below the threshold, true above).
template <typename Pred>
double threshold_bisect(double lo, double hi, double resolution, Pred&& pred) {
  if (!(resolution > 0.0)) throw std::invalid_argument("bisection resolution must be positive");
  if (!(lo <= hi)) throw std::invalid_argument("bisection interval is empty");
  if (pred(lo)) return lo;
  if (!pred(hi)) return hi;
  while (hi - lo > resolution) {
    double mid = lo + (hi - lo) / 2.0;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace polarorder
