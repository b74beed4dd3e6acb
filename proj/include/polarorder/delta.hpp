#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polarorder {

inline constexpr double kStochasticTol = 1e-12;
inline constexpr double kDefaultMergeTol = 1e-12;
inline constexpr double kBranchWeightCutoff = 1e-15;
inline constexpr double kFeasibilityTol = 1e-9;
inline constexpr std::size_t kDefaultBudget = 256;
inline constexpr std::size_t kDefaultAtomCap = 1000000;

namespace detail {

// Neumaier variant of Kahan summation. Weight vectors here are tiny, but the
// canonical-form validation runs after every transform step and must not
// accumulate drift across levels.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

struct Atom {
  double value = 0.0;
  double weight = 0.0;
};

// Finitely supported probability distribution on [-1, 1]. Always held in
// canonical form: atoms sorted by value, strictly positive weights, values
// pairwise distinct, total weight 1 within kStochasticTol.
class DeltaDistribution {
 public:
  DeltaDistribution() : atoms_{{0.0, 1.0}} {}

  explicit DeltaDistribution(std::vector<Atom> atoms, double merge_tol = 0.0) {
    canonicalize(std::move(atoms), merge_tol);
  }

  static DeltaDistribution point_mass(double value) {
    return DeltaDistribution({{value, 1.0}});
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  double min_value() const { return atoms_.front().value; }
  double max_value() const { return atoms_.back().value; }

  double mean() const {
    detail::CompensatedSum s;
    for (const Atom& a : atoms_) s.add(a.weight * a.value);
    return s.value();
  }

  // P(X <= x)
  double cdf_at(double x) const {
    detail::CompensatedSum s;
    for (const Atom& a : atoms_) {
      if (a.value > x) break;
      s.add(a.weight);
    }
    return s.value();
  }

  // E[(X - t)+]
  double stop_loss(double t) const {
    detail::CompensatedSum s;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
      if (it->value <= t) break;
      s.add(it->weight * (it->value - t));
    }
    return s.value();
  }

  friend bool operator==(const DeltaDistribution& a, const DeltaDistribution& b) {
    if (a.atoms_.size() != b.atoms_.size()) return false;
    for (std::size_t i = 0; i < a.atoms_.size(); ++i) {
      if (a.atoms_[i].value != b.atoms_[i].value) return false;
      if (a.atoms_[i].weight != b.atoms_[i].weight) return false;
    }
    return true;
  }

 private:
  void canonicalize(std::vector<Atom> atoms, double merge_tol) {
    if (atoms.empty()) throw std::invalid_argument("distribution needs at least one atom");
    for (const Atom& a : atoms) {
      if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
        throw std::invalid_argument("atom weight " + detail::format_double(a.weight) +
                                    " is negative or not finite");
      }
      if (!std::isfinite(a.value) || std::abs(a.value) > 1.0 + kStochasticTol) {
        throw std::invalid_argument("atom value " + detail::format_double(a.value) +
                                    " lies outside [-1, 1]");
      }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });

    atoms_.clear();
    atoms_.reserve(atoms.size());
    // Chained grouping: consecutive atoms whose values differ by <= merge_tol
    // collapse to one atom at their weight-averaged value.
    std::size_t i = 0;
    while (i < atoms.size()) {
      std::size_t j = i;
      double w = 0.0, wv = 0.0;
      double prev = atoms[i].value;
      while (j < atoms.size() && atoms[j].value - prev <= merge_tol) {
        w += atoms[j].weight;
        wv += atoms[j].weight * atoms[j].value;
        prev = atoms[j].value;
        ++j;
      }
      if (w > 0.0) {
        double v = wv / w;
        atoms_.push_back({std::clamp(v, -1.0, 1.0), w});
      }
      i = j;
    }
    if (atoms_.empty()) throw std::invalid_argument("all atoms have zero weight");

    detail::CompensatedSum total;
    for (const Atom& a : atoms_) total.add(a.weight);
    double t = total.value();
    if (std::abs(t - 1.0) > kStochasticTol) {
      throw std::invalid_argument("atom weights sum to " + detail::format_double(t) +
                                  ", expected 1 within " + detail::format_double(kStochasticTol));
    }
  }

  std::vector<Atom> atoms_;
};

inline DeltaDistribution merge(const DeltaDistribution& d, double tol = kDefaultMergeTol) {
  if (tol < 0.0) throw std::invalid_argument("merge tolerance must be nonnegative");
  return DeltaDistribution(d.atoms(), tol);
}

inline DeltaDistribution abs_distribution(const DeltaDistribution& d) {
  std::vector<Atom> out;
  out.reserve(d.size());
  for (const Atom& a : d.atoms()) out.push_back({std::abs(a.value), a.weight});
  return DeltaDistribution(std::move(out));
}

// Pointwise map x -> sqrt(1 - x^2), the Bhattacharyya profile of an atom.
inline DeltaDistribution b_distribution(const DeltaDistribution& d) {
  std::vector<Atom> out;
  out.reserve(d.size());
  for (const Atom& a : d.atoms()) {
    double s = 1.0 - a.value * a.value;
    out.push_back({std::sqrt(std::max(s, 0.0)), a.weight});
  }
  return DeltaDistribution(std::move(out), kDefaultMergeTol);
}

// Greedy pair-merge quantizer: repeatedly merges the adjacent pair whose
// collapse to the conditional mean costs the least in E[X^2], until at most
// `budget` atoms remain. The result is a conditional expectation of the
// input, so it precedes the input in the convex order.
inline DeltaDistribution quantize(const DeltaDistribution& d, std::size_t budget) {
  if (budget == 0) throw std::invalid_argument("quantizer budget must be at least 1");
  if (d.size() <= budget) return d;

  struct Cluster {
    double w;
    double wv;
    std::size_t left = 0, right = 0;  // neighbour indices
    std::uint32_t version = 0;
    bool alive = true;
    double value() const { return wv / w; }
  };
  std::vector<Cluster> cl(d.size());
  const auto& atoms = d.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    cl[i].w = atoms[i].weight;
    cl[i].wv = atoms[i].weight * atoms[i].value;
    cl[i].left = (i == 0) ? i : i - 1;
    cl[i].right = i + 1;  // == size() means none
  }

  struct Candidate {
    double cost;
    std::size_t a, b;  // merge clusters a and b (a left of b)
    std::uint32_t va, vb;
    bool operator>(const Candidate& o) const {
      if (cost != o.cost) return cost > o.cost;
      return a > o.a;
    }
  };
  auto pair_cost = [&](std::size_t a, std::size_t b) {
    double diff = cl[b].value() - cl[a].value();
    return cl[a].w * cl[b].w / (cl[a].w + cl[b].w) * diff * diff;
  };
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap;
  for (std::size_t i = 0; i + 1 < cl.size(); ++i) {
    heap.push({pair_cost(i, i + 1), i, i + 1, 0, 0});
  }

  std::size_t remaining = cl.size();
  while (remaining > budget) {
    Candidate c = heap.top();
    heap.pop();
    if (!cl[c.a].alive || !cl[c.b].alive) continue;
    if (cl[c.a].version != c.va || cl[c.b].version != c.vb) continue;

    cl[c.a].w += cl[c.b].w;
    cl[c.a].wv += cl[c.b].wv;
    cl[c.a].version++;
    cl[c.b].alive = false;
    cl[c.a].right = cl[c.b].right;
    if (cl[c.a].right < cl.size()) cl[cl[c.a].right].left = c.a;
    --remaining;
    if (remaining == budget) break;

    if (c.a > 0 && cl[c.a].left != c.a) {
      std::size_t l = cl[c.a].left;
      heap.push({pair_cost(l, c.a), l, c.a, cl[l].version, cl[c.a].version});
    }
    if (cl[c.a].right < cl.size()) {
      std::size_t r = cl[c.a].right;
      heap.push({pair_cost(c.a, r), c.a, r, cl[c.a].version, cl[r].version});
    }
  }

  std::vector<Atom> out;
  out.reserve(remaining);
  for (const Cluster& c : cl) {
    if (c.alive) out.push_back({c.value(), c.w});
  }
  return DeltaDistribution(std::move(out));
}

// Convex nondecreasing functional on [0, 1] with phi(0) = 0, phi(1) = 1,
// applied to |delta| when evaluated against a distribution.
class Functional {
 public:
  Functional() : Functional(variational()) {}

  const std::string& name() const { return name_; }

  double operator()(double x) const {
    if (x < 0.0 || x > 1.0) {
      if (x < -1e-9 || x > 1.0 + 1e-9) {
        throw std::domain_error("functional argument " + detail::format_double(x) +
                                " lies outside [0, 1]");
      }
      x = std::clamp(x, 0.0, 1.0);
    }
    return eval_(x);
  }

  double symmetric(double x) const { return (*this)(std::abs(x)); }

  static Functional variational() {
    return Functional("variational", [](double x) { return x; });
  }

  static Functional bhattacharyya_complement() {
    return Functional("bhattacharyya_complement",
                      [](double x) { return 1.0 - std::sqrt(std::max(1.0 - x * x, 0.0)); });
  }

  static Functional capacity();

  static Functional power(double exponent) {
    if (!(exponent >= 1.0)) {
      throw std::invalid_argument("power exponent must be at least 1");
    }
    char buf[48];
    std::snprintf(buf, sizeof(buf), "power:%.12g", exponent);
    return Functional(buf, [exponent](double x) { return std::pow(x, exponent); });
  }

  // Knots must start at (0, 0), end at (1, 1), have strictly increasing x,
  // and nonnegative nondecreasing slopes.
  static Functional piecewise_linear(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) throw std::invalid_argument("piecewise-linear functional needs at least two knots");
    if (knots.front() != std::pair<double, double>(0.0, 0.0) ||
        knots.back() != std::pair<double, double>(1.0, 1.0)) {
      throw std::invalid_argument("piecewise-linear knots must run from (0,0) to (1,1)");
    }
    double prev_slope = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      double dx = knots[i + 1].first - knots[i].first;
      if (!(dx > 0.0)) throw std::invalid_argument("piecewise-linear knots must have strictly increasing x");
      double slope = (knots[i + 1].second - knots[i].second) / dx;
      if (slope < -kStochasticTol) throw std::invalid_argument("piecewise-linear functional must be nondecreasing");
      if (i > 0 && slope < prev_slope - kStochasticTol) {
        throw std::invalid_argument("piecewise-linear functional must be convex");
      }
      prev_slope = slope;
    }
    std::string name = "piecewise_linear:";
    for (std::size_t i = 0; i < knots.size(); ++i) {
      if (i) name += ';';
      char buf[80];
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g", knots[i].first, knots[i].second);
      name += buf;
    }
    return Functional(std::move(name), [knots = std::move(knots)](double x) {
      auto it = std::upper_bound(knots.begin(), knots.end(), x,
                                 [](double v, const auto& k) { return v < k.first; });
      if (it == knots.begin()) return knots.front().second;
      if (it == knots.end()) return knots.back().second;
      const auto& [x1, y1] = *std::prev(it);
      const auto& [x2, y2] = *it;
      return y1 + (y2 - y1) * (x - x1) / (x2 - x1);
    });
  }

  // Accepts "variational", "bhattacharyya_complement", "capacity",
  // "power:K", "piecewise_linear:x,y;x,y;...".
  static Functional parse(std::string_view text);

 private:
  Functional(std::string name, std::function<double(double)> eval)
      : name_(std::move(name)), eval_(std::move(eval)) {}

  std::string name_;
  std::function<double(double)> eval_;
};

// Binary entropy in bits; h2(0) = h2(1) = 0.
inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy argument outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

inline Functional Functional::capacity() {
  return Functional("capacity", [](double x) { return 1.0 - binary_entropy((1.0 + x) / 2.0); });
}

inline Functional Functional::parse(std::string_view text) {
  if (text == "variational") return variational();
  if (text == "bhattacharyya_complement") return bhattacharyya_complement();
  if (text == "capacity") return capacity();
  constexpr std::string_view kPower = "power:";
  if (text.substr(0, kPower.size()) == kPower) {
    std::string arg(text.substr(kPower.size()));
    std::size_t pos = 0;
    double k;
    try {
      k = std::stod(arg, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse power exponent '" + arg + "'");
    }
    if (pos != arg.size()) throw std::invalid_argument("cannot parse power exponent '" + arg + "'");
    return power(k);
  }
  constexpr std::string_view kPwl = "piecewise_linear:";
  if (text.substr(0, kPwl.size()) == kPwl) {
    std::string body(text.substr(kPwl.size()));
    std::vector<std::pair<double, double>> knots;
    std::size_t start = 0;
    while (start <= body.size()) {
      std::size_t end = body.find(';', start);
      if (end == std::string::npos) end = body.size();
      std::string piece = body.substr(start, end - start);
      std::size_t comma = piece.find(',');
      if (comma == std::string::npos) {
        throw std::invalid_argument("piecewise-linear knot '" + piece + "' is not 'x,y'");
      }
      try {
        knots.emplace_back(std::stod(piece.substr(0, comma)), std::stod(piece.substr(comma + 1)));
      } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse piecewise-linear knot '" + piece + "'");
      }
      start = end + 1;
    }
    return piecewise_linear(std::move(knots));
  }
  throw std::invalid_argument("unknown functional '" + std::string(text) + "'");
}

inline std::vector<Functional> built_in_functionals() {
  return {Functional::variational(), Functional::bhattacharyya_complement(),
          Functional::capacity(), Functional::power(2.0), Functional::power(3.0)};
}

// E[phi(|X|)]
inline double expectation_phi(const DeltaDistribution& d, const Functional& phi) {
  detail::CompensatedSum s;
  for (const Atom& a : d.atoms()) s.add(a.weight * phi.symmetric(a.value));
  return s.value();
}

}  // namespace polarorder
