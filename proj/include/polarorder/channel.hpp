#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polarorder/delta.hpp"

namespace polarorder {

namespace detail {

inline void validate_stochastic_row(const std::vector<double>& row, const std::string& what) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (!(row[i] >= 0.0) || !std::isfinite(row[i])) {
      throw std::invalid_argument(what + " entry " + std::to_string(i) + " is " +
                                  format_double(row[i]) + ", expected nonnegative");
    }
  }
  CompensatedSum s;
  for (double x : row) s.add(x);
  double t = s.value();
  if (std::abs(t - 1.0) > kStochasticTol) {
    throw std::invalid_argument(what + " sums to " + format_double(t) + ", expected 1 within " +
                                format_double(kStochasticTol));
  }
}

inline void validate_distinct_labels(const std::vector<std::string>& labels, const std::string& what) {
  std::set<std::string> seen;
  for (const std::string& l : labels) {
    if (!seen.insert(l).second) {
      throw std::invalid_argument(what + " contains duplicate label '" + l + "'");
    }
  }
}

}  // namespace detail

// Binary-input discrete memoryless channel, stored as the two conditional
// rows over a labelled finite output alphabet.
class Channel {
 public:
  Channel(std::vector<std::string> output_labels, std::vector<double> row0, std::vector<double> row1)
      : labels_(std::move(output_labels)), row0_(std::move(row0)), row1_(std::move(row1)) {
    if (labels_.empty()) throw std::invalid_argument("channel needs at least one output");
    if (row0_.size() != labels_.size() || row1_.size() != labels_.size()) {
      throw std::invalid_argument("channel rows must match the output alphabet size");
    }
    detail::validate_distinct_labels(labels_, "channel output alphabet");
    detail::validate_stochastic_row(row0_, "channel row0");
    detail::validate_stochastic_row(row1_, "channel row1");
  }

  std::size_t output_count() const { return labels_.size(); }
  const std::vector<std::string>& output_labels() const { return labels_; }
  const std::vector<double>& row0() const { return row0_; }
  const std::vector<double>& row1() const { return row1_; }
  const std::vector<double>& row(int input) const {
    if (input != 0 && input != 1) throw std::invalid_argument("channel input must be 0 or 1");
    return input == 0 ? row0_ : row1_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<double> row0_;
  std::vector<double> row1_;
};

// Row-stochastic map between two labelled alphabets.
class Kernel {
 public:
  Kernel(std::vector<std::string> input_labels, std::vector<std::string> output_labels,
         std::vector<std::vector<double>> rows)
      : in_(std::move(input_labels)), out_(std::move(output_labels)), rows_(std::move(rows)) {
    if (rows_.size() != in_.size()) {
      throw std::invalid_argument("kernel needs one row per input label");
    }
    detail::validate_distinct_labels(in_, "kernel input alphabet");
    detail::validate_distinct_labels(out_, "kernel output alphabet");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (rows_[i].size() != out_.size()) {
        throw std::invalid_argument("kernel row " + std::to_string(i) +
                                    " must match the output alphabet size");
      }
      detail::validate_stochastic_row(rows_[i], "kernel row " + std::to_string(i));
    }
  }

  const std::vector<std::string>& input_labels() const { return in_; }
  const std::vector<std::string>& output_labels() const { return out_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

 private:
  std::vector<std::string> in_;
  std::vector<std::string> out_;
  std::vector<std::vector<double>> rows_;
};

inline Channel make_bsc(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 0.5)) {
    throw std::invalid_argument("BSC crossover must lie in [0, 0.5]");
  }
  return Channel({"0", "1"}, {1.0 - crossover, crossover}, {crossover, 1.0 - crossover});
}

inline Channel make_bec(double erasure) {
  if (!(erasure >= 0.0 && erasure <= 1.0)) {
    throw std::invalid_argument("BEC erasure probability must lie in [0, 1]");
  }
  return Channel({"0", "e", "1"}, {1.0 - erasure, erasure, 0.0}, {0.0, erasure, 1.0 - erasure});
}

inline Channel make_z(double flip) {
  if (!(flip >= 0.0 && flip <= 1.0)) {
    throw std::invalid_argument("Z-channel flip probability must lie in [0, 1]");
  }
  return Channel({"0", "1"}, {1.0, 0.0}, {flip, 1.0 - flip});
}

// Distribution of (W(y|0) - W(y|1)) / (W(y|0) + W(y|1)) under the uniform-input
// output law q(y) = (W(y|0) + W(y|1)) / 2. Outputs with q(y) = 0 are dropped.
inline DeltaDistribution delta_distribution(const Channel& w) {
  std::vector<Atom> atoms;
  atoms.reserve(w.output_count());
  for (std::size_t y = 0; y < w.output_count(); ++y) {
    double a = w.row0()[y], b = w.row1()[y];
    double q = (a + b) / 2.0;
    if (q == 0.0) continue;
    atoms.push_back({(a - b) / (a + b), q});
  }
  return DeltaDistribution(std::move(atoms));
}

// W_s((y, z) | x) = W(y | x xor z) / 2 over pairs labelled "y|z".
inline Channel symmetrize(const Channel& w) {
  std::vector<std::string> labels;
  std::vector<double> r0, r1;
  labels.reserve(2 * w.output_count());
  r0.reserve(2 * w.output_count());
  r1.reserve(2 * w.output_count());
  for (std::size_t y = 0; y < w.output_count(); ++y) {
    for (int z = 0; z < 2; ++z) {
      labels.push_back(w.output_labels()[y] + "|" + std::to_string(z));
      r0.push_back(0.5 * w.row(z)[y]);
      r1.push_back(0.5 * w.row(1 - z)[y]);
    }
  }
  return Channel(std::move(labels), std::move(r0), std::move(r1));
}

// V(y|x) = sum_z W(z|x) P(y|z). The kernel input alphabet must match the
// channel output alphabet exactly.
inline Channel degrade(const Channel& w, const Kernel& p) {
  if (p.input_labels() != w.output_labels()) {
    throw std::invalid_argument("kernel input alphabet does not match channel output alphabet");
  }
  std::vector<double> r0(p.output_labels().size(), 0.0), r1(p.output_labels().size(), 0.0);
  for (std::size_t z = 0; z < w.output_count(); ++z) {
    for (std::size_t y = 0; y < p.output_labels().size(); ++y) {
      r0[y] += w.row0()[z] * p.rows()[z][y];
      r1[y] += w.row1()[z] * p.rows()[z][y];
    }
  }
  return Channel(p.output_labels(), std::move(r0), std::move(r1));
}

// True when some relabelling of the output alphabet swaps the two rows, i.e.
// the multiset of column pairs is invariant under (a, b) -> (b, a).
inline bool is_symmetric(const Channel& w, double tol = kStochasticTol) {
  std::vector<std::pair<double, double>> cols, swapped;
  cols.reserve(w.output_count());
  swapped.reserve(w.output_count());
  for (std::size_t y = 0; y < w.output_count(); ++y) {
    cols.emplace_back(w.row0()[y], w.row1()[y]);
    swapped.emplace_back(w.row1()[y], w.row0()[y]);
  }
  std::sort(cols.begin(), cols.end());
  std::sort(swapped.begin(), swapped.end());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (std::abs(cols[i].first - swapped[i].first) > tol ||
        std::abs(cols[i].second - swapped[i].second) > tol) {
      return false;
    }
  }
  return true;
}

}  // namespace polarorder
