#pragma once

#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarorder/channel.hpp"
#include "polarorder/delta.hpp"
#include "polarorder/polar.hpp"

namespace polarorder {

// All synthesized parameter distributions down to the requested depth.
// levels[l] has 2^l nodes; node i at level l has children 2i (minus) and
// 2i + 1 (plus) at level l + 1. Work within a level fans out across threads.
inline std::vector<std::vector<DeltaDistribution>> synthesize_tree(const DeltaDistribution& root,
                                                                   int depth,
                                                                   const SynthesisOptions& opts = {},
                                                                   unsigned threads = 1) {
  if (depth < 0 || depth > 20) throw std::invalid_argument("synthesis depth must lie in [0, 20]");
  if (opts.budget && *opts.budget == 0) throw std::invalid_argument("synthesis budget must be at least 1");
  if (threads == 0) threads = 1;
  std::vector<std::vector<DeltaDistribution>> levels(depth + 1);
  levels[0] = {root};
  for (int l = 0; l < depth; ++l) {
    const auto& parents = levels[l];
    auto& children = levels[l + 1];
    children.resize(2 * parents.size());
    auto expand = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        SignSequence one_minus("-"), one_plus("+");
        children[2 * i] = synthesize(parents[i], one_minus, opts);
        children[2 * i + 1] = synthesize(parents[i], one_plus, opts);
      }
    };
    if (threads <= 1 || parents.size() < 2 * threads) {
      expand(0, parents.size());
    } else {
      std::vector<std::future<void>> jobs;
      std::size_t chunk = (parents.size() + threads - 1) / threads;
      for (std::size_t begin = 0; begin < parents.size(); begin += chunk) {
        std::size_t end = std::min(begin + chunk, parents.size());
        jobs.push_back(std::async(std::launch::async, expand, begin, end));
      }
      for (auto& j : jobs) j.get();
    }
  }
  return levels;
}

struct InfoSetEntry {
  SignSequence sequence;
  double value = 0.0;
  bool member = false;
};

// Construction report for one channel: every length-n sequence with its
// functional value, flagged when the value clears 1 - eps.
struct InfoSet {
  int n = 0;
  std::string phi;
  double eps = 0.0;
  std::optional<std::size_t> budget;
  std::vector<InfoSetEntry> entries;  // ordered by sequence index

  std::size_t member_count() const {
    std::size_t c = 0;
    for (const auto& e : entries) c += e.member;
    return c;
  }

  std::vector<SignSequence> members() const {
    std::vector<SignSequence> out;
    for (const auto& e : entries) {
      if (e.member) out.push_back(e.sequence);
    }
    return out;
  }
};

inline InfoSet info_set_from_values(int n, const std::string& phi_name, double eps,
                                    std::optional<std::size_t> budget,
                                    const std::vector<double>& leaf_values) {
  if (n < 0 || n > 20) throw std::invalid_argument("info set depth must lie in [0, 20]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie strictly between 0 and 1");
  if (leaf_values.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("expected " + std::to_string(std::size_t{1} << n) + " leaf values");
  }
  InfoSet set;
  set.n = n;
  set.phi = phi_name;
  set.eps = eps;
  set.budget = budget;
  set.entries.reserve(leaf_values.size());
  for (std::size_t i = 0; i < leaf_values.size(); ++i) {
    InfoSetEntry e;
    e.sequence = SignSequence::from_index(i + 1, n);
    e.value = leaf_values[i];
    e.member = e.value >= 1.0 - eps;
    set.entries.push_back(std::move(e));
  }
  return set;
}

inline InfoSet build_info_set(const Channel& w, int n, const Functional& phi, double eps,
                              const SynthesisOptions& opts = {}, unsigned threads = 1) {
  if (n < 0 || n > 20) throw std::invalid_argument("info set depth must lie in [0, 20]");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie strictly between 0 and 1");
  auto levels = synthesize_tree(delta_distribution(w), n, opts, threads);
  std::vector<double> values;
  values.reserve(levels.back().size());
  for (const DeltaDistribution& d : levels.back()) values.push_back(expectation_phi(d, phi));
  return info_set_from_values(n, phi.name(), eps, opts.budget, values);
}

struct ContainmentViolation {
  SignSequence sequence;
  double value_left = 0.0;
  double value_right = 0.0;
};

struct ContainmentReport {
  bool contained = true;
  std::vector<ContainmentViolation> violations;
};

// Re-runs only the flagged sequences at a higher budget. Quantization biases
// every report value downward (each merge is a conditional expectation, and
// the functionals are convex), so a genuine containment violation survives
// any budget increase while a quantization artifact on the right side gets
// cleared.
inline ContainmentReport recheck_containment(const Channel& left, const Channel& right,
                                             const ContainmentReport& report, const Functional& phi,
                                             double eps, std::size_t budget) {
  SynthesisOptions opts;
  opts.budget = budget;
  DeltaDistribution left_root = delta_distribution(left);
  DeltaDistribution right_root = delta_distribution(right);
  ContainmentReport out;
  for (const ContainmentViolation& v : report.violations) {
    double lv = expectation_phi(synthesize(left_root, v.sequence, opts), phi);
    double rv = expectation_phi(synthesize(right_root, v.sequence, opts), phi);
    if (lv >= 1.0 - eps && rv < 1.0 - eps) {
      out.contained = false;
      out.violations.push_back({v.sequence, lv, rv});
    }
  }
  return out;
}

// Checks members(left) within members(right) entry by entry. Both sets must
// be built for the same depth, functional, and eps; budgets may differ.
inline ContainmentReport containment(const InfoSet& left, const InfoSet& right) {
  if (left.n != right.n || left.phi != right.phi || left.eps != right.eps) {
    throw std::invalid_argument("containment needs info sets with matching depth, functional, and eps");
  }
  ContainmentReport report;
  for (std::size_t i = 0; i < left.entries.size(); ++i) {
    if (left.entries[i].member && !right.entries[i].member) {
      report.contained = false;
      report.violations.push_back(
          {left.entries[i].sequence, left.entries[i].value, right.entries[i].value});
    }
  }
  return report;
}

}  // namespace polarorder
