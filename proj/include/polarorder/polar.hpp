#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polarorder/channel.hpp"
#include "polarorder/delta.hpp"

namespace polarorder {

// A word over {-, +}, applied left to right. Accepts ASCII '-'/'+' and the
// U+2212 minus sign on input.
class SignSequence {
 public:
  SignSequence() = default;

  explicit SignSequence(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
      unsigned char c = text[i];
      if (c == '+' || c == '-') {
        signs_ += static_cast<char>(c);
        ++i;
      } else if (c == 0xE2 && i + 2 < text.size() &&
                 static_cast<unsigned char>(text[i + 1]) == 0x88 &&
                 static_cast<unsigned char>(text[i + 2]) == 0x92) {
        signs_ += '-';
        i += 3;
      } else {
        throw std::invalid_argument("sign sequence '" + std::string(text) +
                                    "' contains a character other than '+' or '-'");
      }
    }
  }

  static SignSequence from_index(std::uint64_t index, int length) {
    if (length < 0 || length > 63) throw std::invalid_argument("sign sequence length must lie in [0, 63]");
    if (index < 1 || index > (std::uint64_t{1} << length)) {
      throw std::invalid_argument("index " + std::to_string(index) + " has no sign sequence of length " +
                                  std::to_string(length));
    }
    std::uint64_t bits = index - 1;
    SignSequence s;
    for (int i = length - 1; i >= 0; --i) {
      s.signs_ += ((bits >> i) & 1) ? '+' : '-';
    }
    return s;
  }

  std::size_t length() const { return signs_.size(); }
  bool plus_at(std::size_t i) const { return signs_.at(i) == '+'; }
  const std::string& str() const { return signs_; }

  // 1 + the binary value of the signs with '-' as 0 and '+' as 1, most
  // significant first; ranges over 1..2^n for length n.
  std::uint64_t index() const {
    if (signs_.size() > 63) throw std::overflow_error("sign sequence too long to index");
    std::uint64_t v = 0;
    for (char c : signs_) v = 2 * v + (c == '+' ? 1 : 0);
    return v + 1;
  }

  friend bool operator==(const SignSequence& a, const SignSequence& b) = default;

 private:
  std::string signs_;
};

// W-(y1 y2 | u1) = 1/2 sum_{u2} W(y1 | u1 xor u2) W(y2 | u2)
inline Channel channel_minus(const Channel& w, std::size_t atom_cap = kDefaultAtomCap) {
  std::size_t k = w.output_count();
  if (k > atom_cap / k) {
    throw std::runtime_error("minus transform would produce " + std::to_string(k) + "^2 outputs, over the cap of " +
                             std::to_string(atom_cap));
  }
  std::vector<std::string> labels;
  std::vector<double> r0, r1;
  labels.reserve(k * k);
  r0.reserve(k * k);
  r1.reserve(k * k);
  for (std::size_t y1 = 0; y1 < k; ++y1) {
    for (std::size_t y2 = 0; y2 < k; ++y2) {
      labels.push_back(w.output_labels()[y1] + "|" + w.output_labels()[y2]);
      r0.push_back(0.5 * (w.row0()[y1] * w.row0()[y2] + w.row1()[y1] * w.row1()[y2]));
      r1.push_back(0.5 * (w.row1()[y1] * w.row0()[y2] + w.row0()[y1] * w.row1()[y2]));
    }
  }
  return Channel(std::move(labels), std::move(r0), std::move(r1));
}

// W+(y1 y2 u1 | u2) = 1/2 W(y1 | u1 xor u2) W(y2 | u2)
inline Channel channel_plus(const Channel& w, std::size_t atom_cap = kDefaultAtomCap) {
  std::size_t k = w.output_count();
  if (k > atom_cap / (2 * k)) {
    throw std::runtime_error("plus transform would produce 2*" + std::to_string(k) + "^2 outputs, over the cap of " +
                             std::to_string(atom_cap));
  }
  std::vector<std::string> labels;
  std::vector<double> r0, r1;
  labels.reserve(2 * k * k);
  r0.reserve(2 * k * k);
  r1.reserve(2 * k * k);
  for (std::size_t y1 = 0; y1 < k; ++y1) {
    for (std::size_t y2 = 0; y2 < k; ++y2) {
      for (int u1 = 0; u1 < 2; ++u1) {
        labels.push_back(w.output_labels()[y1] + "|" + w.output_labels()[y2] + "|" + std::to_string(u1));
        r0.push_back(0.5 * w.row(u1)[y1] * w.row0()[y2]);
        r1.push_back(0.5 * w.row(u1 ^ 1)[y1] * w.row1()[y2]);
      }
    }
  }
  return Channel(std::move(labels), std::move(r0), std::move(r1));
}

// Product of two independent copies: the minus transform acts on the
// parameter distribution as D -> law of D1 * D2.
inline DeltaDistribution minus_transform(const DeltaDistribution& d) {
  const auto& atoms = d.atoms();
  std::vector<Atom> out;
  out.reserve(atoms.size() * atoms.size());
  for (const Atom& a : atoms) {
    for (const Atom& b : atoms) {
      out.push_back({a.value * b.value, a.weight * b.weight});
    }
  }
  return DeltaDistribution(std::move(out), kDefaultMergeTol);
}

// Plus transform: branch u contributes the value (d1 + s d2) / (1 + s d1 d2)
// with weight p1 p2 (1 + s d1 d2) / 2, where s = +1 for u = 0 and -1 for
// u = 1. Branches whose weight factor is at most kBranchWeightCutoff are
// singular and carry no mass.
inline DeltaDistribution plus_transform(const DeltaDistribution& d) {
  const auto& atoms = d.atoms();
  std::vector<Atom> out;
  out.reserve(2 * atoms.size() * atoms.size());
  for (const Atom& a : atoms) {
    for (const Atom& b : atoms) {
      double prod = a.value * b.value;
      double pw = a.weight * b.weight;
      for (double s : {1.0, -1.0}) {
        double factor = (1.0 + s * prod) / 2.0;
        if (factor <= kBranchWeightCutoff) continue;
        double v = (a.value + s * b.value) / (2.0 * factor);
        out.push_back({std::clamp(v, -1.0, 1.0), pw * factor});
      }
    }
  }
  return DeltaDistribution(std::move(out), kDefaultMergeTol);
}

// Average of phi(|.|) at the two plus-branch children of the pair (d1, d2).
// A branch with zero prefactor contributes zero even though its value is
// singular.
inline double f_plus_compose(const Functional& phi, double d1, double d2) {
  if (std::abs(d1) > 1.0 + kStochasticTol || std::abs(d2) > 1.0 + kStochasticTol) {
    throw std::domain_error("plus composition arguments must lie in [-1, 1]");
  }
  d1 = std::clamp(d1, -1.0, 1.0);
  d2 = std::clamp(d2, -1.0, 1.0);
  double prod = d1 * d2;
  double result = 0.0;
  for (double s : {1.0, -1.0}) {
    double factor = (1.0 + s * prod) / 2.0;
    if (factor <= 0.0) continue;
    double v = (d1 + s * d2) / (2.0 * factor);
    result += factor * phi.symmetric(std::clamp(v, -1.0, 1.0));
  }
  return result;
}

struct SynthesisOptions {
  // Quantizer budget applied after every transform step; nullopt keeps the
  // support exact and enforces atom_cap instead.
  std::optional<std::size_t> budget = kDefaultBudget;
  std::size_t atom_cap = kDefaultAtomCap;

  static SynthesisOptions exact_mode() {
    SynthesisOptions o;
    o.budget.reset();
    return o;
  }
};

inline DeltaDistribution synthesize(const DeltaDistribution& root, const SignSequence& seq,
                                    const SynthesisOptions& opts = {}) {
  if (opts.budget && *opts.budget == 0) throw std::invalid_argument("synthesis budget must be at least 1");
  DeltaDistribution d = root;
  for (std::size_t i = 0; i < seq.length(); ++i) {
    bool plus = seq.plus_at(i);
    if (!opts.budget) {
      std::size_t k = d.size();
      std::size_t raw = plus ? 2 * k * k : k * k;
      if (k > 0 && raw / (plus ? 2 * k : k) != k) raw = opts.atom_cap + 1;
      if (raw > opts.atom_cap) {
        throw std::runtime_error("exact synthesis would produce " + std::to_string(raw) +
                                 " atoms at step " + std::to_string(i + 1) + " of '" + seq.str() +
                                 "', over the cap of " + std::to_string(opts.atom_cap));
      }
    }
    d = plus ? plus_transform(d) : minus_transform(d);
    if (opts.budget) d = quantize(d, *opts.budget);
  }
  return d;
}

}  // namespace polarorder
