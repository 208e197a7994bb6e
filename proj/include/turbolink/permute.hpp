#pragma once

#include "turbolink/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace turbolink::permute {

// Generic table-driven permutation: forward applies out[i] = in[pi(i)].
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> table);

  int size() const { return static_cast<int>(table_.size()); }
  int map(int i) const { return table_[i]; }
  const std::vector<int>& table() const { return table_; }

  template <typename Derived>
  typename Derived::PlainObject interleave(const Eigen::DenseBase<Derived>& in) const {
    typename Derived::PlainObject out(in.size());
    for (int i = 0; i < size(); ++i) out[i] = in[table_[i]];
    return out;
  }

  template <typename Derived>
  typename Derived::PlainObject deinterleave(const Eigen::DenseBase<Derived>& in) const {
    typename Derived::PlainObject out(in.size());
    for (int i = 0; i < size(); ++i) out[table_[i]] = in[i];
    return out;
  }

 private:
  std::vector<int> table_;
};

// Quadratic permutation polynomial interleaver for the binary turbo code:
// pi(i) = (f1*i + f2*i^2) mod K. Coefficient pairs are tabulated for the
// supported block sizes only.
class QppInterleaver {
 public:
  QppInterleaver(int block_bits, int f1, int f2);
  static QppInterleaver for_block(int block_bits);  // throws on unsupported K
  static const std::vector<int>& supported_sizes();

  int size() const { return perm_.size(); }
  int f1() const { return f1_; }
  int f2() const { return f2_; }
  const Permutation& perm() const { return perm_; }

 private:
  int f1_, f2_;
  Permutation perm_;
};

// Two-step couple interleaver for the duo-binary code operating on N couples:
// step 1 swaps (A, B) inside couples at odd output positions, step 2 permutes
// positions with P(j) = (P0*j + 1 + c(j mod 4)) mod N.
class CoupleInterleaver {
 public:
  CoupleInterleaver(int n_couples, int p0, int p1, int p2, int p3);
  static CoupleInterleaver for_block(int n_couples);  // throws on unsupported N
  static const std::vector<int>& supported_sizes();

  int size() const { return perm_.size(); }
  int map(int j) const { return perm_.map(j); }
  bool swapped(int j) const { return (j & 1) != 0; }
  const Permutation& perm() const { return perm_; }

  // couples as a flat bit array, 2 bits per couple
  BitVec interleave_bits(const BitVec& bits) const;
  BitVec deinterleave_bits(const BitVec& bits) const;

  // couple-level LLR triples; the intra-couple swap exchanges the 01 and 10
  // rows (values 1 and 2)
  SymbolLlrMat interleave_symbols(const SymbolLlrMat& m) const;
  SymbolLlrMat deinterleave_symbols(const SymbolLlrMat& m) const;

  // per-bit streams aligned to couples (A stream, B stream)
  void interleave_pair(const LlrVec& a, const LlrVec& b, LlrVec& ai, LlrVec& bi) const;

 private:
  std::array<int, 4> p_;
  Permutation perm_;
};

// Periodic keep-mask puncturing. Systematic streams are never punctured.
struct PuncturePattern {
  int period = 1;
  std::vector<std::vector<std::uint8_t>> keep;  // [stream][phase]
  int rate_num = 1;
  int rate_den = 3;

  int kept_per_period() const;
  bool keeps(int stream, int step) const { return keep[stream][step % period] != 0; }
};

// Transmitted-sequence multiplexing order: for each trellis step, streams in
// index order, kept positions only.
BitVec puncture(const std::vector<BitVec>& streams, const PuncturePattern& p);
LlrVec puncture(const std::vector<LlrVec>& streams, const PuncturePattern& p);

// Inverse of the multiplexing: punctured positions get LLR exactly 0.
std::vector<LlrVec> depuncture(const LlrVec& llrs, const PuncturePattern& p, int steps);

// Seeded pseudo-random bit permutation (Fisher-Yates over the documented
// deterministic generator); fixed per configuration.
Permutation channel_interleaver(int n, std::uint64_t seed);

}  // namespace turbolink::permute
