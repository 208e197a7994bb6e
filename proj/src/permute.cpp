#include "turbolink/permute.hpp"

#include "turbolink/rng.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace turbolink::permute {

Permutation::Permutation(std::vector<int> table) : table_(std::move(table)) {
#ifndef NDEBUG
  std::vector<char> seen(table_.size(), 0);
  for (int v : table_) {
    assert(v >= 0 && v < static_cast<int>(table_.size()) && !seen[v]);
    seen[v] = 1;
  }
#endif
}

namespace {

// Turbo interleaver coefficients for the supported binary block sizes,
// transcribed from the standard table (size 8 is an extra oracle-scale entry
// used by small-block tests).
const std::unordered_map<int, std::pair<int, int>> kQppTable = {
    {8, {1, 2}},     {40, {3, 10}},   {192, {23, 48}},  {288, {19, 36}},
    {384, {23, 48}}, {480, {89, 180}}, {960, {29, 60}},
};

// Couple interleaver displacement parameters (P0..P3) per number of couples,
// from the duo-binary standard table (sizes 4 and 8 are oracle-scale extras).
const std::unordered_map<int, std::array<int, 4>> kCoupleTable = {
    {4, {1, 0, 0, 0}},        {8, {3, 4, 0, 4}},        {24, {5, 0, 0, 0}},
    {96, {7, 48, 24, 72}},    {144, {17, 74, 72, 2}},   {192, {11, 96, 48, 144}},
    {240, {13, 120, 60, 180}}, {480, {53, 62, 12, 2}},
};

std::vector<int> sorted_keys(const auto& m) {
  std::vector<int> keys;
  keys.reserve(m.size());
  for (const auto& [k, v] : m) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

QppInterleaver::QppInterleaver(int block_bits, int f1, int f2) : f1_(f1), f2_(f2) {
  std::vector<int> table(block_bits);
  for (long long i = 0; i < block_bits; ++i)
    table[i] = static_cast<int>((f1 * i + ((f2 * i) % block_bits) * i) % block_bits);
  perm_ = Permutation(std::move(table));
}

QppInterleaver QppInterleaver::for_block(int block_bits) {
  const auto it = kQppTable.find(block_bits);
  if (it == kQppTable.end())
    throw std::invalid_argument("QppInterleaver: unsupported block size " + std::to_string(block_bits));
  return {block_bits, it->second.first, it->second.second};
}

const std::vector<int>& QppInterleaver::supported_sizes() {
  static const std::vector<int> sizes = sorted_keys(kQppTable);
  return sizes;
}

CoupleInterleaver::CoupleInterleaver(int n, int p0, int p1, int p2, int p3) : p_{p0, p1, p2, p3} {
  std::vector<int> table(n);
  for (int j = 0; j < n; ++j) {
    long long v = 1LL * p0 * j + 1;
    switch (j % 4) {
      case 1: v += n / 2 + p1; break;
      case 2: v += p2; break;
      case 3: v += n / 2 + p3; break;
      default: break;
    }
    table[j] = static_cast<int>(v % n);
  }
  perm_ = Permutation(std::move(table));
}

CoupleInterleaver CoupleInterleaver::for_block(int n) {
  const auto it = kCoupleTable.find(n);
  if (it == kCoupleTable.end())
    throw std::invalid_argument("CoupleInterleaver: unsupported couple count " + std::to_string(n));
  const auto& p = it->second;
  return {n, p[0], p[1], p[2], p[3]};
}

const std::vector<int>& CoupleInterleaver::supported_sizes() {
  static const std::vector<int> sizes = sorted_keys(kCoupleTable);
  return sizes;
}

BitVec CoupleInterleaver::interleave_bits(const BitVec& bits) const {
  const int n = size();
  if (bits.size() != 2 * n) throw std::invalid_argument("CoupleInterleaver: bit count mismatch");
  BitVec out(2 * n);
  for (int j = 0; j < n; ++j) {
    const int src = perm_.map(j);
    const int sw = swapped(j) ? 1 : 0;
    out[2 * j] = bits[2 * src + sw];
    out[2 * j + 1] = bits[2 * src + 1 - sw];
  }
  return out;
}

BitVec CoupleInterleaver::deinterleave_bits(const BitVec& bits) const {
  const int n = size();
  if (bits.size() != 2 * n) throw std::invalid_argument("CoupleInterleaver: bit count mismatch");
  BitVec out(2 * n);
  for (int j = 0; j < n; ++j) {
    const int src = perm_.map(j);
    const int sw = swapped(j) ? 1 : 0;
    out[2 * src + sw] = bits[2 * j];
    out[2 * src + 1 - sw] = bits[2 * j + 1];
  }
  return out;
}

SymbolLlrMat CoupleInterleaver::interleave_symbols(const SymbolLlrMat& m) const {
  const int n = size();
  if (m.cols() != n) throw std::invalid_argument("CoupleInterleaver: column count mismatch");
  SymbolLlrMat out(3, n);
  for (int j = 0; j < n; ++j) {
    const auto col = m.col(perm_.map(j));
    if (swapped(j)) {
      out(0, j) = col(1);  // swapping (A,B) exchanges couple values 01 and 10
      out(1, j) = col(0);
      out(2, j) = col(2);
    } else {
      out.col(j) = col;
    }
  }
  return out;
}

SymbolLlrMat CoupleInterleaver::deinterleave_symbols(const SymbolLlrMat& m) const {
  const int n = size();
  if (m.cols() != n) throw std::invalid_argument("CoupleInterleaver: column count mismatch");
  SymbolLlrMat out(3, n);
  for (int j = 0; j < n; ++j) {
    const auto col = m.col(j);
    const int dst = perm_.map(j);
    if (swapped(j)) {
      out(0, dst) = col(1);
      out(1, dst) = col(0);
      out(2, dst) = col(2);
    } else {
      out.col(dst) = col;
    }
  }
  return out;
}

void CoupleInterleaver::interleave_pair(const LlrVec& a, const LlrVec& b, LlrVec& ai, LlrVec& bi) const {
  const int n = size();
  if (a.size() != n || b.size() != n) throw std::invalid_argument("CoupleInterleaver: stream length mismatch");
  ai.resize(n);
  bi.resize(n);
  for (int j = 0; j < n; ++j) {
    const int src = perm_.map(j);
    if (swapped(j)) {
      ai[j] = b[src];
      bi[j] = a[src];
    } else {
      ai[j] = a[src];
      bi[j] = b[src];
    }
  }
}

int PuncturePattern::kept_per_period() const {
  int n = 0;
  for (const auto& mask : keep)
    for (std::uint8_t k : mask) n += k;
  return n;
}

namespace {

template <typename Vec>
Vec puncture_impl(const std::vector<Vec>& streams, const PuncturePattern& p) {
  if (streams.size() != p.keep.size())
    throw std::invalid_argument("puncture: stream count does not match pattern");
  const auto steps = streams.front().size();
  for (const auto& s : streams)
    if (s.size() != steps) throw std::invalid_argument("puncture: stream length mismatch");
  if (steps % p.period != 0)
    throw std::invalid_argument("puncture: pattern period does not divide stream length");

  Vec out(steps / p.period * p.kept_per_period());
  Eigen::Index w = 0;
  for (Eigen::Index k = 0; k < steps; ++k)
    for (std::size_t s = 0; s < streams.size(); ++s)
      if (p.keeps(static_cast<int>(s), static_cast<int>(k))) out[w++] = streams[s][k];
  return out;
}

}  // namespace

BitVec puncture(const std::vector<BitVec>& streams, const PuncturePattern& p) {
  return puncture_impl(streams, p);
}

LlrVec puncture(const std::vector<LlrVec>& streams, const PuncturePattern& p) {
  return puncture_impl(streams, p);
}

std::vector<LlrVec> depuncture(const LlrVec& llrs, const PuncturePattern& p, int steps) {
  if (steps % p.period != 0)
    throw std::invalid_argument("depuncture: pattern period does not divide stream length");
  const Eigen::Index expected = static_cast<Eigen::Index>(steps) / p.period * p.kept_per_period();
  if (llrs.size() != expected) throw std::invalid_argument("depuncture: llr count does not match pattern");

  std::vector<LlrVec> out(p.keep.size(), LlrVec::Zero(steps));
  Eigen::Index r = 0;
  for (int k = 0; k < steps; ++k)
    for (std::size_t s = 0; s < p.keep.size(); ++s)
      if (p.keeps(static_cast<int>(s), k)) out[s][k] = llrs[r++];
  return out;
}

Permutation channel_interleaver(int n, std::uint64_t seed) {
  std::vector<int> table(n);
  std::iota(table.begin(), table.end(), 0);
  Rng rng(split_seed(seed, 0x10adULL));
  for (int i = n - 1; i > 0; --i)
    std::swap(table[i], table[rng.uniform_int(static_cast<std::uint64_t>(i) + 1)]);
  return Permutation(std::move(table));
}

}  // namespace turbolink::permute
