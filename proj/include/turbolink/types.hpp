#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace turbolink {

// Repo-wide LLR sign convention: L = ln P(bit = 0) / P(bit = 1), i.e. a
// positive LLR favours logical 0, which maps to BPSK amplitude +1 via
// x = 1 - 2*bit.
using LlrVec = Eigen::ArrayXd;

// Couple-level LLRs for the duo-binary code. Column k holds the three LLRs
// of couple values {01, 10, 11} relative to 00 (rows 0..2 = values 1..3,
// value = 2*A + B). The reference value 00 has LLR 0 by construction.
using SymbolLlrMat = Eigen::Array<double, 3, Eigen::Dynamic>;

using BitVec = Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>;

enum class LlrRole { Systematic, Parity, Apriori, Extrinsic, Aposteriori };

struct LlrBlock {
  LlrVec values;
  LlrRole role = LlrRole::Systematic;
};

// Channel LLRs are clamped to this magnitude before entering a decoder so
// that max-log arithmetic stays finite.
inline constexpr double kLlrClamp = 64.0;

// Boundary metric for impossible states in the max-log recursions.
inline constexpr double kNegInf = -1e30;

// Initial SOVA reliability (no competitor observed yet).
inline constexpr double kSovaInf = 1e4;

inline LlrVec clamp_llrs(const LlrVec& v, double limit = kLlrClamp) {
  return v.min(limit).max(-limit);
}

inline double bpsk(std::uint8_t bit) { return bit ? -1.0 : 1.0; }

}  // namespace turbolink
