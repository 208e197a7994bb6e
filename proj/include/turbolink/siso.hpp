#pragma once

#include "turbolink/trellis.hpp"
#include "turbolink/types.hpp"

#include <cstdint>

namespace turbolink::siso {

// Scalar-operation instrumentation. The counting convention (documented in
// docs/op_counting.md): one addition per executed floating add/subtract in
// branch-metric formation, recursion branch sums, path-metric differences and
// output formation; one comparison per executed pairwise max/min, including
// every reliability-update min.
struct OpCounters {
  std::int64_t additions = 0;
  std::int64_t comparisons = 0;

  void reset() { additions = comparisons = 0; }
  OpCounters& operator+=(const OpCounters& o) {
    additions += o.additions;
    comparisons += o.comparisons;
    return *this;
  }
};

// Boundary handling for tailbiting blocks.
//   Wrap:  uniform boundary metrics refined by one wrap-around warm-up pass
//          of min(N, 32) steps in each direction (production default).
//   Exact: one constrained pass per start state; marginals equal exhaustive
//          max-log marginalization over all circular codewords.
enum class TailbitingMode { Wrap, Exact };

struct BinarySisoResult {
  LlrVec aposteriori;  // data steps only (tail positions are not exchanged)
  OpCounters ops;
};

struct DuoSisoResult {
  SymbolLlrMat aposteriori;
  OpCounters ops;
};

// Max-Log-MAP for the binary trellis. sys/par cover every trellis step
// (data + tail for TailBits); apriori must be zero over tail steps.
BinarySisoResult max_log_map(const trellis::TrellisSpec& t, const LlrVec& sys, const LlrVec& par,
                             const LlrVec& apriori, trellis::Termination term,
                             TailbitingMode mode = TailbitingMode::Wrap);

// Max-Log-MAP for the duo-binary trellis; one column of apriori per couple.
DuoSisoResult max_log_map_duo(const trellis::TrellisSpec& t, const LlrVec& sys_a, const LlrVec& sys_b,
                              const LlrVec& par_y, const LlrVec& par_w, const SymbolLlrMat& apriori,
                              trellis::Termination term, TailbitingMode mode = TailbitingMode::Wrap);

// Soft-output Viterbi for the binary trellis. Hard decisions equal the ML
// Viterbi path; reliabilities follow the trace-update rule along that path
// (competitor bit disagreement => reliability = min(reliability, delta)).
// Tailbiting decodes a cyclically extended block (24-step prefix/suffix).
BinarySisoResult sova(const trellis::TrellisSpec& t, const LlrVec& sys, const LlrVec& par,
                      const LlrVec& apriori, trellis::Termination term, int update_depth = 32);

// Duo-binary soft-output Viterbi. Register-exchange variant: every state
// merge updates couple-value reliabilities over the update window.
DuoSisoResult sova_duo(const trellis::TrellisSpec& t, const LlrVec& sys_a, const LlrVec& sys_b,
                       const LlrVec& par_y, const LlrVec& par_w, const SymbolLlrMat& apriori,
                       trellis::Termination term, int update_depth = 32);

// Max-log marginalization of couple-level LLRs to per-bit LLRs:
// L(A) = max over couples with A=0 minus max over couples with A=1.
void couple_to_bit_llrs(const SymbolLlrMat& sym, LlrVec& a, LlrVec& b);

}  // namespace turbolink::siso
