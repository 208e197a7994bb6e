#pragma once

#include "turbolink/permute.hpp"
#include "turbolink/siso.hpp"
#include "turbolink/trellis.hpp"
#include "turbolink/types.hpp"

#include <utility>
#include <vector>

namespace turbolink::turbo {

enum class CodeType { Binary, DuoBinary };
enum class SisoAlgo { MaxLogMap, Sova };

struct TurboConfig {
  CodeType code = CodeType::DuoBinary;
  int block_bits = 288;
  std::pair<int, int> rate = {1, 2};
  SisoAlgo algo = SisoAlgo::MaxLogMap;
  int iterations = 8;
  siso::TailbitingMode tb_mode = siso::TailbitingMode::Wrap;
  int sova_update_depth = 32;
  double sova_extrinsic_scale = 1.0;  // kept at 1.0 for the reference setup
  bool early_stop = false;            // optional hard-decision agreement stop
  bool trace = false;                 // keep per-iteration diagnostics

  int data_steps() const;
  permute::PuncturePattern puncture_pattern() const;
  void validate() const;  // throws std::invalid_argument naming the field
};

// Parity-only patterns over the stream orders used by encode/decode below:
// binary (sys, par1, par2), duo-binary (A, B, Y1, W1, Y2, W2).
permute::PuncturePattern binary_puncture(std::pair<int, int> rate);
permute::PuncturePattern duobinary_puncture(std::pair<int, int> rate);

struct EncodedBlock {
  BitVec tx_bits;  // punctured multiplexed payload; binary code appends the
                   // 12 tail bits (per encoder: 3 steps of systematic,parity)
};

EncodedBlock turbo_encode(const TurboConfig& cfg, const BitVec& data);

// Transmitted bits for one block: data/rate payload plus tail overhead.
int tx_bits_per_block(const TurboConfig& cfg);

// Depunctured channel LLR streams in encoder order. Binary: sys/par1/par2
// cover data steps then the 3 tail steps of the respective encoder; sys2_tail
// carries the second encoder's tail systematic LLRs. Duo-binary uses the
// couple streams and leaves the binary fields empty.
struct ChannelLlrs {
  LlrVec sys, par1, par2, sys2_tail;
  LlrVec a, b, y1, w1, y2, w2;
};

ChannelLlrs depuncture_rx(const TurboConfig& cfg, const LlrVec& rx);

// Eliminates the channel-systematic and a-priori terms from the a-posteriori
// output, leaving the extrinsic part exchanged between the decoders.
LlrVec extrinsic_extract(const LlrVec& aposteriori, const LlrVec& channel_sys, const LlrVec& apriori);

// Per-iteration diagnostics for the exchange-identity checks. Binary code
// fills the vector fields, duo-binary the *_sym fields.
struct IterationTrace {
  LlrVec app1, extrinsic1, apriori1, apriori2, aposteriori;
  SymbolLlrMat app1_sym, extrinsic1_sym, apriori1_sym, apriori2_sym, aposteriori_sym;
};

struct DecodeResult {
  BitVec bits;
  std::vector<BitVec> per_iteration_bits;  // hard decisions after each iteration
  std::vector<IterationTrace> trace;       // populated when cfg.trace
  siso::OpCounters ops;
  int iterations_run = 0;
};

DecodeResult turbo_decode(const ChannelLlrs& rx, const TurboConfig& cfg);

}  // namespace turbolink::turbo
