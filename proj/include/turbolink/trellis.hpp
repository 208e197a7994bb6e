#pragma once

#include "turbolink/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace turbolink::trellis {

// Generator polynomials over D as bitmasks, bit i = coefficient of D^i.
struct GeneratorSet {
  unsigned feedback = 0;
  std::vector<unsigned> parities;
  int constraint_length = 4;
};

enum class Termination {
  TailBits,    // 3 extra steps drive the feedback node to zero, tail is emitted
  Tailbiting,  // start state = end state (circulation state), no tail
};

// 8-state recursive systematic convolutional trellis. State packing puts the
// most recent feedback value s1 in the MSB: state = 4*s1 + 2*s2 + s3.
// Systematic output bits equal the input bits, so only parity is tabulated.
struct TrellisSpec {
  int num_states = 8;
  int input_arity = 2;   // branches per state: 2 (binary) or 4 (duo-binary)
  int bits_per_step = 1; // systematic bits per step
  int num_parity = 1;    // parity bits per step (duo-binary: bit0 = Y, bit1 = W)
  int rate_num = 1;      // native constituent rate before puncturing
  int rate_den = 2;
  GeneratorSet generators;

  std::array<std::array<std::uint8_t, 4>, 8> next_state{};
  std::array<std::array<std::uint8_t, 4>, 8> parity{};  // packed parity bits
  // pred[s][u] = unique state s' with next_state[s'][u] == s
  std::array<std::array<std::uint8_t, 4>, 8> pred{};
  // input that sends the feedback node to zero from a given state
  std::array<std::uint8_t, 8> tail_input{};
  // circ_map[N % 7][zero-start final state] -> circulation state
  std::array<std::array<std::uint8_t, 8>, 7> circ_map{};

  int steps_for_bits(int nbits) const { return nbits / bits_per_step; }
};

TrellisSpec build_binary_rsc();
TrellisSpec build_duobinary_rsc();

struct EncodeResult {
  BitVec systematic;               // equals the input data
  std::vector<BitVec> parity;      // one stream per parity bit, data steps
  BitVec tail_systematic;          // tail input bits (TailBits only)
  std::vector<BitVec> tail_parity; // per stream, 3 steps (TailBits only)
  int final_state = 0;
};

// data length must be divisible by bits_per_step. Bit k of a duo-binary
// couple: A = data[2j], B = data[2j+1].
EncodeResult encode(const TrellisSpec& t, const BitVec& data, Termination term,
                    int start_state = 0);

// Start state Sc with encode(..., Tailbiting, Sc).final_state == Sc.
// Requires the number of trellis steps to satisfy N % 7 != 0.
int circulation_state(const TrellisSpec& t, const BitVec& data);

}  // namespace turbolink::trellis
