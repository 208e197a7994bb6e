#pragma once

#include "turbolink/types.hpp"

#include <complex>

namespace turbolink::modem {

using CVec = Eigen::VectorXcd;

enum class Modulation { Qpsk, Qam16 };

int bits_per_symbol(Modulation m);

// Gray labelings, unit average energy. QPSK: bits (b0, b1) -> ((1-2*b0) +
// j(1-2*b1))/sqrt(2). 16QAM: I from (b0, b2), Q from (b1, b3) with levels
// {00 -> +1, 01 -> +3, 10 -> -1, 11 -> -3}/sqrt(10).
CVec map_symbols(const BitVec& bits, Modulation m);

BitVec hard_demap(const CVec& symbols, Modulation m);

// Max-log bit LLRs. With z the ZF-equalized symbol and h the channel gain of
// its subcarrier, LLR_i = (|h|^2/noise_var) * [min_{bit=1}|z-x|^2 -
// min_{bit=0}|z-x|^2]; the |h|^2 factor undoes the ZF noise enhancement.
// Gains with |h| below the erasure threshold give LLR 0.
LlrVec demap_llr(const CVec& z, const CVec& h, Modulation m, double noise_var);
LlrVec demap_llr(std::complex<double> z, std::complex<double> h, Modulation m, double noise_var);

inline constexpr double kErasureThreshold = 1e-12;

// 512-subcarrier numerology: 300 used subcarriers centered around an unused
// DC, cyclic prefix of 1/8 symbol, 15 kHz spacing (5 MHz channel).
struct OfdmConfig {
  int fft_size = 512;
  int used_subcarriers = 300;
  int cp_length = 64;
  double sampling_rate = 7.68e6;
  double carrier_freq = 2.5e9;
  double bandwidth = 5e6;

  int samples_per_symbol() const { return fft_size + cp_length; }
  // FFT bin of the i-th used subcarrier, i = 0..used-1, ordered from the most
  // negative frequency to the most positive, DC skipped.
  int bin_of(int i) const;
};

// Unitary transforms; input symbols fill whole OFDM symbols (pad with zeros).
CVec ofdm_modulate(const CVec& symbols, const OfdmConfig& cfg);
CVec ofdm_demodulate(const CVec& samples, const OfdmConfig& cfg);

// Per-subcarrier division; gains below the erasure threshold yield 0.
CVec zf_equalize(const CVec& y, const CVec& h);

}  // namespace turbolink::modem
