#include "turbolink/turbo.hpp"

#include <algorithm>
#include <stdexcept>

namespace turbolink::turbo {

namespace {

using permute::CoupleInterleaver;
using permute::PuncturePattern;
using permute::QppInterleaver;
using trellis::Termination;

const trellis::TrellisSpec& binary_trellis() {
  static const trellis::TrellisSpec t = trellis::build_binary_rsc();
  return t;
}

const trellis::TrellisSpec& duo_trellis() {
  static const trellis::TrellisSpec t = trellis::build_duobinary_rsc();
  return t;
}

std::vector<std::uint8_t> ones(int n) { return std::vector<std::uint8_t>(n, 1); }
std::vector<std::uint8_t> zeros(int n) { return std::vector<std::uint8_t>(n, 0); }

std::vector<std::uint8_t> mask(std::initializer_list<int> m) {
  std::vector<std::uint8_t> out;
  for (int v : m) out.push_back(static_cast<std::uint8_t>(v));
  return out;
}

// Couple-level channel term of the a-posteriori decomposition: the LLR of
// couple v against 00 contributed by the systematic observations alone.
SymbolLlrMat couple_channel(const LlrVec& a, const LlrVec& b) {
  SymbolLlrMat c(3, a.size());
  c.row(0) = -b.transpose();
  c.row(1) = -a.transpose();
  c.row(2) = -(a + b).transpose();
  return c;
}

SymbolLlrMat clamp_sym(const SymbolLlrMat& m) { return m.min(kLlrClamp).max(-kLlrClamp); }

}  // namespace

PuncturePattern binary_puncture(std::pair<int, int> rate) {
  PuncturePattern p;
  p.rate_num = rate.first;
  p.rate_den = rate.second;
  if (rate == std::pair{1, 3}) {
    p.period = 1;
    p.keep = {ones(1), ones(1), ones(1)};
  } else if (rate == std::pair{1, 2}) {
    p.period = 2;
    p.keep = {ones(2), mask({1, 0}), mask({0, 1})};
  } else if (rate == std::pair{2, 3}) {
    p.period = 4;
    p.keep = {ones(4), mask({1, 0, 0, 0}), mask({0, 0, 1, 0})};
  } else if (rate == std::pair{3, 4}) {
    p.period = 6;
    p.keep = {ones(6), mask({1, 0, 0, 0, 0, 0}), mask({0, 0, 0, 1, 0, 0})};
  } else {
    throw std::invalid_argument("rate: unsupported binary code rate");
  }
  return p;
}

PuncturePattern duobinary_puncture(std::pair<int, int> rate) {
  PuncturePattern p;
  p.rate_num = rate.first;
  p.rate_den = rate.second;
  if (rate == std::pair{1, 3}) {
    p.period = 1;
    p.keep = {ones(1), ones(1), ones(1), ones(1), ones(1), ones(1)};
  } else if (rate == std::pair{1, 2}) {
    // one parity pair per step, alternating encoders
    p.period = 2;
    p.keep = {ones(2), ones(2), mask({1, 0}), mask({1, 0}), mask({0, 1}), mask({0, 1})};
  } else if (rate == std::pair{2, 3}) {
    p.period = 2;
    p.keep = {ones(2), ones(2), mask({1, 0}), zeros(2), mask({0, 1}), zeros(2)};
  } else if (rate == std::pair{3, 4}) {
    p.period = 3;
    p.keep = {ones(3), ones(3), mask({1, 0, 0}), zeros(3), mask({0, 1, 0}), zeros(3)};
  } else {
    throw std::invalid_argument("rate: unsupported duo-binary code rate");
  }
  return p;
}

int TurboConfig::data_steps() const {
  return code == CodeType::Binary ? block_bits : block_bits / 2;
}

PuncturePattern TurboConfig::puncture_pattern() const {
  return code == CodeType::Binary ? binary_puncture(rate) : duobinary_puncture(rate);
}

void TurboConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations: must be at least 1");
  if (block_bits <= 0) throw std::invalid_argument("block_bits: must be positive");
  if (code == CodeType::Binary) {
    const auto& sizes = QppInterleaver::supported_sizes();
    if (std::find(sizes.begin(), sizes.end(), block_bits) == sizes.end())
      throw std::invalid_argument("block_bits: unsupported binary block size " + std::to_string(block_bits));
  } else {
    if (block_bits % 2 != 0) throw std::invalid_argument("block_bits: duo-binary block needs an even bit count");
    const int n = block_bits / 2;
    const auto& sizes = CoupleInterleaver::supported_sizes();
    if (std::find(sizes.begin(), sizes.end(), n) == sizes.end())
      throw std::invalid_argument("block_bits: unsupported duo-binary block size " + std::to_string(block_bits));
    if (n % 7 == 0)
      throw std::invalid_argument("block_bits: couple count is a multiple of the recursion period 7");
  }
  const PuncturePattern p = puncture_pattern();
  if (data_steps() % p.period != 0)
    throw std::invalid_argument("rate: puncturing period does not divide the block length");
  if (sova_update_depth < 15) throw std::invalid_argument("sova_update_depth: must be at least 15");
}

EncodedBlock turbo_encode(const TurboConfig& cfg, const BitVec& data) {
  cfg.validate();
  if (data.size() != cfg.block_bits) throw std::invalid_argument("data: length does not match block_bits");
  EncodedBlock out;

  if (cfg.code == CodeType::Binary) {
    const auto& t = binary_trellis();
    const QppInterleaver qpp = QppInterleaver::for_block(cfg.block_bits);
    const auto enc1 = trellis::encode(t, data, Termination::TailBits);
    const BitVec data2 = qpp.perm().interleave(data);
    const auto enc2 = trellis::encode(t, data2, Termination::TailBits);

    const std::vector<BitVec> streams = {data, enc1.parity[0], enc2.parity[0]};
    const BitVec payload = permute::puncture(streams, cfg.puncture_pattern());
    out.tx_bits.resize(payload.size() + 12);
    out.tx_bits.head(payload.size()) = payload;
    Eigen::Index w = payload.size();
    for (const auto* e : {&enc1, &enc2})
      for (int k = 0; k < 3; ++k) {
        out.tx_bits[w++] = e->tail_systematic[k];
        out.tx_bits[w++] = e->tail_parity[0][k];
      }
  } else {
    const auto& t = duo_trellis();
    const int n = cfg.block_bits / 2;
    const CoupleInterleaver ci = CoupleInterleaver::for_block(n);
    const int sc1 = trellis::circulation_state(t, data);
    const auto enc1 = trellis::encode(t, data, Termination::Tailbiting, sc1);
    const BitVec data2 = ci.interleave_bits(data);
    const int sc2 = trellis::circulation_state(t, data2);
    const auto enc2 = trellis::encode(t, data2, Termination::Tailbiting, sc2);

    BitVec a(n), b(n);
    for (int j = 0; j < n; ++j) {
      a[j] = data[2 * j];
      b[j] = data[2 * j + 1];
    }
    const std::vector<BitVec> streams = {a, b, enc1.parity[0], enc1.parity[1],
                                         enc2.parity[0], enc2.parity[1]};
    out.tx_bits = permute::puncture(streams, cfg.puncture_pattern());
  }
  return out;
}

int tx_bits_per_block(const TurboConfig& cfg) {
  const PuncturePattern p = cfg.puncture_pattern();
  const int payload = cfg.data_steps() / p.period * p.kept_per_period();
  return payload + (cfg.code == CodeType::Binary ? 12 : 0);
}

ChannelLlrs depuncture_rx(const TurboConfig& cfg, const LlrVec& rx) {
  cfg.validate();
  if (rx.size() != tx_bits_per_block(cfg)) throw std::invalid_argument("rx: llr count does not match block");
  ChannelLlrs out;
  const int steps = cfg.data_steps();

  if (cfg.code == CodeType::Binary) {
    const int payload = static_cast<int>(rx.size()) - 12;
    auto streams = permute::depuncture(rx.head(payload), cfg.puncture_pattern(), steps);
    out.sys.resize(steps + 3);
    out.par1.resize(steps + 3);
    out.par2.resize(steps + 3);
    out.sys2_tail.resize(3);
    out.sys.head(steps) = streams[0];
    out.par1.head(steps) = streams[1];
    out.par2.head(steps) = streams[2];
    Eigen::Index r = payload;
    for (int k = 0; k < 3; ++k) {
      out.sys[steps + k] = rx[r++];
      out.par1[steps + k] = rx[r++];
    }
    for (int k = 0; k < 3; ++k) {
      out.sys2_tail[k] = rx[r++];
      out.par2[steps + k] = rx[r++];
    }
  } else {
    auto streams = permute::depuncture(rx, cfg.puncture_pattern(), steps);
    out.a = std::move(streams[0]);
    out.b = std::move(streams[1]);
    out.y1 = std::move(streams[2]);
    out.w1 = std::move(streams[3]);
    out.y2 = std::move(streams[4]);
    out.w2 = std::move(streams[5]);
  }
  return out;
}

LlrVec extrinsic_extract(const LlrVec& aposteriori, const LlrVec& channel_sys, const LlrVec& apriori) {
  if (aposteriori.size() != channel_sys.size() || aposteriori.size() != apriori.size())
    throw std::invalid_argument("extrinsic_extract: length mismatch");
  return aposteriori - channel_sys - apriori;
}

namespace {

DecodeResult decode_binary(const ChannelLlrs& rx, const TurboConfig& cfg) {
  const auto& t = binary_trellis();
  const int k_bits = cfg.block_bits;
  const int n = k_bits + 3;
  if (rx.sys.size() != n || rx.par1.size() != n || rx.par2.size() != n || rx.sys2_tail.size() != 3)
    throw std::invalid_argument("rx: stream lengths inconsistent with configuration");
  const QppInterleaver qpp = QppInterleaver::for_block(k_bits);
  const auto& perm = qpp.perm();

  const LlrVec sys1 = clamp_llrs(rx.sys);
  const LlrVec par1 = clamp_llrs(rx.par1);
  const LlrVec par2 = clamp_llrs(rx.par2);
  LlrVec sys2(n);
  sys2.head(k_bits) = perm.interleave(LlrVec(sys1.head(k_bits)));
  sys2.tail(3) = clamp_llrs(rx.sys2_tail);

  LlrVec la1 = LlrVec::Zero(n), la2 = LlrVec::Zero(n);
  DecodeResult out;
  out.per_iteration_bits.reserve(cfg.iterations);

  const auto run_siso = [&](const LlrVec& sys, const LlrVec& par, const LlrVec& apriori) {
    return cfg.algo == SisoAlgo::MaxLogMap
               ? siso::max_log_map(t, sys, par, apriori, Termination::TailBits, cfg.tb_mode)
               : siso::sova(t, sys, par, apriori, Termination::TailBits, cfg.sova_update_depth);
  };

  BitVec prev_bits;
  for (int it = 0; it < cfg.iterations; ++it) {
    const LlrVec apr1 = la1.head(k_bits);
    auto r1 = run_siso(sys1, par1, la1);
    out.ops += r1.ops;
    LlrVec le1 = extrinsic_extract(r1.aposteriori, sys1.head(k_bits), apr1);
    if (cfg.algo == SisoAlgo::Sova && cfg.sova_extrinsic_scale != 1.0) le1 *= cfg.sova_extrinsic_scale;
    la2.head(k_bits) = clamp_llrs(perm.interleave(le1));

    const LlrVec apr2 = la2.head(k_bits);
    auto r2 = run_siso(sys2, par2, la2);
    out.ops += r2.ops;
    LlrVec le2 = extrinsic_extract(r2.aposteriori, sys2.head(k_bits), apr2);
    if (cfg.algo == SisoAlgo::Sova && cfg.sova_extrinsic_scale != 1.0) le2 *= cfg.sova_extrinsic_scale;
    la1.head(k_bits) = clamp_llrs(perm.deinterleave(le2));

    const LlrVec app = perm.deinterleave(LlrVec(r2.aposteriori));
    BitVec bits(k_bits);
    for (int i = 0; i < k_bits; ++i) bits[i] = app[i] < 0.0 ? 1 : 0;
    out.per_iteration_bits.push_back(bits);
    out.iterations_run = it + 1;

    if (cfg.trace) {
      IterationTrace tr;
      tr.app1 = r1.aposteriori;
      tr.extrinsic1 = le1;
      tr.apriori1 = apr1;
      tr.apriori2 = apr2;
      tr.aposteriori = app;
      out.trace.push_back(std::move(tr));
    }

    if (cfg.early_stop && it > 0 && prev_bits.size() == bits.size() && (bits == prev_bits).all()) break;
    prev_bits = bits;
  }
  out.bits = out.per_iteration_bits.back();
  return out;
}

DecodeResult decode_duobinary(const ChannelLlrs& rx, const TurboConfig& cfg) {
  const auto& t = duo_trellis();
  const int n = cfg.block_bits / 2;
  if (rx.a.size() != n || rx.b.size() != n || rx.y1.size() != n || rx.w1.size() != n ||
      rx.y2.size() != n || rx.w2.size() != n)
    throw std::invalid_argument("rx: stream lengths inconsistent with configuration");
  const CoupleInterleaver ci = CoupleInterleaver::for_block(n);

  const LlrVec a1 = clamp_llrs(rx.a), b1 = clamp_llrs(rx.b);
  const LlrVec y1 = clamp_llrs(rx.y1), w1 = clamp_llrs(rx.w1);
  const LlrVec y2 = clamp_llrs(rx.y2), w2 = clamp_llrs(rx.w2);
  LlrVec a2, b2;
  ci.interleave_pair(a1, b1, a2, b2);

  const SymbolLlrMat chan1 = couple_channel(a1, b1);
  const SymbolLlrMat chan2 = couple_channel(a2, b2);

  SymbolLlrMat la1 = SymbolLlrMat::Zero(3, n);
  DecodeResult out;
  out.per_iteration_bits.reserve(cfg.iterations);

  const auto run_siso = [&](const LlrVec& a, const LlrVec& b, const LlrVec& y, const LlrVec& w,
                            const SymbolLlrMat& apriori) {
    return cfg.algo == SisoAlgo::MaxLogMap
               ? siso::max_log_map_duo(t, a, b, y, w, apriori, Termination::Tailbiting, cfg.tb_mode)
               : siso::sova_duo(t, a, b, y, w, apriori, Termination::Tailbiting, cfg.sova_update_depth);
  };

  BitVec prev_bits;
  for (int it = 0; it < cfg.iterations; ++it) {
    const SymbolLlrMat apr1 = la1;
    auto r1 = run_siso(a1, b1, y1, w1, la1);
    out.ops += r1.ops;
    SymbolLlrMat le1 = r1.aposteriori - chan1 - apr1;
    if (cfg.algo == SisoAlgo::Sova && cfg.sova_extrinsic_scale != 1.0) le1 *= cfg.sova_extrinsic_scale;
    const SymbolLlrMat la2 = clamp_sym(ci.interleave_symbols(le1));

    auto r2 = run_siso(a2, b2, y2, w2, la2);
    out.ops += r2.ops;
    SymbolLlrMat le2 = r2.aposteriori - chan2 - la2;
    if (cfg.algo == SisoAlgo::Sova && cfg.sova_extrinsic_scale != 1.0) le2 *= cfg.sova_extrinsic_scale;
    la1 = clamp_sym(ci.deinterleave_symbols(le2));

    const SymbolLlrMat app = ci.deinterleave_symbols(r2.aposteriori);
    BitVec bits(cfg.block_bits);
    for (int j = 0; j < n; ++j) {
      int best = 0;
      double bestv = 0.0;  // couple 00 reference
      for (int v = 1; v < 4; ++v)
        if (app(v - 1, j) > bestv) {
          bestv = app(v - 1, j);
          best = v;
        }
      bits[2 * j] = static_cast<std::uint8_t>((best >> 1) & 1);
      bits[2 * j + 1] = static_cast<std::uint8_t>(best & 1);
    }
    out.per_iteration_bits.push_back(bits);
    out.iterations_run = it + 1;

    if (cfg.trace) {
      IterationTrace tr;
      tr.app1_sym = r1.aposteriori;
      tr.extrinsic1_sym = le1;
      tr.apriori1_sym = apr1;
      tr.apriori2_sym = la2;
      tr.aposteriori_sym = app;
      out.trace.push_back(std::move(tr));
    }

    if (cfg.early_stop && it > 0 && prev_bits.size() == bits.size() && (bits == prev_bits).all()) break;
    prev_bits = bits;
  }
  out.bits = out.per_iteration_bits.back();
  return out;
}

}  // namespace

DecodeResult turbo_decode(const ChannelLlrs& rx, const TurboConfig& cfg) {
  cfg.validate();
  if (cfg.code == CodeType::Binary) return decode_binary(rx, cfg);
  return decode_duobinary(rx, cfg);
}

}  // namespace turbolink::turbo
