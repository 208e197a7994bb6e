#include "turbolink/modem.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>

namespace turbolink::modem {

namespace {

constexpr double kQpskAmp = M_SQRT1_2;
const double kQamAmp = 1.0 / std::sqrt(10.0);

// 16QAM Gray level for (sign bit, magnitude bit)
inline double qam16_level(std::uint8_t sign, std::uint8_t mag) {
  const double a = mag ? 3.0 : 1.0;
  return (sign ? -a : a) * kQamAmp;
}

}  // namespace

int bits_per_symbol(Modulation m) { return m == Modulation::Qpsk ? 2 : 4; }

CVec map_symbols(const BitVec& bits, Modulation m) {
  const int bps = bits_per_symbol(m);
  if (bits.size() % bps != 0)
    throw std::invalid_argument("map_symbols: bit count not divisible by bits per symbol");
  const Eigen::Index n = bits.size() / bps;
  CVec out(n);
  if (m == Modulation::Qpsk) {
    for (Eigen::Index i = 0; i < n; ++i)
      out[i] = {bpsk(bits[2 * i]) * kQpskAmp, bpsk(bits[2 * i + 1]) * kQpskAmp};
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      out[i] = {qam16_level(bits[4 * i], bits[4 * i + 2]), qam16_level(bits[4 * i + 1], bits[4 * i + 3])};
  }
  return out;
}

BitVec hard_demap(const CVec& symbols, Modulation m) {
  const int bps = bits_per_symbol(m);
  BitVec out(symbols.size() * bps);
  for (Eigen::Index i = 0; i < symbols.size(); ++i) {
    const double re = symbols[i].real(), im = symbols[i].imag();
    if (m == Modulation::Qpsk) {
      out[2 * i] = re < 0;
      out[2 * i + 1] = im < 0;
    } else {
      out[4 * i] = re < 0;
      out[4 * i + 1] = im < 0;
      out[4 * i + 2] = std::abs(re) > 2.0 * kQamAmp;
      out[4 * i + 3] = std::abs(im) > 2.0 * kQamAmp;
    }
  }
  return out;
}

LlrVec demap_llr(std::complex<double> z, std::complex<double> h, Modulation m, double noise_var) {
  if (noise_var <= 0.0) throw std::invalid_argument("demap_llr: noise_var must be positive");
  const int bps = bits_per_symbol(m);
  LlrVec out = LlrVec::Zero(bps);
  const double h2 = std::norm(h);
  if (h2 < kErasureThreshold * kErasureThreshold) return out;  // erased subcarrier
  const double scale = h2 / noise_var;

  if (m == Modulation::Qpsk) {
    // Gray QPSK closed form of the max-log metric difference
    out[0] = scale * 4.0 * kQpskAmp * z.real();
    out[1] = scale * 4.0 * kQpskAmp * z.imag();
    return out;
  }

  // 16QAM: per axis, min distance over the two levels of each bit hypothesis
  const double levels[4] = {qam16_level(0, 0), qam16_level(0, 1), qam16_level(1, 0), qam16_level(1, 1)};
  const auto axis_llrs = [&](double v, double& sign_llr, double& mag_llr) {
    double d[4];
    for (int i = 0; i < 4; ++i) d[i] = (v - levels[i]) * (v - levels[i]);
    const double min_s0 = std::min(d[0], d[1]);  // sign bit 0: +1, +3
    const double min_s1 = std::min(d[2], d[3]);
    const double min_m0 = std::min(d[0], d[2]);  // magnitude bit 0: +-1
    const double min_m1 = std::min(d[1], d[3]);
    sign_llr = scale * (min_s1 - min_s0);
    mag_llr = scale * (min_m1 - min_m0);
  };
  double s, g;
  axis_llrs(z.real(), s, g);
  out[0] = s;
  out[2] = g;
  axis_llrs(z.imag(), s, g);
  out[1] = s;
  out[3] = g;
  return out;
}

LlrVec demap_llr(const CVec& z, const CVec& h, Modulation m, double noise_var) {
  if (z.size() != h.size()) throw std::invalid_argument("demap_llr: gain count mismatch");
  const int bps = bits_per_symbol(m);
  LlrVec out(z.size() * bps);
  for (Eigen::Index i = 0; i < z.size(); ++i)
    out.segment(i * bps, bps) = demap_llr(z[i], h[i], m, noise_var);
  return out;
}

int OfdmConfig::bin_of(int i) const {
  const int half = used_subcarriers / 2;
  // subcarrier index -half..-1, +1..+half around DC
  const int k = (i < half) ? i - half : i - half + 1;
  return k >= 0 ? k : k + fft_size;
}

CVec ofdm_modulate(const CVec& symbols, const OfdmConfig& cfg) {
  if (symbols.size() % cfg.used_subcarriers != 0)
    throw std::invalid_argument("ofdm_modulate: symbols must fill whole OFDM symbols");
  const int n_sym = static_cast<int>(symbols.size()) / cfg.used_subcarriers;
  const int spb = cfg.samples_per_symbol();
  // Eigen's inverse transform includes 1/N; rescale to the unitary convention
  const double inv_scale = std::sqrt(static_cast<double>(cfg.fft_size));

  Eigen::FFT<double> fft;
  CVec out(static_cast<Eigen::Index>(n_sym) * spb);
  std::vector<std::complex<double>> freq(cfg.fft_size), time(cfg.fft_size);
  for (int s = 0; s < n_sym; ++s) {
    std::fill(freq.begin(), freq.end(), std::complex<double>(0.0, 0.0));
    for (int i = 0; i < cfg.used_subcarriers; ++i)
      freq[cfg.bin_of(i)] = symbols[static_cast<Eigen::Index>(s) * cfg.used_subcarriers + i];
    fft.inv(time, freq);
    Eigen::Index w = static_cast<Eigen::Index>(s) * spb;
    for (int n = 0; n < cfg.cp_length; ++n)
      out[w + n] = time[cfg.fft_size - cfg.cp_length + n] * inv_scale;
    for (int n = 0; n < cfg.fft_size; ++n) out[w + cfg.cp_length + n] = time[n] * inv_scale;
  }
  return out;
}

CVec ofdm_demodulate(const CVec& samples, const OfdmConfig& cfg) {
  const int spb = cfg.samples_per_symbol();
  if (samples.size() % spb != 0)
    throw std::invalid_argument("ofdm_demodulate: sample count not a whole number of OFDM symbols");
  const int n_sym = static_cast<int>(samples.size()) / spb;
  const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.fft_size));

  Eigen::FFT<double> fft;
  CVec out(static_cast<Eigen::Index>(n_sym) * cfg.used_subcarriers);
  std::vector<std::complex<double>> freq(cfg.fft_size), time(cfg.fft_size);
  for (int s = 0; s < n_sym; ++s) {
    const Eigen::Index r = static_cast<Eigen::Index>(s) * spb + cfg.cp_length;
    for (int n = 0; n < cfg.fft_size; ++n) time[n] = samples[r + n];
    fft.fwd(freq, time);
    for (int i = 0; i < cfg.used_subcarriers; ++i)
      out[static_cast<Eigen::Index>(s) * cfg.used_subcarriers + i] = freq[cfg.bin_of(i)] * scale;
  }
  return out;
}

CVec zf_equalize(const CVec& y, const CVec& h) {
  if (y.size() != h.size()) throw std::invalid_argument("zf_equalize: gain count mismatch");
  CVec out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
    out[i] = std::abs(h[i]) < kErasureThreshold ? std::complex<double>(0.0, 0.0) : y[i] / h[i];
  return out;
}

}  // namespace turbolink::modem
