#include "turbolink/modem.hpp"

#include "turbolink/rng.hpp"

#include <doctest.h>

#include <complex>

using namespace turbolink;
using modem::CVec;
using modem::Modulation;

namespace {

BitVec random_bits(Rng& rng, int n) {
  BitVec v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
  return v;
}

// generic max-log metric difference straight from the constellation search
LlrVec demap_reference(std::complex<double> z, std::complex<double> h, Modulation m, double nv) {
  const int bps = modem::bits_per_symbol(m);
  LlrVec out(bps);
  for (int bit = 0; bit < bps; ++bit) {
    double d0 = 1e300, d1 = 1e300;
    for (int word = 0; word < (1 << bps); ++word) {
      BitVec bits(bps);
      for (int i = 0; i < bps; ++i) bits[i] = (word >> i) & 1;
      const CVec x = modem::map_symbols(bits, m);
      const double d = std::norm(z - x[0]);
      if (bits[bit] == 0)
        d0 = std::min(d0, d);
      else
        d1 = std::min(d1, d);
    }
    out[bit] = std::norm(h) / nv * (d1 - d0);
  }
  return out;
}

}  // namespace

TEST_CASE("qpsk labeling and energy") {
  BitVec bits(2);
  bits << 0, 0;
  const CVec s = modem::map_symbols(bits, Modulation::Qpsk);
  CHECK(s[0].real() == doctest::Approx(M_SQRT1_2));
  CHECK(s[0].imag() == doctest::Approx(M_SQRT1_2));

  // all four points have unit energy
  for (int w = 0; w < 4; ++w) {
    BitVec b(2);
    b << (w & 1), ((w >> 1) & 1);
    CHECK(std::norm(modem::map_symbols(b, Modulation::Qpsk)[0]) == doctest::Approx(1.0));
  }
}

TEST_CASE("16qam constellation: unit mean energy and gray adjacency") {
  std::vector<std::complex<double>> pts;
  std::vector<int> labels;
  double energy = 0.0;
  for (int w = 0; w < 16; ++w) {
    BitVec b(4);
    for (int i = 0; i < 4; ++i) b[i] = (w >> i) & 1;
    const auto s = modem::map_symbols(b, Modulation::Qam16)[0];
    pts.push_back(s);
    labels.push_back(w);
    energy += std::norm(s);
  }
  CHECK(energy / 16.0 == doctest::Approx(1.0).epsilon(1e-12));

  // neighbours at minimum distance differ in exactly one bit
  const double dmin = 2.0 / std::sqrt(10.0);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i] - pts[j]) < dmin * 1.01)
        CHECK(__builtin_popcount(static_cast<unsigned>(labels[i] ^ labels[j])) == 1);
}

TEST_CASE("map then hard-demap is the identity") {
  Rng rng(41);
  for (const auto m : {Modulation::Qpsk, Modulation::Qam16}) {
    const BitVec bits = random_bits(rng, 4 * 5 * 12);
    const CVec s = modem::map_symbols(bits, m);
    CHECK((modem::hard_demap(s, m) == bits).all());
  }
  CHECK_THROWS_AS((void)modem::map_symbols(BitVec::Zero(5), Modulation::Qam16), std::invalid_argument);
}

TEST_CASE("llr demapping matches the constellation-search reference") {
  Rng rng(42);
  for (const auto m : {Modulation::Qpsk, Modulation::Qam16}) {
    for (int trial = 0; trial < 200; ++trial) {
      const std::complex<double> z{2.0 * rng.gaussian(), 2.0 * rng.gaussian()};
      const std::complex<double> h{rng.gaussian(), rng.gaussian()};
      const double nv = 0.1 + rng.uniform();
      const LlrVec got = modem::demap_llr(z, h, m, nv);
      const LlrVec want = demap_reference(z, h, m, nv);
      for (Eigen::Index i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("llrs on a constellation point recover its bits") {
  Rng rng(43);
  for (const auto m : {Modulation::Qpsk, Modulation::Qam16}) {
    const int bps = modem::bits_per_symbol(m);
    const BitVec bits = random_bits(rng, bps);
    const CVec s = modem::map_symbols(bits, m);
    const LlrVec llr = modem::demap_llr(s[0], {1.0, 0.0}, m, 0.5);
    for (int i = 0; i < bps; ++i) CHECK((llr[i] < 0) == (bits[i] == 1));
  }
}

TEST_CASE("qpsk llr closed form and noise_var linearity") {
  const std::complex<double> z{0.4, -0.7};
  const LlrVec a = modem::demap_llr(z, {1.0, 0.0}, Modulation::Qpsk, 0.5);
  CHECK(a[0] == doctest::Approx(2.0 * M_SQRT2 * z.real() / 0.5));
  CHECK(a[1] == doctest::Approx(2.0 * M_SQRT2 * z.imag() / 0.5));

  const LlrVec b = modem::demap_llr(z, {1.0, 0.0}, Modulation::Qpsk, 1.0);
  CHECK(b[0] == doctest::Approx(0.5 * a[0]));
  CHECK(b[1] == doctest::Approx(0.5 * a[1]));

  CHECK_THROWS_AS((void)modem::demap_llr(z, {1.0, 0.0}, Modulation::Qpsk, 0.0), std::invalid_argument);
}

TEST_CASE("ofdm round trip, parseval and linearity") {
  const modem::OfdmConfig cfg;
  Rng rng(44);
  CVec grid(cfg.used_subcarriers);
  for (int i = 0; i < cfg.used_subcarriers; ++i) grid[i] = {rng.gaussian(), rng.gaussian()};

  const CVec t = modem::ofdm_modulate(grid, cfg);
  CHECK(t.size() == cfg.samples_per_symbol());
  const CVec back = modem::ofdm_demodulate(t, cfg);
  CHECK((back - grid).cwiseAbs().maxCoeff() < 1e-10);

  // unitary transform: energy of the fft window equals the grid energy
  const double window_energy = t.segment(cfg.cp_length, cfg.fft_size).squaredNorm();
  CHECK(window_energy == doctest::Approx(grid.squaredNorm()).epsilon(1e-10));

  // superposition
  CVec grid2(cfg.used_subcarriers);
  for (int i = 0; i < cfg.used_subcarriers; ++i) grid2[i] = {rng.gaussian(), rng.gaussian()};
  const CVec sum = modem::ofdm_modulate(grid + grid2, cfg);
  CHECK((sum - t - modem::ofdm_modulate(grid2, cfg)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("single active subcarrier gives a pure exponential") {
  const modem::OfdmConfig cfg;
  CVec grid = CVec::Zero(cfg.used_subcarriers);
  const int i0 = 200;
  grid[i0] = {1.0, 0.0};
  const CVec t = modem::ofdm_modulate(grid, cfg);
  const int bin = cfg.bin_of(i0);
  const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.fft_size));
  for (int n = 0; n < cfg.fft_size; ++n) {
    const auto want = std::polar(amp, 2.0 * M_PI * bin * n / cfg.fft_size);
    CHECK(std::abs(t[cfg.cp_length + n] - want) < 1e-10);
  }
}

TEST_CASE("zero forcing equalization") {
  Rng rng(45);
  const int n = 64;
  CVec x(n), h(n);
  for (int i = 0; i < n; ++i) {
    x[i] = {rng.gaussian(), rng.gaussian()};
    h[i] = {rng.gaussian(), rng.gaussian()};
  }
  // identity channel
  CHECK((modem::zf_equalize(x, CVec::Ones(n)) - x).cwiseAbs().maxCoeff() == 0.0);
  // exact recovery of a noiseless transmission
  const CVec y = h.cwiseProduct(x);
  CHECK((modem::zf_equalize(y, h) - x).cwiseAbs().maxCoeff() < 1e-12);
  // erased subcarrier yields zero llrs downstream
  const LlrVec llr = modem::demap_llr(std::complex<double>(0.3, 0.1), {0.0, 0.0},
                                      Modulation::Qpsk, 0.5);
  CHECK((llr == 0.0).all());
}

TEST_CASE("post-zf noise variance matches the demapper compensation") {
  Rng rng(46);
  const double nv = 0.25;
  const std::complex<double> h{0.6, -0.3};
  const int trials = 100000;
  double acc = 0.0;
  for (int i = 0; i < trials; ++i) {
    const std::complex<double> noise = std::sqrt(nv) * rng.cgaussian();
    const std::complex<double> z = noise / h;  // x subtracted out
    acc += std::norm(z);
  }
  const double want = nv / std::norm(h);
  CHECK(acc / trials == doctest::Approx(want).epsilon(0.02));
}
