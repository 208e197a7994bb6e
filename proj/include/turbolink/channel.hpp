#pragma once

#include "turbolink/modem.hpp"
#include "turbolink/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace turbolink::channel {

using modem::CVec;

enum class ProfileName { Epa, Eva };

ProfileName profile_from_string(const std::string& s);
std::string to_string(ProfileName p);

// Tapped-delay-line profile; mean tap powers are normalized to total linear
// power 1 so that E|H|^2 = 1 per subcarrier.
struct TdlProfile {
  ProfileName name = ProfileName::Epa;
  std::vector<double> delay_ns;
  std::vector<double> power_db;      // as tabulated, before normalization
  std::vector<double> power_linear;  // normalized
  double doppler_hz = 0.0;

  int num_taps() const { return static_cast<int>(delay_ns.size()); }
};

// f_d = v * f_c / c with c = 3e8 m/s.
TdlProfile build_profile(ProfileName name, double speed_kmh, double carrier_freq);

// Clarke sum-of-sinusoids Rayleigh fading, 64 sinusoids per tap, independent
// taps, deterministic per seed. Gains are evaluated lazily at sample indexes.
class ChannelRealization {
 public:
  ChannelRealization(const TdlProfile& profile, std::int64_t duration_samples, double sampling_rate,
                     std::uint64_t seed);

  const TdlProfile& profile() const { return profile_; }
  std::int64_t duration() const { return duration_; }
  double sampling_rate() const { return fs_; }

  // complex gain of one tap at one sample instant
  std::complex<double> tap_gain(int tap, std::int64_t sample) const;
  // all tap gains at one instant
  CVec gains_at(std::int64_t sample) const;
  // whole time series of one tap (for the statistical checks)
  CVec tap_series(int tap, std::int64_t first_sample, std::int64_t count) const;

  // tap delays rounded to the sampling grid
  const std::vector<int>& tap_delay_samples() const { return delays_; }
  int max_delay_samples() const { return delays_.empty() ? 0 : delays_.back(); }

 private:
  TdlProfile profile_;
  std::int64_t duration_;
  double fs_;
  std::vector<int> delays_;
  // per tap, per sinusoid: angular rate (rad/sample) and the two phases
  struct Sos {
    std::vector<double> rate, phi, psi;
  };
  std::vector<Sos> sos_;
};

ChannelRealization generate_fading(const TdlProfile& profile, std::int64_t duration_samples,
                                   double sampling_rate, std::uint64_t seed);

// Tapped-delay convolution plus complex AWGN with per-sample variance
// 10^(-snr_db/10) (unit average received power per used subcarrier under the
// unitary OFDM convention). Tap gains are held constant over hold_samples
// blocks offset so that a hold block spans one OFDM symbol including its CP;
// gains are evaluated at the midpoint of the symbol's FFT window.
CVec apply_channel(const CVec& samples, const ChannelRealization& real, double snr_db,
                   std::uint64_t noise_seed, bool noise_enabled = true, int hold_samples = 1,
                   int eval_offset = 0);

// Ideal CSI: exact transform of the tap gains sampled at the midpoint of the
// FFT window of the given OFDM symbol (block fading per symbol).
CVec frequency_response(const ChannelRealization& real, const modem::OfdmConfig& cfg, int symbol_index);

// Sample instant at which a symbol's gains are evaluated.
std::int64_t symbol_eval_sample(const modem::OfdmConfig& cfg, int symbol_index);

}  // namespace turbolink::channel
