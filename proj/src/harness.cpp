#include "turbolink/harness.hpp"

#include "turbolink/rng.hpp"
#include "turbolink/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace turbolink::harness {

namespace {

constexpr std::int64_t kBatchBlocks = 256;  // stop rule evaluated at batch edges

std::string mod_name(modem::Modulation m) { return m == modem::Modulation::Qpsk ? "qpsk" : "16qam"; }
std::string code_name(turbo::CodeType c) { return c == turbo::CodeType::Binary ? "binary" : "duo"; }
std::string algo_name(turbo::SisoAlgo a) {
  return a == turbo::SisoAlgo::MaxLogMap ? "max-log-map" : "sova";
}

// Full per-block pipeline: payload -> turbo encode -> channel interleave ->
// mapping -> OFDM -> fading+noise -> ZF -> demap -> deinterleave -> decode.
turbo::DecodeResult decode_one_block(const SimConfig& cfg, double snr_db, std::int64_t block_index,
                                     BitVec& data_out) {
  const turbo::TurboConfig tcfg = cfg.turbo_config();
  const int tx_bits = turbo::tx_bits_per_block(tcfg);
  const int bps = modem::bits_per_symbol(cfg.mod);
  const int n_mod = tx_bits / bps;
  const int n_ofdm = (n_mod + cfg.ofdm.used_subcarriers - 1) / cfg.ofdm.used_subcarriers;
  const int spb = cfg.ofdm.samples_per_symbol();

  const std::uint64_t point_seed =
      split_seed(cfg.seed, static_cast<std::uint64_t>(std::llround(snr_db * 1000.0)) ^ 0x5eedULL);
  const std::uint64_t block_seed = split_seed(point_seed, static_cast<std::uint64_t>(block_index));

  Rng data_rng(split_seed(block_seed, 1));
  data_out.resize(cfg.block_bits);
  for (int i = 0; i < cfg.block_bits; ++i) data_out[i] = static_cast<std::uint8_t>(data_rng.next_u64() & 1);

  const turbo::EncodedBlock enc = turbo_encode(tcfg, data_out);
  const permute::Permutation chil = permute::channel_interleaver(tx_bits, split_seed(cfg.seed, 0xc41));
  const BitVec tx = chil.interleave(enc.tx_bits);

  modem::CVec syms = modem::map_symbols(tx, cfg.mod);
  modem::CVec grid = modem::CVec::Zero(static_cast<Eigen::Index>(n_ofdm) * cfg.ofdm.used_subcarriers);
  grid.head(syms.size()) = syms;

  const modem::CVec time = modem::ofdm_modulate(grid, cfg.ofdm);

  const channel::TdlProfile prof =
      channel::build_profile(cfg.profile, cfg.speed_kmh, cfg.ofdm.carrier_freq);
  const channel::ChannelRealization fading =
      channel::generate_fading(prof, static_cast<std::int64_t>(n_ofdm) * spb, cfg.ofdm.sampling_rate,
                               split_seed(block_seed, 2));

  const double noise_var = std::pow(10.0, -snr_db / 10.0);
  const modem::CVec rx_time =
      channel::apply_channel(time, fading, snr_db, split_seed(block_seed, 3), cfg.noise_enabled, spb,
                             cfg.ofdm.cp_length + cfg.ofdm.fft_size / 2);
  const modem::CVec rx_grid = modem::ofdm_demodulate(rx_time, cfg.ofdm);

  const double demap_var = cfg.noise_enabled ? noise_var : 1e-6;
  LlrVec llrs(static_cast<Eigen::Index>(n_mod) * bps);
  for (int s = 0; s < n_ofdm; ++s) {
    const modem::CVec h = channel::frequency_response(fading, cfg.ofdm, s);
    const Eigen::Index first = static_cast<Eigen::Index>(s) * cfg.ofdm.used_subcarriers;
    const Eigen::Index count = std::min<Eigen::Index>(cfg.ofdm.used_subcarriers, n_mod - first);
    if (count <= 0) break;
    const modem::CVec y = rx_grid.segment(first, count);
    const modem::CVec z = modem::zf_equalize(y, h.head(count));
    llrs.segment(first * bps, count * bps) = modem::demap_llr(z, h.head(count), cfg.mod, demap_var);
  }

  const LlrVec llrs_deint = chil.deinterleave(llrs);
  const turbo::ChannelLlrs streams = turbo::depuncture_rx(tcfg, llrs_deint);
  return turbo::turbo_decode(streams, tcfg);
}

}  // namespace

turbo::TurboConfig SimConfig::turbo_config() const {
  turbo::TurboConfig t;
  t.code = code;
  t.block_bits = block_bits;
  t.rate = rate;
  t.algo = algo;
  t.iterations = iterations;
  return t;
}

void SimConfig::validate() const {
  turbo_config().validate();
  if (speed_kmh <= 0.0) throw std::invalid_argument("speed: must be positive");
  if (min_block_errors < 0) throw std::invalid_argument("min_block_errors: must be non-negative");
  if (max_blocks < 1) throw std::invalid_argument("max_blocks: must be positive");
  const int tx = turbo::tx_bits_per_block(turbo_config());
  if (tx % modem::bits_per_symbol(mod) != 0)
    throw std::invalid_argument("mod: transmitted bits per block not divisible by bits per symbol");
  const double cp_ns = ofdm.cp_length / ofdm.sampling_rate * 1e9;
  if (cp_ns < (profile == channel::ProfileName::Epa ? 410.0 : 2510.0))
    throw std::invalid_argument("ofdm: cyclic prefix shorter than the channel delay spread");
}

BlockOutcome run_block(const SimConfig& cfg, double snr_db, std::int64_t block_index) {
  BitVec data;
  const turbo::DecodeResult dec = decode_one_block(cfg, snr_db, block_index, data);
  BlockOutcome out;
  out.ops = dec.ops;
  out.bit_errors = static_cast<int>((dec.bits != data).count());
  out.block_error = out.bit_errors > 0;
  return out;
}

namespace {

struct Totals {
  std::int64_t blocks = 0, block_errors = 0, bit_errors = 0;
  std::int64_t adds = 0, cmps = 0;
};

Totals run_batch(const SimConfig& cfg, double snr_db, std::int64_t first, std::int64_t count,
                 int workers) {
  Totals tot;
  const auto run_range = [&](Totals& t, std::atomic<std::int64_t>& next) {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      const BlockOutcome o = run_block(cfg, snr_db, first + i);
      t.blocks++;
      t.block_errors += o.block_error;
      t.bit_errors += o.bit_errors;
      t.adds += o.ops.additions;
      t.cmps += o.ops.comparisons;
    }
  };
  std::atomic<std::int64_t> next{0};
  if (workers <= 1) {
    run_range(tot, next);
    return tot;
  }
  std::vector<Totals> parts(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back([&, w] { run_range(parts[w], next); });
  for (auto& t : pool) t.join();
  for (const auto& p : parts) {
    tot.blocks += p.blocks;
    tot.block_errors += p.block_errors;
    tot.bit_errors += p.bit_errors;
    tot.adds += p.adds;
    tot.cmps += p.cmps;
  }
  return tot;
}

}  // namespace

BlerPoint run_bler_point(const SimConfig& cfg, double snr_db) {
  cfg.validate();
  const int workers =
      cfg.workers > 0 ? cfg.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  Totals tot;
  while (tot.blocks < cfg.max_blocks &&
         (cfg.min_block_errors == 0 || tot.block_errors < cfg.min_block_errors)) {
    const std::int64_t count = std::min(kBatchBlocks, cfg.max_blocks - tot.blocks);
    const Totals b = run_batch(cfg, snr_db, tot.blocks, count, workers);
    tot.blocks += b.blocks;
    tot.block_errors += b.block_errors;
    tot.bit_errors += b.bit_errors;
    tot.adds += b.adds;
    tot.cmps += b.cmps;
  }
  BlerPoint p;
  p.snr_db = snr_db;
  p.blocks_sent = tot.blocks;
  p.block_errors = tot.block_errors;
  p.bit_errors = tot.bit_errors;
  p.bler = tot.blocks ? static_cast<double>(tot.block_errors) / static_cast<double>(tot.blocks) : 0.0;
  p.adds_per_block = tot.blocks ? static_cast<double>(tot.adds) / static_cast<double>(tot.blocks) : 0.0;
  p.cmps_per_block = tot.blocks ? static_cast<double>(tot.cmps) / static_cast<double>(tot.blocks) : 0.0;
  return p;
}

std::vector<BlerPoint> run_sweep(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.snr_db.empty()) throw std::invalid_argument("snr: sweep needs at least one SNR point");
  std::vector<BlerPoint> out;
  out.reserve(cfg.snr_db.size());
  for (double snr : cfg.snr_db) out.push_back(run_bler_point(cfg, snr));
  return out;
}

void write_csv(std::ostream& os, const std::vector<BlerPoint>& points) {
  os << "snr_db,blocks,blk_err,bit_err,bler,adds_per_block,cmps_per_block\n";
  for (const auto& p : points) {
    os << std::setprecision(17) << p.snr_db << ',' << p.blocks_sent << ',' << p.block_errors << ','
       << p.bit_errors << ',' << p.bler << ',' << p.adds_per_block << ',' << p.cmps_per_block << '\n';
  }
}

std::vector<BlerPoint> parse_csv(std::istream& is) {
  std::vector<BlerPoint> out;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    BlerPoint p;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    ss >> p.snr_db >> p.blocks_sent >> p.block_errors >> p.bit_errors >> p.bler >> p.adds_per_block >>
        p.cmps_per_block;
    out.push_back(p);
  }
  return out;
}

std::string config_json(const SimConfig& cfg) {
  nlohmann::json j;
  j["code"] = code_name(cfg.code);
  j["block_bits"] = cfg.block_bits;
  j["rate"] = {cfg.rate.first, cfg.rate.second};
  j["modulation"] = mod_name(cfg.mod);
  j["channel"] = channel::to_string(cfg.profile);
  j["speed_kmh"] = cfg.speed_kmh;
  j["algorithm"] = algo_name(cfg.algo);
  j["iterations"] = cfg.iterations;
  j["snr_db"] = cfg.snr_db;
  j["min_block_errors"] = cfg.min_block_errors;
  j["max_blocks"] = cfg.max_blocks;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["noise_enabled"] = cfg.noise_enabled;
  j["ofdm"] = {{"fft_size", cfg.ofdm.fft_size},
               {"used_subcarriers", cfg.ofdm.used_subcarriers},
               {"cp_length", cfg.ofdm.cp_length},
               {"sampling_rate", cfg.ofdm.sampling_rate},
               {"carrier_freq", cfg.ofdm.carrier_freq},
               {"bandwidth", cfg.ofdm.bandwidth}};
  j["library_version"] = kVersion;
  j["git_hash"] = kGitHash;
  return j.dump(2);
}

void write_sweep_outputs(const SimConfig& cfg, const std::vector<BlerPoint>& points,
                         const std::string& csv_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path);
  write_csv(csv, points);
  std::ofstream js(csv_path + ".json");
  if (!js) throw std::runtime_error("cannot open " + csv_path + ".json");
  js << config_json(cfg) << '\n';
}

std::vector<std::vector<int>> iteration_bit_errors(const SimConfig& cfg, double snr_db,
                                                   std::int64_t blocks) {
  cfg.validate();
  std::vector<std::vector<int>> per_iter(cfg.iterations, std::vector<int>(blocks, 0));
  const int workers =
      cfg.workers > 0 ? cfg.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= blocks) return;
        BitVec data;
        const turbo::DecodeResult dec = decode_one_block(cfg, snr_db, i, data);
        for (int it = 0; it < cfg.iterations; ++it) {
          const auto& bits = dec.per_iteration_bits[std::min<std::size_t>(it, dec.per_iteration_bits.size() - 1)];
          per_iter[it][i] = static_cast<int>((bits != data).count());
        }
      }
    });
  for (auto& t : pool) t.join();
  return per_iter;
}

std::vector<OpsRow> report_ops(std::uint64_t seed) {
  // Operating point: constituent-encoder streams over AWGN at Es/N0 = 4 dB,
  // LLR = 2(x + n)/sigma^2, zero a-priori, one decoding pass, averaged over
  // 8 seeded blocks of 384 data bits.
  constexpr int kBits = 384;
  constexpr int kAvg = 8;
  const double es_n0 = std::pow(10.0, 4.0 / 10.0);
  const double sigma = std::sqrt(1.0 / es_n0);

  const auto awgn_llrs = [&](const BitVec& bits, Rng& rng) {
    LlrVec out(bits.size());
    for (Eigen::Index i = 0; i < bits.size(); ++i)
      out[i] = 2.0 * (bpsk(bits[i]) + sigma * rng.gaussian()) / (sigma * sigma);
    return clamp_llrs(out);
  };

  const trellis::TrellisSpec bt = trellis::build_binary_rsc();
  const trellis::TrellisSpec dt = trellis::build_duobinary_rsc();

  std::vector<OpsRow> rows = {{"sova", "binary", 0, 0},
                              {"max-log-map", "binary", 0, 0},
                              {"sova", "duo", 0, 0},
                              {"max-log-map", "duo", 0, 0}};

  for (int r = 0; r < kAvg; ++r) {
    Rng rng(split_seed(seed, 0x0b5 + static_cast<std::uint64_t>(r)));
    BitVec data(kBits);
    for (int i = 0; i < kBits; ++i) data[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
    const auto enc = trellis::encode(bt, data, trellis::Termination::TailBits);
    BitVec sys(kBits + 3), par(kBits + 3);
    sys.head(kBits) = data;
    par.head(kBits) = enc.parity[0];
    for (int k = 0; k < 3; ++k) {
      sys[kBits + k] = enc.tail_systematic[k];
      par[kBits + k] = enc.tail_parity[0][k];
    }
    const LlrVec lsys = awgn_llrs(sys, rng), lpar = awgn_llrs(par, rng);
    const LlrVec zero = LlrVec::Zero(kBits + 3);
    const auto sv = siso::sova(bt, lsys, lpar, zero, trellis::Termination::TailBits);
    rows[0].additions += static_cast<double>(sv.ops.additions);
    rows[0].comparisons += static_cast<double>(sv.ops.comparisons);
    const auto ml = siso::max_log_map(bt, lsys, lpar, zero, trellis::Termination::TailBits);
    rows[1].additions += static_cast<double>(ml.ops.additions);
    rows[1].comparisons += static_cast<double>(ml.ops.comparisons);

    BitVec ddata(kBits);
    for (int i = 0; i < kBits; ++i) ddata[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
    const int sc = trellis::circulation_state(dt, ddata);
    const auto denc = trellis::encode(dt, ddata, trellis::Termination::Tailbiting, sc);
    const int n = kBits / 2;
    BitVec a(n), b(n);
    for (int j = 0; j < n; ++j) {
      a[j] = ddata[2 * j];
      b[j] = ddata[2 * j + 1];
    }
    const LlrVec la = awgn_llrs(a, rng), lb = awgn_llrs(b, rng);
    const LlrVec ly = awgn_llrs(denc.parity[0], rng), lw = awgn_llrs(denc.parity[1], rng);
    const SymbolLlrMat zero_sym = SymbolLlrMat::Zero(3, n);
    const auto dv = siso::sova_duo(dt, la, lb, ly, lw, zero_sym, trellis::Termination::Tailbiting);
    rows[2].additions += static_cast<double>(dv.ops.additions);
    rows[2].comparisons += static_cast<double>(dv.ops.comparisons);
    const auto dm = siso::max_log_map_duo(dt, la, lb, ly, lw, zero_sym, trellis::Termination::Tailbiting,
                                          siso::TailbitingMode::Wrap);
    rows[3].additions += static_cast<double>(dm.ops.additions);
    rows[3].comparisons += static_cast<double>(dm.ops.comparisons);
  }
  for (auto& row : rows) {
    row.additions /= kAvg;
    row.comparisons /= kAvg;
  }
  return rows;
}

void print_ops_table(std::ostream& os, const std::vector<OpsRow>& rows) {
  os << "algorithm            additions   comparisons\n";
  for (const auto& r : rows) {
    std::ostringstream name;
    name << r.algorithm << " (" << r.code << ')';
    os << std::left << std::setw(21) << name.str() << std::right << std::setw(9)
       << std::llround(r.additions) << std::setw(14) << std::llround(r.comparisons) << '\n';
  }
  os << "One decoding pass, 384 data bits; excludes the extrinsic-exchange arithmetic\n"
        "between the two decoders. Convention: docs/op_counting.md\n";
}

double bler_crossing(const std::vector<BlerPoint>& points, double target) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    if (a.bler >= target && b.bler < target && a.bler > 0.0 && b.bler > 0.0) {
      const double la = std::log10(a.bler), lb = std::log10(b.bler), lt = std::log10(target);
      return a.snr_db + (b.snr_db - a.snr_db) * (la - lt) / (la - lb);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace turbolink::harness
