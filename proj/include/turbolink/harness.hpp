#pragma once

#include "turbolink/channel.hpp"
#include "turbolink/modem.hpp"
#include "turbolink/turbo.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace turbolink::harness {

struct SimConfig {
  turbo::CodeType code = turbo::CodeType::DuoBinary;
  int block_bits = 288;
  std::pair<int, int> rate = {1, 2};
  modem::Modulation mod = modem::Modulation::Qpsk;
  channel::ProfileName profile = channel::ProfileName::Epa;
  double speed_kmh = 3.0;
  turbo::SisoAlgo algo = turbo::SisoAlgo::MaxLogMap;
  int iterations = 8;
  std::vector<double> snr_db;
  int min_block_errors = 100;
  std::int64_t max_blocks = 1000000;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  bool noise_enabled = true;
  modem::OfdmConfig ofdm;

  turbo::TurboConfig turbo_config() const;
  void validate() const;  // throws std::invalid_argument naming the field
};

struct BlerPoint {
  double snr_db = 0.0;
  std::int64_t blocks_sent = 0;
  std::int64_t block_errors = 0;
  std::int64_t bit_errors = 0;
  double bler = 0.0;
  double adds_per_block = 0.0;
  double cmps_per_block = 0.0;
};

// One noisy block through encode -> OFDM -> fading -> decode; fully
// determined by the configuration, the SNR and the block index.
struct BlockOutcome {
  bool block_error = false;
  int bit_errors = 0;
  siso::OpCounters ops;
};
BlockOutcome run_block(const SimConfig& cfg, double snr_db, std::int64_t block_index);

// Simulates blocks until min_block_errors or max_blocks, in fixed batches so
// the result is identical for any worker count.
BlerPoint run_bler_point(const SimConfig& cfg, double snr_db);

std::vector<BlerPoint> run_sweep(const SimConfig& cfg);

// CSV columns: snr_db,blocks,blk_err,bit_err,bler,adds_per_block,cmps_per_block
void write_csv(std::ostream& os, const std::vector<BlerPoint>& points);
std::vector<BlerPoint> parse_csv(std::istream& is);
void write_sweep_outputs(const SimConfig& cfg, const std::vector<BlerPoint>& points,
                         const std::string& csv_path);  // JSON sidecar at csv_path + ".json"
std::string config_json(const SimConfig& cfg);

// Per-iteration bit error counts for a fixed SNR point (paired across blocks).
std::vector<std::vector<int>> iteration_bit_errors(const SimConfig& cfg, double snr_db,
                                                   std::int64_t blocks);

// One decode pass per algorithm on a 384-bit block at the documented
// operating point; reproduces the operation-count comparison table.
struct OpsRow {
  std::string algorithm;
  std::string code;
  double additions = 0.0;
  double comparisons = 0.0;
};
std::vector<OpsRow> report_ops(std::uint64_t seed = 1);
void print_ops_table(std::ostream& os, const std::vector<OpsRow>& rows);

// SNR (dB) where the interpolated BLER curve crosses the target; requires a
// bracketing pair of grid points. Returns NaN when no crossing exists.
double bler_crossing(const std::vector<BlerPoint>& points, double target_bler);

}  // namespace turbolink::harness
