// Command-line front end: BLER sweeps, the operation-count table and a quick
// self test. Exit codes: 0 success, 1 invalid configuration, 2 runtime failure.

#include "turbolink/harness.hpp"
#include "turbolink/version.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace turbolink;

harness::SimConfig parse_common(const std::string& code, int block, const std::string& rate,
                                const std::string& mod, const std::string& chan, double speed,
                                const std::string& algo, int iters, int min_errors, long long max_blocks,
                                unsigned long long seed, int workers, bool no_noise) {
  harness::SimConfig cfg;
  if (code == "binary")
    cfg.code = turbo::CodeType::Binary;
  else if (code == "duo")
    cfg.code = turbo::CodeType::DuoBinary;
  else
    throw std::invalid_argument("code: expected 'binary' or 'duo'");
  cfg.block_bits = block;
  if (rate == "1/3")
    cfg.rate = {1, 3};
  else if (rate == "1/2")
    cfg.rate = {1, 2};
  else if (rate == "2/3")
    cfg.rate = {2, 3};
  else if (rate == "3/4")
    cfg.rate = {3, 4};
  else
    throw std::invalid_argument("rate: expected 1/3, 1/2, 2/3 or 3/4");
  if (mod == "qpsk")
    cfg.mod = modem::Modulation::Qpsk;
  else if (mod == "16qam")
    cfg.mod = modem::Modulation::Qam16;
  else
    throw std::invalid_argument("mod: expected 'qpsk' or '16qam'");
  cfg.profile = channel::profile_from_string(chan);
  cfg.speed_kmh = speed;
  if (algo == "maxlogmap" || algo == "max-log-map")
    cfg.algo = turbo::SisoAlgo::MaxLogMap;
  else if (algo == "sova")
    cfg.algo = turbo::SisoAlgo::Sova;
  else
    throw std::invalid_argument("algo: expected 'maxlogmap' or 'sova'");
  cfg.iterations = iters;
  cfg.min_block_errors = min_errors;
  cfg.max_blocks = max_blocks;
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.noise_enabled = !no_noise;
  return cfg;
}

int run_selftest(std::uint64_t seed) {
  int failures = 0;
  const auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << '\n';
    if (!ok) ++failures;
  };

  // noiseless loopback for the two production configurations
  for (const auto code : {turbo::CodeType::Binary, turbo::CodeType::DuoBinary}) {
    harness::SimConfig cfg;
    cfg.code = code;
    cfg.block_bits = 288;
    cfg.noise_enabled = false;
    cfg.min_block_errors = 0;
    cfg.max_blocks = 8;
    cfg.seed = seed;
    const harness::BlerPoint p = harness::run_bler_point(cfg, 30.0);
    check(p.block_errors == 0, std::string("noiseless loopback, ") +
                                   (code == turbo::CodeType::Binary ? "binary" : "duo-binary") + " code");
  }

  // determinism across worker counts
  {
    harness::SimConfig cfg;
    cfg.block_bits = 288;
    cfg.min_block_errors = 10;
    cfg.max_blocks = 64;
    cfg.seed = seed;
    cfg.workers = 1;
    const harness::BlerPoint a = harness::run_bler_point(cfg, 6.0);
    cfg.workers = 4;
    const harness::BlerPoint b = harness::run_bler_point(cfg, 6.0);
    check(a.blocks_sent == b.blocks_sent && a.block_errors == b.block_errors &&
              a.bit_errors == b.bit_errors,
          "seed determinism independent of worker count");
  }
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"turbolink: turbo-coded OFDM link simulator"};
  app.set_version_flag("--version", std::string(kVersion) + " (" + kGitHash + ")");
  app.require_subcommand(1);

  std::string code = "duo", rate = "1/2", mod = "qpsk", chan = "epa", algo = "maxlogmap";
  int block = 288, iters = 8, min_errors = 100, workers = 0;
  long long max_blocks = 1000000;
  double speed = 3.0;
  unsigned long long seed = 1;
  bool no_noise = false;
  std::vector<double> snrs;
  std::string out_path = "sweep.csv";

  CLI::App* sweep = app.add_subcommand("sweep", "run a BLER sweep and write CSV + JSON sidecar");
  sweep->add_option("--code", code, "binary | duo");
  sweep->add_option("--block-size", block, "data bits per block");
  sweep->add_option("--rate", rate, "1/3 | 1/2 | 2/3 | 3/4");
  sweep->add_option("--mod", mod, "qpsk | 16qam");
  sweep->add_option("--channel", chan, "epa | eva");
  sweep->add_option("--speed", speed, "terminal speed, km/h");
  sweep->add_option("--algo", algo, "maxlogmap | sova");
  sweep->add_option("--iters", iters, "decoder iterations");
  sweep->add_option("--snr", snrs, "SNR points, dB")->expected(-1);
  sweep->add_option("--min-errors", min_errors, "block errors per point");
  sweep->add_option("--max-blocks", max_blocks, "block cap per point");
  sweep->add_option("--seed", seed, "master seed");
  sweep->add_option("--workers", workers, "worker threads (0 = auto)");
  sweep->add_flag("--no-noise", no_noise, "disable the noise source");
  sweep->add_option("--out", out_path, "output CSV path");

  CLI::App* ops = app.add_subcommand("ops", "print the per-pass operation-count table");
  unsigned long long ops_seed = 1;
  ops->add_option("--seed", ops_seed, "seed for the operating point");

  CLI::App* selftest = app.add_subcommand("selftest", "quick loopback and determinism checks");
  unsigned long long st_seed = 1;
  selftest->add_option("--seed", st_seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) {
      harness::SimConfig cfg = parse_common(code, block, rate, mod, chan, speed, algo, iters, min_errors,
                                            max_blocks, seed, workers, no_noise);
      cfg.snr_db = snrs;
      const auto points = harness::run_sweep(cfg);
      harness::write_sweep_outputs(cfg, points, out_path);
      harness::write_csv(std::cout, points);
      std::cout << "wrote " << out_path << " and " << out_path << ".json\n";
    } else if (ops->parsed()) {
      harness::print_ops_table(std::cout, harness::report_ops(ops_seed));
    } else if (selftest->parsed()) {
      return run_selftest(st_seed);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
