#include "turbolink/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace turbolink;

namespace {

harness::SimConfig small_cfg() {
  harness::SimConfig cfg;
  cfg.code = turbo::CodeType::DuoBinary;
  cfg.block_bits = 288;
  cfg.rate = {1, 2};
  cfg.seed = 9;
  return cfg;
}

}  // namespace

TEST_CASE("noise disabled gives zero block errors") {
  for (const auto code : {turbo::CodeType::Binary, turbo::CodeType::DuoBinary}) {
    for (const auto algo : {turbo::SisoAlgo::MaxLogMap, turbo::SisoAlgo::Sova}) {
      harness::SimConfig cfg = small_cfg();
      cfg.code = code;
      cfg.algo = algo;
      cfg.noise_enabled = false;
      cfg.min_block_errors = 0;
      cfg.max_blocks = 12;
      const auto p = harness::run_bler_point(cfg, 20.0);
      CHECK(p.block_errors == 0);
      CHECK(p.bit_errors == 0);
      CHECK(p.bler == 0.0);
      CHECK(p.blocks_sent == 12);
    }
  }
}

TEST_CASE("decoding pure noise fails nearly always") {
  harness::SimConfig cfg = small_cfg();
  cfg.min_block_errors = 0;
  cfg.max_blocks = 1024;
  const auto p = harness::run_bler_point(cfg, -20.0);
  CHECK(static_cast<double>(p.block_errors) / static_cast<double>(p.blocks_sent) >= 0.99);
}

TEST_CASE("results are identical for any worker count") {
  harness::SimConfig cfg = small_cfg();
  cfg.min_block_errors = 20;
  cfg.max_blocks = 512;
  cfg.workers = 1;
  const auto a = harness::run_bler_point(cfg, 5.0);
  cfg.workers = 8;
  const auto b = harness::run_bler_point(cfg, 5.0);
  CHECK(a.blocks_sent == b.blocks_sent);
  CHECK(a.block_errors == b.block_errors);
  CHECK(a.bit_errors == b.bit_errors);
  CHECK(a.adds_per_block == b.adds_per_block);
  CHECK(a.cmps_per_block == b.cmps_per_block);
}

TEST_CASE("csv round trip is exact") {
  std::vector<harness::BlerPoint> pts(3);
  pts[0] = {0.5, 1024, 513, 40960, 513.0 / 1024.0, 123456.25, 654321.125};
  pts[1] = {1.0, 2048, 100, 777, 100.0 / 2048.0, 1.0 / 3.0, 2.0 / 7.0};
  pts[2] = {-2.5, 7, 7, 7 * 288, 1.0, 0.0, 0.0};

  std::stringstream ss;
  harness::write_csv(ss, pts);
  const auto back = harness::parse_csv(ss);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(back[i].snr_db == pts[i].snr_db);
    CHECK(back[i].blocks_sent == pts[i].blocks_sent);
    CHECK(back[i].block_errors == pts[i].block_errors);
    CHECK(back[i].bit_errors == pts[i].bit_errors);
    CHECK(back[i].bler == pts[i].bler);
    CHECK(back[i].adds_per_block == pts[i].adds_per_block);
    CHECK(back[i].cmps_per_block == pts[i].cmps_per_block);
  }
}

TEST_CASE("config json captures the run parameters") {
  const harness::SimConfig cfg = small_cfg();
  const std::string j = harness::config_json(cfg);
  for (const char* key : {"\"code\"", "\"block_bits\"", "\"seed\"", "\"library_version\"",
                          "\"git_hash\"", "\"ofdm\""})
    CHECK(j.find(key) != std::string::npos);
}

TEST_CASE("invalid configurations are rejected with the field name") {
  harness::SimConfig cfg = small_cfg();
  cfg.speed_kmh = -1.0;
  try {
    cfg.validate();
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("speed") != std::string::npos);
  }

  cfg = small_cfg();
  cfg.max_blocks = 0;
  try {
    cfg.validate();
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("max_blocks") != std::string::npos);
  }
}

TEST_CASE("bler crossing interpolates on the log scale") {
  std::vector<harness::BlerPoint> pts(3);
  pts[0].snr_db = 4.0;
  pts[0].bler = 0.4;
  pts[1].snr_db = 5.0;
  pts[1].bler = 0.04;  // crossing of 0.1 sits at 4 + log10(0.4/0.1)/log10(0.4/0.04) = 4.602
  pts[2].snr_db = 6.0;
  pts[2].bler = 0.004;
  const double x = harness::bler_crossing(pts, 0.1);
  CHECK(x == doctest::Approx(4.0 + std::log10(4.0) / 1.0).epsilon(1e-9));
  CHECK(std::isnan(harness::bler_crossing(pts, 0.5)));
}

TEST_CASE("ops report is deterministic in the seed") {
  const auto a = harness::report_ops(5);
  const auto b = harness::report_ops(5);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].additions == b[i].additions);
    CHECK(a[i].comparisons == b[i].comparisons);
  }
}

TEST_CASE("per-iteration error counts are consistent with the final result") {
  harness::SimConfig cfg = small_cfg();
  cfg.iterations = 4;
  const auto per_iter = harness::iteration_bit_errors(cfg, 5.0, 64);
  REQUIRE(per_iter.size() == 4);
  for (const auto& v : per_iter) CHECK(v.size() == 64);
  // the final iteration must match run_block's bit error count
  for (int i = 0; i < 64; ++i) {
    const auto o = harness::run_block(cfg, 5.0, i);
    CHECK(per_iter[3][i] == o.bit_errors);
  }
}
