#include "turbolink/permute.hpp"

#include "turbolink/rng.hpp"
#include "turbolink/turbo.hpp"

#include <doctest.h>

#include <set>

using namespace turbolink;

namespace {

LlrVec random_llrs(Rng& rng, int n) {
  LlrVec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

}  // namespace

TEST_CASE("qpp interleaver values for the 40-bit block") {
  const auto q = permute::QppInterleaver::for_block(40);
  CHECK(q.f1() == 3);
  CHECK(q.f2() == 10);
  CHECK(q.perm().map(0) == 0);   // (3*0 + 10*0) mod 40
  CHECK(q.perm().map(1) == 13);  // (3 + 10) mod 40
  CHECK(q.perm().map(2) == 6);   // (6 + 40) mod 40
}

TEST_CASE("every tabulated permutation is a bijection") {
  for (const int k : permute::QppInterleaver::supported_sizes()) {
    const auto q = permute::QppInterleaver::for_block(k);
    std::set<int> seen;
    for (int i = 0; i < k; ++i) seen.insert(q.perm().map(i));
    CHECK(static_cast<int>(seen.size()) == k);
  }
  for (const int n : permute::CoupleInterleaver::supported_sizes()) {
    const auto c = permute::CoupleInterleaver::for_block(n);
    std::set<int> seen;
    for (int j = 0; j < n; ++j) seen.insert(c.map(j));
    CHECK(static_cast<int>(seen.size()) == n);
  }
}

TEST_CASE("interleave then deinterleave is the identity") {
  Rng rng(21);
  for (const int k : permute::QppInterleaver::supported_sizes()) {
    const auto q = permute::QppInterleaver::for_block(k);
    const LlrVec x = random_llrs(rng, k);
    const LlrVec y = q.perm().deinterleave(q.perm().interleave(x));
    CHECK((x == y).all());
  }
  for (const int n : permute::CoupleInterleaver::supported_sizes()) {
    const auto c = permute::CoupleInterleaver::for_block(n);
    BitVec bits(2 * n);
    for (int i = 0; i < 2 * n; ++i) bits[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
    CHECK((c.deinterleave_bits(c.interleave_bits(bits)) == bits).all());

    SymbolLlrMat m(3, n);
    for (int j = 0; j < n; ++j)
      for (int v = 0; v < 3; ++v) m(v, j) = rng.gaussian();
    const SymbolLlrMat back = c.deinterleave_symbols(c.interleave_symbols(m));
    CHECK((back == m).all());
  }
}

TEST_CASE("couple interleaver matches a direct evaluation of the two-step rule") {
  const int n = 24;
  const auto c = permute::CoupleInterleaver::for_block(n);
  Rng rng(22);
  BitVec bits(2 * n);
  for (int i = 0; i < 2 * n; ++i) bits[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
  const BitVec got = c.interleave_bits(bits);

  // independent evaluation: P0..P3 = 5,0,0,0 for 24 couples
  for (int j = 0; j < n; ++j) {
    long long p = 5LL * j + 1;
    if (j % 4 == 1) p += n / 2;
    if (j % 4 == 3) p += n / 2;
    const int src = static_cast<int>(p % n);
    const int a = bits[2 * src], b = bits[2 * src + 1];
    if (j % 2 == 1) {
      CHECK(got[2 * j] == b);  // swapped couple at odd output positions
      CHECK(got[2 * j + 1] == a);
    } else {
      CHECK(got[2 * j] == a);
      CHECK(got[2 * j + 1] == b);
    }
  }
}

TEST_CASE("puncture rates come out exact") {
  // duo-binary rate 1/2 on a 192-couple block: 384 data bits -> 768 tx bits
  {
    turbo::TurboConfig cfg;
    cfg.code = turbo::CodeType::DuoBinary;
    cfg.block_bits = 384;
    cfg.rate = {1, 2};
    CHECK(turbo::tx_bits_per_block(cfg) == 768);
  }
  // binary identity pattern: native rate 1/3 plus 12 tail bits
  {
    turbo::TurboConfig cfg;
    cfg.code = turbo::CodeType::Binary;
    cfg.block_bits = 288;
    cfg.rate = {1, 3};
    CHECK(turbo::tx_bits_per_block(cfg) == 3 * 288 + 12);
  }
  // exact integer rate accounting across every supported combination
  for (const auto code : {turbo::CodeType::Binary, turbo::CodeType::DuoBinary})
    for (const auto rate : {std::pair{1, 2}, std::pair{2, 3}, std::pair{3, 4}})
      for (const int k : {192, 288, 384, 480, 960}) {
        turbo::TurboConfig cfg;
        cfg.code = code;
        cfg.block_bits = k;
        cfg.rate = rate;
        const int tail = code == turbo::CodeType::Binary ? 12 : 0;
        CHECK(turbo::tx_bits_per_block(cfg) == k * rate.second / rate.first + tail);
      }
}

TEST_CASE("depuncture inserts exact zeros at punctured positions") {
  const auto pat = turbo::binary_puncture({1, 2});
  Rng rng(23);
  const int steps = 16;
  std::vector<LlrVec> streams = {random_llrs(rng, steps), random_llrs(rng, steps),
                                 random_llrs(rng, steps)};
  const LlrVec tx = permute::puncture(streams, pat);
  CHECK(tx.size() == 2 * steps);
  const auto back = permute::depuncture(tx, pat, steps);
  REQUIRE(back.size() == 3);
  for (int k = 0; k < steps; ++k) {
    CHECK(back[0][k] == streams[0][k]);  // systematic always kept
    if (k % 2 == 0) {
      CHECK(back[1][k] == streams[1][k]);
      CHECK(back[2][k] == 0.0);
    } else {
      CHECK(back[1][k] == 0.0);
      CHECK(back[2][k] == streams[2][k]);
    }
  }
}

TEST_CASE("puncture rejects mismatched inputs") {
  const auto pat = turbo::binary_puncture({1, 2});
  std::vector<LlrVec> bad = {LlrVec::Zero(16), LlrVec::Zero(15), LlrVec::Zero(16)};
  CHECK_THROWS_AS((void)permute::puncture(bad, pat), std::invalid_argument);
  CHECK_THROWS_AS((void)permute::depuncture(LlrVec::Zero(31), pat, 16), std::invalid_argument);
}

TEST_CASE("channel interleaver is reproducible and invertible") {
  const auto p1 = permute::channel_interleaver(777, 42);
  const auto p2 = permute::channel_interleaver(777, 42);
  CHECK(p1.table() == p2.table());
  const auto p3 = permute::channel_interleaver(777, 43);
  CHECK(p1.table() != p3.table());

  Rng rng(24);
  const LlrVec x = random_llrs(rng, 777);
  CHECK((p1.deinterleave(p1.interleave(x)) == x).all());
}

TEST_CASE("channel interleaver disperses bursts") {
  for (const int n : {512, 1024}) {
    const auto p = permute::channel_interleaver(n, 7);
    // a burst of 16 adjacent post-interleaver positions maps back to at least
    // 8 distinct 16-bit windows of the codeword
    std::set<int> windows;
    for (int i = 100; i < 116; ++i) windows.insert(p.map(i) / 16);
    CHECK(static_cast<int>(windows.size()) >= 8);
  }
}
