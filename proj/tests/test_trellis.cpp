#include "turbolink/trellis.hpp"

#include "turbolink/rng.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

using namespace turbolink;
using trellis::Termination;

namespace {

BitVec random_bits(Rng& rng, int n) {
  BitVec v(n);
  for (int i = 0; i < n; ++i) v[i] = static_cast<std::uint8_t>(rng.next_u64() & 1);
  return v;
}

}  // namespace

TEST_CASE("binary trellis tables") {
  const auto t = trellis::build_binary_rsc();
  CHECK(t.num_states == 8);
  CHECK(t.input_arity == 2);
  CHECK(t.next_state[0][0] == 0);
  CHECK(t.parity[0][0] == 0);
  CHECK(t.next_state[0][1] == 4);  // s1 is the MSB
  CHECK(t.parity[0][1] == 1);

  // full table against the independent circuit
  for (int s = 0; s < 8; ++s)
    for (int u = 0; u < 2; ++u) {
      oracle::BinaryCircuit c;
      c.set_state(s);
      const int p = c.step(u);
      CHECK(t.next_state[s][u] == c.state());
      CHECK(t.parity[s][u] == p);
    }

  // per-input bijection
  for (int u = 0; u < 2; ++u) {
    std::array<int, 8> seen{};
    for (int s = 0; s < 8; ++s) seen[t.next_state[s][u]]++;
    for (int s = 0; s < 8; ++s) CHECK(seen[s] == 1);
  }
}

TEST_CASE("duo-binary trellis tables") {
  const auto t = trellis::build_duobinary_rsc();
  CHECK(t.input_arity == 4);
  CHECK(t.next_state[0][0] == 0);
  CHECK(t.parity[0][0] == 0);

  for (int s = 0; s < 8; ++s)
    for (int v = 0; v < 4; ++v) {
      oracle::DuoCircuit c;
      c.set_state(s);
      const auto [y, w] = c.step((v >> 1) & 1, v & 1);
      CHECK(t.next_state[s][v] == c.state());
      CHECK((t.parity[s][v] & 1) == y);
      CHECK(((t.parity[s][v] >> 1) & 1) == w);
    }

  for (int v = 0; v < 4; ++v) {
    std::array<int, 8> seen{};
    for (int s = 0; s < 8; ++s) seen[t.next_state[s][v]]++;
    for (int s = 0; s < 8; ++s) CHECK(seen[s] == 1);
  }
}

TEST_CASE("all-zero data encodes to all-zero parity") {
  for (const bool duo : {false, true}) {
    const auto t = duo ? trellis::build_duobinary_rsc() : trellis::build_binary_rsc();
    const BitVec zeros = BitVec::Zero(duo ? 16 : 8);
    const auto enc = trellis::encode(t, zeros, Termination::TailBits);
    CHECK(enc.final_state == 0);
    for (const auto& p : enc.parity) CHECK((p == 0).all());
    for (const auto& p : enc.tail_parity) CHECK((p == 0).all());
    CHECK((enc.tail_systematic == 0).all());
  }
}

TEST_CASE("binary impulse response") {
  const auto t = trellis::build_binary_rsc();
  BitVec data = BitVec::Zero(8);
  data[0] = 1;
  const auto enc = trellis::encode(t, data, Termination::Tailbiting, 0);
  // hand-run of the circuit: parity (1+D+D^3)/(1+D^2+D^3) impulse response
  const std::uint8_t want[8] = {1, 1, 1, 1, 0, 0, 1, 0};
  for (int i = 0; i < 8; ++i) CHECK(enc.parity[0][i] == want[i]);
  CHECK((enc.systematic == data).all());
}

TEST_CASE("tail termination drives both encoders to state zero") {
  Rng rng(11);
  for (const bool duo : {false, true}) {
    const auto t = duo ? trellis::build_duobinary_rsc() : trellis::build_binary_rsc();
    for (int trial = 0; trial < 20; ++trial) {
      const BitVec data = random_bits(rng, duo ? 32 : 16);
      const auto enc = trellis::encode(t, data, Termination::TailBits);
      CHECK(enc.final_state == 0);
      CHECK(enc.tail_parity[0].size() == 3);
      CHECK(enc.tail_systematic.size() == 3 * t.bits_per_step);
      CHECK((enc.systematic == data).all());
    }
  }
}

TEST_CASE("encoding is linear over GF(2)") {
  Rng rng(12);
  for (const bool duo : {false, true}) {
    const auto t = duo ? trellis::build_duobinary_rsc() : trellis::build_binary_rsc();
    const int n = duo ? 24 : 12;
    for (int trial = 0; trial < 10; ++trial) {
      const BitVec a = random_bits(rng, n), b = random_bits(rng, n);
      BitVec ab(n);
      for (int i = 0; i < n; ++i) ab[i] = a[i] ^ b[i];
      const auto ea = trellis::encode(t, a, Termination::Tailbiting, 0);
      const auto eb = trellis::encode(t, b, Termination::Tailbiting, 0);
      const auto eab = trellis::encode(t, ab, Termination::Tailbiting, 0);
      for (int p = 0; p < t.num_parity; ++p)
        for (Eigen::Index i = 0; i < ea.parity[p].size(); ++i)
          CHECK(eab.parity[p][i] == (ea.parity[p][i] ^ eb.parity[p][i]));
    }
  }
}

TEST_CASE("circulation state is the tailbiting fixed point") {
  Rng rng(13);
  for (const bool duo : {false, true}) {
    const auto t = duo ? trellis::build_duobinary_rsc() : trellis::build_binary_rsc();

    // all-zero data circulates from state 0
    const BitVec zeros = BitVec::Zero(duo ? 16 : 8);
    CHECK(trellis::circulation_state(t, zeros) == 0);

    for (const int steps : {4, 5, 8, 12, 96}) {
      const BitVec data = random_bits(rng, steps * t.bits_per_step);
      const int sc = trellis::circulation_state(t, data);
      const auto enc = trellis::encode(t, data, Termination::Tailbiting, sc);
      CHECK(enc.final_state == sc);
    }
  }
}

TEST_CASE("circulation state matches brute-force search") {
  Rng rng(14);
  const auto t = trellis::build_duobinary_rsc();
  for (int trial = 0; trial < 50; ++trial) {
    const BitVec data = random_bits(rng, 8);  // 4 couples
    const int sc = trellis::circulation_state(t, data);
    int found = -1;
    for (int s0 = 0; s0 < 8; ++s0)
      if (trellis::encode(t, data, Termination::Tailbiting, s0).final_state == s0) {
        found = s0;
        break;
      }
    CHECK(sc == found);
  }
}

TEST_CASE("invalid encode inputs are rejected") {
  const auto bt = trellis::build_binary_rsc();
  const auto dt = trellis::build_duobinary_rsc();
  CHECK_THROWS_AS((void)trellis::encode(dt, BitVec::Zero(7), Termination::TailBits),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)trellis::encode(bt, BitVec::Zero(8), Termination::TailBits, 9),
                  std::invalid_argument);
  // 7 steps = recursion period: no circulation state exists
  CHECK_THROWS_AS((void)trellis::circulation_state(bt, BitVec::Zero(7)), std::invalid_argument);
  CHECK_THROWS_AS((void)trellis::circulation_state(dt, BitVec::Zero(28)), std::invalid_argument);
}
