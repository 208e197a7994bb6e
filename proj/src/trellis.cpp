#include "turbolink/trellis.hpp"

#include <cassert>
#include <stdexcept>

namespace turbolink::trellis {

namespace {

struct Reg {
  int s1, s2, s3;
  int state() const { return (s1 << 2) | (s2 << 1) | s3; }
  static Reg from_state(int s) { return {(s >> 2) & 1, (s >> 1) & 1, s & 1}; }
};

// One step of the binary encoder: feedback 1 + D^2 + D^3, parity 1 + D + D^3.
// Registers hold past feedback-node values w.
void binary_step(Reg& r, int u, int& parity) {
  const int w = u ^ r.s2 ^ r.s3;
  parity = w ^ r.s1 ^ r.s3;
  r = {w, r.s1, r.s2};
}

// One step of the duo-binary encoder: feedback 1 + D + D^3, parities
// Y: 1 + D^2 + D^3 and W: 1 + D^3. The B input also feeds the adders in
// front of the second and third registers.
void duobinary_step(Reg& r, int a, int b, int& y, int& w_out) {
  const int w = a ^ b ^ r.s1 ^ r.s3;
  y = w ^ r.s2 ^ r.s3;
  w_out = w ^ r.s3;
  r = {w, r.s1 ^ b, r.s2 ^ b};
}

using Gf2Mat = std::array<std::uint8_t, 3>;  // row-major 3x3 bit matrix, row i in bits 0..2

int mat_apply(const Gf2Mat& m, int v) {
  int out = 0;
  for (int i = 0; i < 3; ++i) out |= (__builtin_popcount(m[i] & v) & 1) << i;
  return out;
}

Gf2Mat mat_mul(const Gf2Mat& a, const Gf2Mat& b) {
  // column j of the product = a applied to column j of b
  Gf2Mat cols{};  // bit i of cols[j] = b[i] bit j
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) cols[j] |= ((b[i] >> j) & 1) << i;
  Gf2Mat out{};
  for (int j = 0; j < 3; ++j) {
    const int c = mat_apply(a, cols[j]);
    for (int i = 0; i < 3; ++i) out[i] |= ((c >> i) & 1) << j;
  }
  return out;
}

bool mat_invert(Gf2Mat m, Gf2Mat& inv) {
  inv = {1, 2, 4};  // identity
  for (int col = 0; col < 3; ++col) {
    int pivot = -1;
    for (int row = col; row < 3; ++row)
      if ((m[row] >> col) & 1) {
        pivot = row;
        break;
      }
    if (pivot < 0) return false;
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    for (int row = 0; row < 3; ++row)
      if (row != col && ((m[row] >> col) & 1)) {
        m[row] ^= m[col];
        inv[row] ^= inv[col];
      }
  }
  return true;
}

// Fills pred, tail_input and circ_map from the transition tables.
void finalize(TrellisSpec& t) {
  for (int s = 0; s < t.num_states; ++s)
    for (int u = 0; u < t.input_arity; ++u) t.pred[t.next_state[s][u]][u] = static_cast<std::uint8_t>(s);

  // tail input: the unique input (with the documented duo-binary choice of B)
  // that zeroes the feedback node. Binary: u = s2 ^ s3. Duo-binary: B = s1,
  // A = s3, which reaches state 0 within two steps from anywhere.
  for (int s = 0; s < t.num_states; ++s) {
    const Reg r = Reg::from_state(s);
    if (t.input_arity == 2) {
      t.tail_input[s] = static_cast<std::uint8_t>(r.s2 ^ r.s3);
    } else {
      t.tail_input[s] = static_cast<std::uint8_t>((r.s3 << 1) | r.s1);  // (A, B)
    }
  }

  // State-update matrix G for zero input, columns from the basis states.
  Gf2Mat g{};
  for (int i = 0; i < 3; ++i) {
    const int basis = 1 << i;
    const int img = t.next_state[basis][0];
    for (int row = 0; row < 3; ++row) g[row] |= ((img >> row) & 1) << i;
  }
  // circ_map[r] = (I + G^r)^-1, tabulated per block-length residue mod 7.
  Gf2Mat gp = g;
  for (int r = 1; r < 7; ++r) {
    Gf2Mat m = gp;
    m[0] ^= 1;
    m[1] ^= 2;
    m[2] ^= 4;
    Gf2Mat inv{};
    const bool ok = mat_invert(m, inv);
    assert(ok);
    (void)ok;
    for (int z = 0; z < 8; ++z) t.circ_map[r][z] = static_cast<std::uint8_t>(mat_apply(inv, z));
    gp = mat_mul(g, gp);
  }
}

}  // namespace

TrellisSpec build_binary_rsc() {
  TrellisSpec t;
  t.input_arity = 2;
  t.bits_per_step = 1;
  t.num_parity = 1;
  t.rate_num = 1;
  t.rate_den = 2;
  t.generators = {0b1101u, {0b1011u}, 4};  // feedback 1+D^2+D^3, parity 1+D+D^3
  for (int s = 0; s < 8; ++s)
    for (int u = 0; u < 2; ++u) {
      Reg r = Reg::from_state(s);
      int p = 0;
      binary_step(r, u, p);
      t.next_state[s][u] = static_cast<std::uint8_t>(r.state());
      t.parity[s][u] = static_cast<std::uint8_t>(p);
    }
  finalize(t);
  return t;
}

TrellisSpec build_duobinary_rsc() {
  TrellisSpec t;
  t.input_arity = 4;
  t.bits_per_step = 2;
  t.num_parity = 2;
  t.rate_num = 1;
  t.rate_den = 2;
  t.generators = {0b1011u, {0b1101u, 0b1001u}, 4};  // feedback 1+D+D^3, Y 1+D^2+D^3, W 1+D^3
  for (int s = 0; s < 8; ++s)
    for (int v = 0; v < 4; ++v) {
      const int a = (v >> 1) & 1, b = v & 1;
      Reg r = Reg::from_state(s);
      int y = 0, w = 0;
      duobinary_step(r, a, b, y, w);
      t.next_state[s][v] = static_cast<std::uint8_t>(r.state());
      t.parity[s][v] = static_cast<std::uint8_t>((w << 1) | y);
    }
  finalize(t);
  return t;
}

EncodeResult encode(const TrellisSpec& t, const BitVec& data, Termination term, int start_state) {
  if (data.size() % t.bits_per_step != 0)
    throw std::invalid_argument("encode: data length not divisible by bits per step");
  if (start_state < 0 || start_state >= t.num_states)
    throw std::invalid_argument("encode: invalid start state");

  const int steps = static_cast<int>(data.size()) / t.bits_per_step;
  EncodeResult out;
  out.systematic = data;
  out.parity.assign(t.num_parity, BitVec(steps));

  int s = start_state;
  for (int k = 0; k < steps; ++k) {
    int u = data[k * t.bits_per_step];
    if (t.bits_per_step == 2) u = (u << 1) | data[k * 2 + 1];
    const int p = t.parity[s][u];
    for (int j = 0; j < t.num_parity; ++j) out.parity[j][k] = static_cast<std::uint8_t>((p >> j) & 1);
    s = t.next_state[s][u];
  }

  if (term == Termination::TailBits) {
    const int tail_steps = t.generators.constraint_length - 1;
    out.tail_systematic = BitVec(tail_steps * t.bits_per_step);
    out.tail_parity.assign(t.num_parity, BitVec(tail_steps));
    for (int k = 0; k < tail_steps; ++k) {
      const int u = t.tail_input[s];
      for (int b = 0; b < t.bits_per_step; ++b)
        out.tail_systematic[k * t.bits_per_step + b] =
            static_cast<std::uint8_t>((u >> (t.bits_per_step - 1 - b)) & 1);
      const int p = t.parity[s][u];
      for (int j = 0; j < t.num_parity; ++j) out.tail_parity[j][k] = static_cast<std::uint8_t>((p >> j) & 1);
      s = t.next_state[s][u];
    }
    assert(s == 0);
  }
  out.final_state = s;
  return out;
}

int circulation_state(const TrellisSpec& t, const BitVec& data) {
  if (data.size() % t.bits_per_step != 0)
    throw std::invalid_argument("circulation_state: data length not divisible by bits per step");
  const int steps = static_cast<int>(data.size()) / t.bits_per_step;
  const int r = steps % 7;
  if (r == 0)
    throw std::invalid_argument("circulation_state: block length is a multiple of the recursion period 7");
  const int zero_final = encode(t, data, Termination::Tailbiting, 0).final_state;
  return t.circ_map[r][zero_final];
}

}  // namespace turbolink::trellis
