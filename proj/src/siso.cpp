#include "turbolink/siso.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace turbolink::siso {

namespace {

using trellis::Termination;
using trellis::TrellisSpec;

constexpr int kWarmupSteps = 32;  // wrap-around warm-up span, min(N, 32)
constexpr int kTbExtension = 24;  // cyclic prefix/suffix steps for Viterbi tailbiting

inline int ext_to_base(int e, int n) {
  int k = (e - kTbExtension) % n;
  return k < 0 ? k + n : k;
}

// ---------------------------------------------------------------------------
// Binary Max-Log-MAP
// ---------------------------------------------------------------------------

// gamma(u, p) for the branch with input bit u and parity bit p:
//   0.5 * x(u) * (L_sys + L_apriori) + 0.5 * x(p) * L_par,  x(b) = 1 - 2b.
// Only two values are computed per step; the others are negations.
struct BinaryGamma {
  std::vector<double> pp, pm;  // (u=0,p=0) and (u=0,p=1)
  double at(int k, int u, int p) const {
    // flipping u negates the systematic term only: gamma(1,p) = -gamma(0,1-p)
    const double v = ((p ^ u) == 0) ? pp[k] : pm[k];
    return u ? -v : v;
  }
};

BinaryGamma make_binary_gamma(const LlrVec& sys, const LlrVec& par, const LlrVec& apriori,
                              OpCounters& ops) {
  const int n = static_cast<int>(sys.size());
  BinaryGamma g;
  g.pp.resize(n);
  g.pm.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t1 = 0.5 * (sys[k] + apriori[k]);
    const double t2 = 0.5 * par[k];
    g.pp[k] = t1 + t2;
    g.pm[k] = t1 - t2;
  }
  ops.additions += 3LL * n;
  return g;
}

struct BinaryForward {
  std::vector<double> bs;  // [k][next_state][u] = alpha_k(pred) + gamma_k
  std::array<double, 8> alpha_final{};
};

// One alpha step; branch sums are written to bs16 when provided.
inline void binary_alpha_step(const TrellisSpec& t, const BinaryGamma& g, int k,
                              const std::array<double, 8>& cur, std::array<double, 8>& nxt,
                              double* bs16) {
  for (int ns = 0; ns < 8; ++ns) {
    double best = kNegInf;
    for (int u = 0; u < 2; ++u) {
      const int sp = t.pred[ns][u];
      const double m = cur[sp] + g.at(k, u, t.parity[sp][u]);
      if (bs16) bs16[ns * 2 + u] = m;
      if (u == 0 || m > best)
        best = m;
    }
    nxt[ns] = best;
  }
}

inline void binary_beta_step(const TrellisSpec& t, const BinaryGamma& g, int k,
                             const std::array<double, 8>& next_beta, std::array<double, 8>& out) {
  for (int s = 0; s < 8; ++s) {
    double best = kNegInf;
    for (int u = 0; u < 2; ++u) {
      const double m = g.at(k, u, t.parity[s][u]) + next_beta[t.next_state[s][u]];
      if (u == 0 || m > best) best = m;
    }
    out[s] = best;
  }
}

BinaryForward binary_forward(const TrellisSpec& t, const BinaryGamma& g, int n,
                             const std::array<double, 8>& alpha0, OpCounters& ops) {
  BinaryForward f;
  f.bs.resize(static_cast<std::size_t>(n) * 16);
  std::array<double, 8> cur = alpha0, nxt{};
  for (int k = 0; k < n; ++k) {
    binary_alpha_step(t, g, k, cur, nxt, &f.bs[static_cast<std::size_t>(k) * 16]);
    cur = nxt;
  }
  ops.additions += 16LL * n;
  ops.comparisons += 8LL * n;
  f.alpha_final = cur;
  return f;
}

std::vector<double> binary_backward(const TrellisSpec& t, const BinaryGamma& g, int n,
                                    const std::array<double, 8>& beta_n, OpCounters& ops) {
  std::vector<double> beta(static_cast<std::size_t>(n + 1) * 8);
  std::array<double, 8> cur = beta_n, prev{};
  std::copy(cur.begin(), cur.end(), beta.begin() + static_cast<std::size_t>(n) * 8);
  for (int k = n - 1; k >= 0; --k) {
    binary_beta_step(t, g, k, cur, prev);
    cur = prev;
    std::copy(cur.begin(), cur.end(), beta.begin() + static_cast<std::size_t>(k) * 8);
  }
  ops.additions += 16LL * n;
  ops.comparisons += 8LL * n;
  return beta;
}

// Per-step numerator/denominator (u = 0 / u = 1) branch maxima.
inline void binary_output_max(const double* bs16, const double* beta8, double& max0, double& max1) {
  max0 = max1 = kNegInf;
  for (int ns = 0; ns < 8; ++ns) {
    const double m0 = bs16[ns * 2 + 0] + beta8[ns];
    const double m1 = bs16[ns * 2 + 1] + beta8[ns];
    if (m0 > max0) max0 = m0;
    if (m1 > max1) max1 = m1;
  }
}

BinarySisoResult binary_map_anchored(const TrellisSpec& t, const BinaryGamma& g, int n, int n_data,
                                     const std::array<double, 8>& alpha0,
                                     const std::array<double, 8>& beta_n, OpCounters& ops) {
  const BinaryForward f = binary_forward(t, g, n, alpha0, ops);
  const std::vector<double> beta = binary_backward(t, g, n, beta_n, ops);

  BinarySisoResult out;
  out.aposteriori.resize(n_data);
  for (int k = 0; k < n_data; ++k) {
    double max0 = 0.0, max1 = 0.0;
    binary_output_max(&f.bs[static_cast<std::size_t>(k) * 16], &beta[static_cast<std::size_t>(k + 1) * 8],
                      max0, max1);
    out.aposteriori[k] = max0 - max1;
  }
  ops.additions += 17LL * n_data;
  ops.comparisons += 14LL * n_data;
  out.ops = ops;
  return out;
}

std::array<double, 8> onehot(int state) {
  std::array<double, 8> a;
  a.fill(kNegInf);
  a[state] = 0.0;
  return a;
}

BinarySisoResult binary_map_tailbiting_exact(const TrellisSpec& t, const BinaryGamma& g, int n,
                                             OpCounters& ops) {
  LlrVec num = LlrVec::Constant(n, kNegInf);
  LlrVec den = LlrVec::Constant(n, kNegInf);
  for (int anchor = 0; anchor < 8; ++anchor) {
    const BinaryForward f = binary_forward(t, g, n, onehot(anchor), ops);
    const std::vector<double> beta = binary_backward(t, g, n, onehot(anchor), ops);
    for (int k = 0; k < n; ++k) {
      double max0 = 0.0, max1 = 0.0;
      binary_output_max(&f.bs[static_cast<std::size_t>(k) * 16],
                        &beta[static_cast<std::size_t>(k + 1) * 8], max0, max1);
      if (max0 > num[k]) num[k] = max0;
      if (max1 > den[k]) den[k] = max1;
    }
    ops.additions += 16LL * n;
    ops.comparisons += 16LL * n;
  }
  BinarySisoResult out;
  out.aposteriori = num - den;
  ops.additions += n;
  out.ops = ops;
  return out;
}

BinarySisoResult binary_map_tailbiting_wrap(const TrellisSpec& t, const BinaryGamma& g, int n,
                                            OpCounters& ops) {
  const int w = std::min(n, kWarmupSteps);
  std::array<double, 8> alpha0{}, beta_n{}, tmp{};
  // forward warm-up over the block tail estimates the circular alpha boundary
  for (int k = n - w; k < n; ++k) {
    binary_alpha_step(t, g, k, alpha0, tmp, nullptr);
    alpha0 = tmp;
  }
  // backward warm-up over the block head estimates the circular beta boundary
  for (int k = w - 1; k >= 0; --k) {
    binary_beta_step(t, g, k, beta_n, tmp);
    beta_n = tmp;
  }
  ops.additions += 32LL * w;
  ops.comparisons += 16LL * w;
  return binary_map_anchored(t, g, n, n, alpha0, beta_n, ops);
}

// ---------------------------------------------------------------------------
// Duo-binary Max-Log-MAP
// ---------------------------------------------------------------------------

// gamma for branch with couple value v = 2A+B and parity bits (Y, W), index
// yw = 2W+Y:
//   0.5*[x(A)L_A + x(B)L_B + x(Y)L_Y + x(W)L_W] + La(v),  La(00) = 0.
struct DuoGamma {
  std::vector<std::array<double, 16>> tab;  // [k][v*4 + yw]
  double at(int k, int v, int yw) const { return tab[k][v * 4 + yw]; }
};

DuoGamma make_duo_gamma(const LlrVec& a, const LlrVec& b, const LlrVec& y, const LlrVec& w,
                        const SymbolLlrMat& apriori, OpCounters& ops) {
  const int n = static_cast<int>(a.size());
  DuoGamma g;
  g.tab.resize(n);
  for (int k = 0; k < n; ++k) {
    const double cs = 0.5 * (a[k] + b[k]);   // couple 00 channel term
    const double cd = 0.5 * (a[k] - b[k]);   // couple 01 channel term
    const double sab0 = cs;
    const double sab1 = cd + apriori(0, k);
    const double sab2 = -cd + apriori(1, k);
    const double sab3 = -cs + apriori(2, k);
    const double p0 = 0.5 * (y[k] + w[k]);
    const double q = 0.5 * (y[k] - w[k]);
    const double par[4] = {p0, -q, q, -p0};  // yw = 0..3
    const double sab[4] = {sab0, sab1, sab2, sab3};
    for (int v = 0; v < 4; ++v)
      for (int yw = 0; yw < 4; ++yw) g.tab[k][v * 4 + yw] = sab[v] + par[yw];
  }
  ops.additions += 23LL * n;
  return g;
}

struct DuoForward {
  std::vector<double> bs;  // [k][next_state][v]
  std::array<double, 8> alpha_final{};
};

inline void duo_alpha_step(const TrellisSpec& t, const DuoGamma& g, int k,
                           const std::array<double, 8>& cur, std::array<double, 8>& nxt,
                           double* bs32) {
  for (int ns = 0; ns < 8; ++ns) {
    double best = kNegInf;
    for (int v = 0; v < 4; ++v) {
      const int sp = t.pred[ns][v];
      const double m = cur[sp] + g.at(k, v, t.parity[sp][v]);
      if (bs32) bs32[ns * 4 + v] = m;
      if (v == 0 || m > best) best = m;
    }
    nxt[ns] = best;
  }
}

inline void duo_beta_step(const TrellisSpec& t, const DuoGamma& g, int k,
                          const std::array<double, 8>& next_beta, std::array<double, 8>& out) {
  for (int s = 0; s < 8; ++s) {
    double best = kNegInf;
    for (int v = 0; v < 4; ++v) {
      const double m = g.at(k, v, t.parity[s][v]) + next_beta[t.next_state[s][v]];
      if (v == 0 || m > best) best = m;
    }
    out[s] = best;
  }
}

DuoForward duo_forward(const TrellisSpec& t, const DuoGamma& g, int n,
                       const std::array<double, 8>& alpha0, OpCounters& ops) {
  DuoForward f;
  f.bs.resize(static_cast<std::size_t>(n) * 32);
  std::array<double, 8> cur = alpha0, nxt{};
  for (int k = 0; k < n; ++k) {
    duo_alpha_step(t, g, k, cur, nxt, &f.bs[static_cast<std::size_t>(k) * 32]);
    cur = nxt;
  }
  ops.additions += 32LL * n;
  ops.comparisons += 24LL * n;
  f.alpha_final = cur;
  return f;
}

std::vector<double> duo_backward(const TrellisSpec& t, const DuoGamma& g, int n,
                                 const std::array<double, 8>& beta_n, OpCounters& ops) {
  std::vector<double> beta(static_cast<std::size_t>(n + 1) * 8);
  std::array<double, 8> cur = beta_n, prev{};
  std::copy(cur.begin(), cur.end(), beta.begin() + static_cast<std::size_t>(n) * 8);
  for (int k = n - 1; k >= 0; --k) {
    duo_beta_step(t, g, k, cur, prev);
    cur = prev;
    std::copy(cur.begin(), cur.end(), beta.begin() + static_cast<std::size_t>(k) * 8);
  }
  ops.additions += 32LL * n;
  ops.comparisons += 24LL * n;
  return beta;
}

inline void duo_output_max(const double* bs32, const double* beta8, double out[4]) {
  for (int v = 0; v < 4; ++v) out[v] = kNegInf;
  for (int ns = 0; ns < 8; ++ns)
    for (int v = 0; v < 4; ++v) {
      const double m = bs32[ns * 4 + v] + beta8[ns];
      if (m > out[v]) out[v] = m;
    }
}

DuoSisoResult duo_map_anchored(const TrellisSpec& t, const DuoGamma& g, int n, int n_data,
                               const std::array<double, 8>& alpha0,
                               const std::array<double, 8>& beta_n, OpCounters& ops) {
  const DuoForward f = duo_forward(t, g, n, alpha0, ops);
  const std::vector<double> beta = duo_backward(t, g, n, beta_n, ops);

  DuoSisoResult out;
  out.aposteriori.resize(3, n_data);
  for (int k = 0; k < n_data; ++k) {
    double m[4];
    duo_output_max(&f.bs[static_cast<std::size_t>(k) * 32], &beta[static_cast<std::size_t>(k + 1) * 8], m);
    out.aposteriori(0, k) = m[1] - m[0];
    out.aposteriori(1, k) = m[2] - m[0];
    out.aposteriori(2, k) = m[3] - m[0];
  }
  ops.additions += 35LL * n_data;
  ops.comparisons += 28LL * n_data;
  out.ops = ops;
  return out;
}

DuoSisoResult duo_map_tailbiting_exact(const TrellisSpec& t, const DuoGamma& g, int n,
                                       OpCounters& ops) {
  std::vector<std::array<double, 4>> best(n, {kNegInf, kNegInf, kNegInf, kNegInf});
  for (int anchor = 0; anchor < 8; ++anchor) {
    const DuoForward f = duo_forward(t, g, n, onehot(anchor), ops);
    const std::vector<double> beta = duo_backward(t, g, n, onehot(anchor), ops);
    for (int k = 0; k < n; ++k) {
      double m[4];
      duo_output_max(&f.bs[static_cast<std::size_t>(k) * 32], &beta[static_cast<std::size_t>(k + 1) * 8], m);
      for (int v = 0; v < 4; ++v)
        if (m[v] > best[k][v]) best[k][v] = m[v];
    }
    ops.additions += 32LL * n;
    ops.comparisons += 32LL * n;
  }
  DuoSisoResult out;
  out.aposteriori.resize(3, n);
  for (int k = 0; k < n; ++k) {
    out.aposteriori(0, k) = best[k][1] - best[k][0];
    out.aposteriori(1, k) = best[k][2] - best[k][0];
    out.aposteriori(2, k) = best[k][3] - best[k][0];
  }
  ops.additions += 3LL * n;
  out.ops = ops;
  return out;
}

DuoSisoResult duo_map_tailbiting_wrap(const TrellisSpec& t, const DuoGamma& g, int n, OpCounters& ops) {
  const int w = std::min(n, kWarmupSteps);
  std::array<double, 8> alpha0{}, beta_n{}, tmp{};
  for (int k = n - w; k < n; ++k) {
    duo_alpha_step(t, g, k, alpha0, tmp, nullptr);
    alpha0 = tmp;
  }
  for (int k = w - 1; k >= 0; --k) {
    duo_beta_step(t, g, k, beta_n, tmp);
    beta_n = tmp;
  }
  ops.additions += 64LL * w;
  ops.comparisons += 48LL * w;
  return duo_map_anchored(t, g, n, n, alpha0, beta_n, ops);
}

}  // namespace

BinarySisoResult max_log_map(const TrellisSpec& t, const LlrVec& sys, const LlrVec& par,
                             const LlrVec& apriori, Termination term, TailbitingMode mode) {
  if (t.input_arity != 2) throw std::invalid_argument("max_log_map: binary trellis required");
  if (sys.size() != par.size() || sys.size() != apriori.size())
    throw std::invalid_argument("max_log_map: stream length mismatch");

  const int n = static_cast<int>(sys.size());
  OpCounters ops;
  const BinaryGamma g = make_binary_gamma(sys, par, apriori, ops);

  if (term == Termination::TailBits) {
    const int n_data = n - (t.generators.constraint_length - 1);
    if (n_data <= 0) throw std::invalid_argument("max_log_map: block shorter than tail");
    return binary_map_anchored(t, g, n, n_data, onehot(0), onehot(0), ops);
  }
  return mode == TailbitingMode::Exact ? binary_map_tailbiting_exact(t, g, n, ops)
                                       : binary_map_tailbiting_wrap(t, g, n, ops);
}

DuoSisoResult max_log_map_duo(const TrellisSpec& t, const LlrVec& sys_a, const LlrVec& sys_b,
                              const LlrVec& par_y, const LlrVec& par_w, const SymbolLlrMat& apriori,
                              Termination term, TailbitingMode mode) {
  if (t.input_arity != 4) throw std::invalid_argument("max_log_map_duo: duo-binary trellis required");
  const int n = static_cast<int>(sys_a.size());
  if (sys_b.size() != n || par_y.size() != n || par_w.size() != n || apriori.cols() != n)
    throw std::invalid_argument("max_log_map_duo: stream length mismatch");

  OpCounters ops;
  const DuoGamma g = make_duo_gamma(sys_a, sys_b, par_y, par_w, apriori, ops);

  if (term == Termination::TailBits) {
    const int n_data = n - (t.generators.constraint_length - 1);
    if (n_data <= 0) throw std::invalid_argument("max_log_map_duo: block shorter than tail");
    return duo_map_anchored(t, g, n, n_data, onehot(0), onehot(0), ops);
  }
  return mode == TailbitingMode::Exact ? duo_map_tailbiting_exact(t, g, n, ops)
                                       : duo_map_tailbiting_wrap(t, g, n, ops);
}

// ---------------------------------------------------------------------------
// SOVA, binary: Viterbi forward pass plus trace updates along the ML path.
// ---------------------------------------------------------------------------

namespace {

struct ViterbiTables {
  std::vector<double> bs;        // [e][ns][u] branch sums
  std::vector<std::uint8_t> dec; // [e][ns] winning input
  std::array<double, 8> pm{};    // final path metrics
};

// Forward pass over T steps; gamma is indexed through gamma_at(e, ...) so
// tailbiting extensions reuse the per-step tables.
template <int Arity, typename GammaAt>
ViterbiTables viterbi_forward(const TrellisSpec& t, const GammaAt& gamma_at, int steps,
                              const std::array<double, 8>& pm0, OpCounters& ops) {
  ViterbiTables vt;
  vt.bs.resize(static_cast<std::size_t>(steps) * 8 * Arity);
  vt.dec.resize(static_cast<std::size_t>(steps) * 8);
  std::array<double, 8> cur = pm0, nxt{};
  for (int e = 0; e < steps; ++e) {
    double* bs = &vt.bs[static_cast<std::size_t>(e) * 8 * Arity];
    std::uint8_t* dec = &vt.dec[static_cast<std::size_t>(e) * 8];
    for (int ns = 0; ns < 8; ++ns) {
      double best = kNegInf;
      int bestv = 0;
      for (int v = 0; v < Arity; ++v) {
        const int sp = t.pred[ns][v];
        const double m = cur[sp] + gamma_at(e, v, t.parity[sp][v]);
        bs[ns * Arity + v] = m;
        if (v == 0 || m > best) {
          best = m;
          bestv = v;
        }
      }
      nxt[ns] = best;
      dec[ns] = static_cast<std::uint8_t>(bestv);
    }
    cur = nxt;
  }
  ops.additions += static_cast<std::int64_t>(8 * Arity) * steps;
  ops.comparisons += static_cast<std::int64_t>(8 * (Arity - 1)) * steps;
  vt.pm = cur;
  return vt;
}

// ML path states and inputs from the stored decisions.
template <int Arity>
void traceback(const TrellisSpec& t, const ViterbiTables& vt, int steps, int final_state,
               std::vector<int>& states, std::vector<int>& inputs) {
  states.assign(steps + 1, 0);
  inputs.assign(steps, 0);
  states[steps] = final_state;
  for (int e = steps - 1; e >= 0; --e) {
    const int v = vt.dec[static_cast<std::size_t>(e) * 8 + states[e + 1]];
    inputs[e] = v;
    states[e] = t.pred[states[e + 1]][v];
  }
}

int argmax8(const std::array<double, 8>& a, OpCounters& ops) {
  int best = 0;
  for (int s = 1; s < 8; ++s)
    if (a[s] > a[best]) best = s;
  ops.comparisons += 7;
  return best;
}

}  // namespace

BinarySisoResult sova(const TrellisSpec& t, const LlrVec& sys, const LlrVec& par,
                      const LlrVec& apriori, Termination term, int update_depth) {
  if (t.input_arity != 2) throw std::invalid_argument("sova: binary trellis required");
  if (sys.size() != par.size() || sys.size() != apriori.size())
    throw std::invalid_argument("sova: stream length mismatch");
  if (update_depth < 5 * (t.generators.constraint_length - 1))
    throw std::invalid_argument("sova: update depth too small");

  const int n = static_cast<int>(sys.size());
  OpCounters ops;
  const BinaryGamma g = make_binary_gamma(sys, par, apriori, ops);

  const bool tb = term == Termination::Tailbiting;
  const int steps = tb ? n + 2 * kTbExtension : n;
  const auto gamma_at = [&](int e, int u, int p) {
    return g.at(tb ? ext_to_base(e, n) : e, u, p);
  };

  std::array<double, 8> pm0{};
  if (!tb) pm0 = onehot(0);
  ViterbiTables vt = viterbi_forward<2>(t, gamma_at, steps, pm0, ops);

  const int final_state = tb ? argmax8(vt.pm, ops) : 0;
  std::vector<int> path, inputs;
  traceback<2>(t, vt, steps, final_state, path, inputs);

  // reliability trace: at each ML merge, the discarded path's bit sequence is
  // followed until it remerges; disagreeing positions take min(rel, delta)
  std::vector<double> rel(steps, kSovaInf);
  for (int k = 0; k < steps; ++k) {
    const double* bs = &vt.bs[static_cast<std::size_t>(k) * 16];
    const int ns = path[k + 1];
    const int u_ml = inputs[k];
    const int u_c = 1 - u_ml;
    const double delta = bs[ns * 2 + u_ml] - bs[ns * 2 + u_c];
    ops.additions += 1;

    int comp_state = t.pred[ns][u_c];
    int comp_bit = u_c;
    for (int j = k; j >= 0 && j > k - update_depth; --j) {
      if (comp_bit != inputs[j]) {
        if (delta < rel[j]) rel[j] = delta;
        ops.comparisons += 1;
      }
      if (j == 0) break;
      if (comp_state == path[j]) break;  // remerged: histories coincide
      const int v = vt.dec[static_cast<std::size_t>(j - 1) * 8 + comp_state];
      comp_bit = v;
      comp_state = t.pred[comp_state][v];
    }
  }

  const int n_data = tb ? n : n - (t.generators.constraint_length - 1);
  const int off = tb ? kTbExtension : 0;
  BinarySisoResult out;
  out.aposteriori.resize(n_data);
  for (int k = 0; k < n_data; ++k)
    out.aposteriori[k] = bpsk(static_cast<std::uint8_t>(inputs[off + k])) * rel[off + k];
  out.ops = ops;
  return out;
}

// ---------------------------------------------------------------------------
// SOVA, duo-binary: register-exchange with per-value reliability slots.
// ---------------------------------------------------------------------------

DuoSisoResult sova_duo(const TrellisSpec& t, const LlrVec& sys_a, const LlrVec& sys_b,
                       const LlrVec& par_y, const LlrVec& par_w, const SymbolLlrMat& apriori,
                       Termination term, int update_depth) {
  if (t.input_arity != 4) throw std::invalid_argument("sova_duo: duo-binary trellis required");
  const int n = static_cast<int>(sys_a.size());
  if (sys_b.size() != n || par_y.size() != n || par_w.size() != n || apriori.cols() != n)
    throw std::invalid_argument("sova_duo: stream length mismatch");
  if (update_depth < 5 * (t.generators.constraint_length - 1))
    throw std::invalid_argument("sova_duo: update depth too small");

  OpCounters ops;
  const DuoGamma g = make_duo_gamma(sys_a, sys_b, par_y, par_w, apriori, ops);

  const bool tb = term == Termination::Tailbiting;
  const int steps = tb ? n + 2 * kTbExtension : n;
  const int w = update_depth;
  const auto gamma_at = [&](int e, int v, int p) { return g.at(tb ? ext_to_base(e, n) : e, v, p); };

  // Register-exchange state: per state, the survivor's last w couple values
  // and, per window position, a reliability slot for each couple value.
  const std::size_t wslots = static_cast<std::size_t>(w) * 4;
  std::vector<std::uint8_t> sym_a(8 * w, 0), sym_b(8 * w, 0);
  std::vector<double> rel_a(8 * wslots, kSovaInf), rel_b(8 * wslots, kSovaInf);
  std::uint8_t* sym_cur = sym_a.data();
  std::uint8_t* sym_nxt = sym_b.data();
  double* rel_cur = rel_a.data();
  double* rel_nxt = rel_b.data();

  std::vector<std::array<double, 4>> retired(steps, {kSovaInf, kSovaInf, kSovaInf, kSovaInf});

  ViterbiTables vt;
  vt.bs.resize(static_cast<std::size_t>(steps) * 32);
  vt.dec.resize(static_cast<std::size_t>(steps) * 8);
  std::array<double, 8> pm = tb ? std::array<double, 8>{} : onehot(0);
  std::array<double, 8> pm_next{};

  for (int e = 0; e < steps; ++e) {
    // the oldest window entry retires; take it from the current best state
    if (e >= w) {
      int best = 0;
      for (int s = 1; s < 8; ++s)
        if (pm[s] > pm[best]) best = s;
      ops.comparisons += 7;
      const double* q = &rel_cur[best * wslots + static_cast<std::size_t>(w - 1) * 4];
      retired[e - w] = {q[0], q[1], q[2], q[3]};
    }

    double* bs = &vt.bs[static_cast<std::size_t>(e) * 32];
    std::uint8_t* dec = &vt.dec[static_cast<std::size_t>(e) * 8];
    for (int ns = 0; ns < 8; ++ns) {
      double best = kNegInf;
      int bestv = 0;
      for (int v = 0; v < 4; ++v) {
        const int sp = t.pred[ns][v];
        const double m = pm[sp] + gamma_at(e, v, t.parity[sp][v]);
        bs[ns * 4 + v] = m;
        if (v == 0 || m > best) {
          best = m;
          bestv = v;
        }
      }
      pm_next[ns] = best;
      dec[ns] = static_cast<std::uint8_t>(bestv);

      // inherit survivor window, push current couple with fresh slots
      const int ps = t.pred[ns][bestv];
      std::uint8_t* sy = &sym_nxt[ns * w];
      double* rl = &rel_nxt[ns * wslots];
      sy[0] = static_cast<std::uint8_t>(bestv);
      std::memcpy(sy + 1, &sym_cur[ps * w], static_cast<std::size_t>(w - 1));
      rl[0] = rl[1] = rl[2] = rl[3] = kSovaInf;
      std::memcpy(rl + 4, &rel_cur[ps * wslots], (wslots - 4) * sizeof(double));

      // the update competitor is the strongest discarded path: the one with
      // the smallest metric gap to the survivor
      int comp_v = -1;
      double delta = 0.0;
      for (int v = 0; v < 4; ++v) {
        if (v == bestv) continue;
        const double d = best - bs[ns * 4 + v];
        if (comp_v < 0) {
          comp_v = v;
          delta = d;
        } else {
          ops.comparisons += 1;
          if (d < delta) {
            delta = d;
            comp_v = v;
          }
        }
      }

      // min-in the gap wherever the competitor's couple history disagrees
      // with the survivor's
      const int depth = std::min(w, e + 1);
      const int pc = t.pred[ns][comp_v];
      const std::uint8_t* csy = &sym_cur[pc * w];
      for (int j = 0; j < depth; ++j) {
        const int comp_sym = (j == 0) ? comp_v : csy[j - 1];
        if (comp_sym != sy[j]) {
          double& slot = rl[static_cast<std::size_t>(j) * 4 + comp_sym];
          if (delta < slot) slot = delta;
          ops.comparisons += 1;
        }
      }
    }
    pm = pm_next;
    ops.additions += 32 + 24;  // branch sums + gap differences
    ops.comparisons += 24;     // ACS maxima
    std::swap(sym_cur, sym_nxt);
    std::swap(rel_cur, rel_nxt);
  }

  const int final_state = tb ? argmax8(pm, ops) : 0;
  std::vector<int> path, inputs;
  vt.pm = pm;
  traceback<4>(t, vt, steps, final_state, path, inputs);

  // remaining window positions finalize from the ML end state's window
  for (int j = 0; j < std::min(w, steps); ++j) {
    const double* q = &rel_cur[final_state * wslots + static_cast<std::size_t>(j) * 4];
    retired[steps - 1 - j] = {q[0], q[1], q[2], q[3]};
  }

  const int n_data = tb ? n : n - (t.generators.constraint_length - 1);
  const int off = tb ? kTbExtension : 0;
  DuoSisoResult out;
  out.aposteriori.resize(3, n_data);
  for (int k = 0; k < n_data; ++k) {
    const int e = off + k;
    const int d = inputs[e];
    const auto& q = retired[e];
    // m(v) = -rel(v) for v != d, m(d) = 0; output rows are m(v) - m(0)
    if (d == 0) {
      out.aposteriori(0, k) = -q[1];
      out.aposteriori(1, k) = -q[2];
      out.aposteriori(2, k) = -q[3];
    } else {
      for (int v = 1; v < 4; ++v) {
        if (v == d) {
          out.aposteriori(v - 1, k) = q[0];
        } else {
          out.aposteriori(v - 1, k) = q[0] - q[v];
          ops.additions += 1;
        }
      }
    }
  }
  out.ops = ops;
  return out;
}

void couple_to_bit_llrs(const SymbolLlrMat& sym, LlrVec& a, LlrVec& b) {
  const int n = static_cast<int>(sym.cols());
  a.resize(n);
  b.resize(n);
  for (int k = 0; k < n; ++k) {
    const double l01 = sym(0, k), l10 = sym(1, k), l11 = sym(2, k);
    a[k] = std::max(0.0, l01) - std::max(l10, l11);
    b[k] = std::max(0.0, l10) - std::max(l01, l11);
  }
}

}  // namespace turbolink::siso
