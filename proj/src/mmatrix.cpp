#include "snc/mmatrix.hpp"

#include <functional>

namespace snc {

bool Tube::operator==(const Tube& o) const {
  return kind == o.kind && c1 == o.c1 && c2 == o.c2 && g1 == o.g1 && g2 == o.g2 &&
         arcA == o.arcA && arcQ == o.arcQ && arcX1 == o.arcX1 && arcX2 == o.arcX2 &&
         mc1 == o.mc1 && mg1 == o.mg1 && mc2 == o.mc2 && mg2 == o.mg2;
}

Key Tube::key() const {
  return make_key({static_cast<int>(kind), c1, c2, g1, g2, arcA, arcQ, arcX1, arcX2, mc1,
                   mg1, mc2, mg2});
}

Tube vacuum_tube(TubeKind kind, int arc) {
  Tube t;
  t.kind = kind;
  t.arcA = t.arcQ = t.arcX1 = t.arcX2 = arc;
  return t;
}

Key RingState::key() const {
  std::vector<int16_t> v(seg.begin(), seg.end());
  v.insert(v.end(), mult.begin(), mult.end());
  return Key(std::move(v));
}

Key Ring6::key() const {
  std::vector<int16_t> v(seg.begin(), seg.end());
  v.insert(v.end(), mult.begin(), mult.end());
  return Key(std::move(v));
}

SType chain1_ring_in_type(ChainFlavor f) {
  return f == ChainFlavor::PureD2 ? SType::D2 : SType::D1;
}
SType chain1_ring_out_type(ChainFlavor f) {
  switch (f) {
    case ChainFlavor::PureD1: return SType::D1;
    case ChainFlavor::Module: return SType::M;
    case ChainFlavor::PureD2: return SType::D2;
  }
  return SType::D1;
}
SType chain1_loop_type(ChainFlavor f) { return chain1_ring_out_type(f); }
SType chain1_upper_leg_type(ChainFlavor f) {
  switch (f) {
    case ChainFlavor::PureD1: return SType::D1;
    case ChainFlavor::Module: return SType::D2;
    case ChainFlavor::PureD2: return SType::D2;
  }
  return SType::D1;
}

int chain1_in_vdim(const Chain1Env& env, int p, const std::array<int16_t, 10>& r) {
  RecouplingContext ctx = env.bm->context();
  SType ti = chain1_ring_in_type(env.flavor);
  const auto& a = env.legs;
  const auto& d = env.tails;
  switch (p) {
    case 1: return ctx.vmult(ti, a[0], ti, r[0], r[9]);  // a1 x r1 -> r10
    case 2: return ctx.vmult(ti, r[0], ti, r[1], a[1]);  // r1 x r2 -> a2
    case 3: return ctx.vmult(ti, r[1], ti, a[2], r[2]);  // r2 x a3 -> r3
    case 4: return ctx.vmult(ti, r[2], ti, d[0], r[3]);  // r3 x d1 -> r4
    case 5: return ctx.vmult(ti, r[3], ti, d[1], r[4]);  // r4 x d2 -> r5
    case 6: return ctx.vmult(ti, r[5], ti, a[3], r[4]);  // r6 x a4 -> r5
    case 7: return ctx.vmult(ti, r[6], ti, r[5], a[4]);  // r7 x r6 -> a5
    case 8: return ctx.vmult(ti, a[5], ti, r[6], r[7]);  // a6 x r7 -> r8
    default: return 0;  // 9, 10 depend on grabbed tail labels: chain1_in_vdim_cross
  }
}

int chain1_in_vdim_cross(const Chain1Env& env, int p, const std::array<int16_t, 10>& r,
                         int cleg) {
  RecouplingContext ctx = env.bm->context();
  SType ti = chain1_ring_in_type(env.flavor);
  if (p == 9) return ctx.vmult(ti, r[8], ti, cleg, r[7]);   // r9 x c2 -> r8
  if (p == 10) return ctx.vmult(ti, r[9], ti, cleg, r[8]);  // r10 x c1 -> r9
  return 0;
}

int chain1_out_vdim(const Chain1Env& env, const Tube& tube, int p,
                    const std::array<int16_t, 10>& R) {
  RecouplingContext ctx = env.bm->context();
  SType to = chain1_ring_out_type(env.flavor);
  SType ti = chain1_ring_in_type(env.flavor);
  SType tu = chain1_upper_leg_type(env.flavor);
  const auto& a = env.legs;
  const auto& d = env.tails;
  switch (p) {
    case 1: return ctx.vmult(ti, a[0], to, R[0], R[9]);  // a1 |> R1 -> R10
    case 2: return ctx.vmult(ti, a[1], to, R[1], R[0]);
    case 3: return ctx.vmult(ti, a[2], to, R[2], R[1]);
    case 4: return ctx.vmult(ti, d[0], to, R[3], R[2]);
    case 5: return ctx.vmult(ti, d[1], to, R[4], R[3]);
    case 6: return ctx.vmult(ti, a[3], to, R[4], R[5]);  // a4 |> R5 -> R6
    case 7: return ctx.vmult(ti, a[4], to, R[5], R[6]);
    case 8: return ctx.vmult(ti, a[5], to, R[6], R[7]);
    case 9: return ctx.vmult(to, R[8], tu, tube.g2, R[7]);   // R9 <| g2 -> R8
    case 10: return ctx.vmult(to, R[9], tu, tube.g1, R[8]);  // R10 <| g1 -> R9
  }
  return 0;
}

std::vector<std::pair<RingState, cplx>> chain1_apply(const Chain1Env& env, const Tube& tube,
                                                     const RingState& in) {
  RecouplingContext ctx = env.bm->context();
  const SType TI = chain1_ring_in_type(env.flavor);
  const SType TO = chain1_ring_out_type(env.flavor);
  const SType TU = chain1_upper_leg_type(env.flavor);
  const int nout = ctx.num_labels(TO);
  const auto& a = env.legs;
  const auto& d = env.tails;
  const auto& r = in.seg;
  const auto& i = in.mult;
  const int A = tube.arcA, Q = tube.arcQ, X1 = tube.arcX1, X2 = tube.arcX2;

  if (chain1_in_vdim_cross(env, 9, r, tube.c2) <= in.mult[8]) return {};
  if (chain1_in_vdim_cross(env, 10, r, tube.c1) <= in.mult[9]) return {};

  // tetrahedral normalization: every associator entry is used as a G-symbol,
  // F / sqrt(d_e d_f) over its two inner slots
  auto gnorm = [&](SType te, int e, SType tf, int f) {
    return 1.0 / std::sqrt(ctx.dim(te, e) * ctx.dim(tf, f));
  };

  KeyMap<std::pair<RingState, cplx>> acc;
  std::array<int16_t, 10> R{};
  std::array<int16_t, 10> k{};

  for (int R10 = 0; R10 < nout; ++R10) {
    int dim_j10 = ctx.vmult(TI, r[9], TO, A, R10);
    for (int j10 = 0; j10 < dim_j10; ++j10) {
      R[9] = static_cast<int16_t>(R10);
      std::function<void(int, int, cplx)> go = [&](int p, int jprev, cplx amp) {
        if (std::abs(amp) < kPruneTol) return;
        switch (p) {
          case 1: {
            // F[a1, r1, A; R10][(r10, i1, j10)][(R1, j1, k1)]
            for (int R1 = 0; R1 < nout; ++R1) {
              int dj = ctx.vmult(TI, r[0], TO, A, R1);
              int dk = ctx.vmult(TI, a[0], TO, R1, R10);
              for (int j1 = 0; j1 < dj; ++j1)
                for (int k1 = 0; k1 < dk; ++k1) {
                  cplx c = ctx.fcoef(TI, a[0], TI, r[0], TO, A, R[9], r[9], i[0], jprev, R1,
                                     j1, k1);
                  c *= gnorm(TI, r[9], TO, R1);
                  if (std::abs(c) < kPruneTol) continue;
                  R[0] = static_cast<int16_t>(R1);
                  k[0] = static_cast<int16_t>(k1);
                  go(2, j1, amp * c);
                }
            }
            break;
          }
          case 2: {
            // conj(F[r1, r2, R2; R1][(a2, i2, k2)][(A, j2, j1)])
            for (int R2 = 0; R2 < nout; ++R2) {
              int dj = ctx.vmult(TI, r[1], TO, R2, A);
              int dk = ctx.vmult(TI, a[1], TO, R2, R[0]);
              for (int j2 = 0; j2 < dj; ++j2)
                for (int k2 = 0; k2 < dk; ++k2) {
                  cplx c = std::conj(ctx.fcoef(TI, r[0], TI, r[1], TO, R2, R[0], a[1], i[1],
                                               k2, A, j2, jprev));
                  c *= gnorm(TI, a[1], TO, A);
                  if (std::abs(c) < kPruneTol) continue;
                  R[1] = static_cast<int16_t>(R2);
                  k[1] = static_cast<int16_t>(k2);
                  go(3, j2, amp * c);
                }
            }
            break;
          }
          case 3: {
            // F[r2, a3, R3; A][(r3, i3, j3)][(R2, k3, j2)]
            for (int R3 = 0; R3 < nout; ++R3) {
              int dj = ctx.vmult(TI, r[2], TO, R3, A);
              int dk = ctx.vmult(TI, a[2], TO, R3, R[1]);
              for (int j3 = 0; j3 < dj; ++j3)
                for (int k3 = 0; k3 < dk; ++k3) {
                  cplx c = ctx.fcoef(TI, r[1], TI, a[2], TO, R3, A, r[2], i[2], j3, R[1], k3,
                                     jprev);
                  c *= gnorm(TI, r[2], TO, R[1]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[2] = static_cast<int16_t>(R3);
                  k[2] = static_cast<int16_t>(k3);
                  go(4, j3, amp * c);
                }
            }
            break;
          }
          case 4: {
            // F[r3, d1, R4; A][(r4, i4, j4)][(R3, k4, j3)]
            for (int R4 = 0; R4 < nout; ++R4) {
              int dj = ctx.vmult(TI, r[3], TO, R4, A);
              int dk = ctx.vmult(TI, d[0], TO, R4, R[2]);
              for (int j4 = 0; j4 < dj; ++j4)
                for (int k4 = 0; k4 < dk; ++k4) {
                  cplx c = ctx.fcoef(TI, r[2], TI, d[0], TO, R4, A, r[3], i[3], j4, R[2], k4,
                                     jprev);
                  c *= gnorm(TI, r[3], TO, R[2]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[3] = static_cast<int16_t>(R4);
                  k[3] = static_cast<int16_t>(k4);
                  go(5, j4, amp * c);
                }
            }
            break;
          }
          case 5: {
            // F[r4, d2, R5; A][(r5, i5, j5)][(R4, k5, j4)]
            for (int R5 = 0; R5 < nout; ++R5) {
              int dj = ctx.vmult(TI, r[4], TO, R5, A);
              int dk = ctx.vmult(TI, d[1], TO, R5, R[3]);
              for (int j5 = 0; j5 < dj; ++j5)
                for (int k5 = 0; k5 < dk; ++k5) {
                  cplx c = ctx.fcoef(TI, r[3], TI, d[1], TO, R5, A, r[4], i[4], j5, R[3], k5,
                                     jprev);
                  c *= gnorm(TI, r[4], TO, R[3]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[4] = static_cast<int16_t>(R5);
                  k[4] = static_cast<int16_t>(k5);
                  go(6, j5, amp * c);
                }
            }
            break;
          }
          case 6: {
            // conj(F[r6, a4, R5; A][(r5, i6, j5)][(R6, k6, j6)])
            for (int R6 = 0; R6 < nout; ++R6) {
              int dj = ctx.vmult(TI, r[5], TO, R6, A);
              int dk = ctx.vmult(TI, a[3], TO, R[4], R6);
              for (int j6 = 0; j6 < dj; ++j6)
                for (int k6 = 0; k6 < dk; ++k6) {
                  cplx c = std::conj(ctx.fcoef(TI, r[5], TI, a[3], TO, R[4], A, r[4], i[5],
                                               jprev, R6, k6, j6));
                  c *= gnorm(TI, r[4], TO, R6);
                  if (std::abs(c) < kPruneTol) continue;
                  R[5] = static_cast<int16_t>(R6);
                  k[5] = static_cast<int16_t>(k6);
                  go(7, j6, amp * c);
                }
            }
            break;
          }
          case 7: {
            // F[r7, r6, R6; R7][(a5, i7, k7)][(A, j6, j7)]
            for (int R7 = 0; R7 < nout; ++R7) {
              int dj = ctx.vmult(TI, r[6], TO, A, R7);
              int dk = ctx.vmult(TI, a[4], TO, R[5], R7);
              for (int j7 = 0; j7 < dj; ++j7)
                for (int k7 = 0; k7 < dk; ++k7) {
                  cplx c = ctx.fcoef(TI, r[6], TI, r[5], TO, R[5], R7, a[4], i[6], k7, A,
                                     jprev, j7);
                  c *= gnorm(TI, a[4], TO, A);
                  if (std::abs(c) < kPruneTol) continue;
                  R[6] = static_cast<int16_t>(R7);
                  k[6] = static_cast<int16_t>(k7);
                  go(8, j7, amp * c);
                }
            }
            break;
          }
          case 8: {
            // conj(F[a6, r7, A; R8][(r8, i8, j8)][(R7, j7, k8)])
            for (int R8 = 0; R8 < nout; ++R8) {
              int dj = ctx.vmult(TI, r[7], TO, A, R8);
              int dk = ctx.vmult(TI, a[5], TO, R[6], R8);
              for (int j8 = 0; j8 < dj; ++j8)
                for (int k8 = 0; k8 < dk; ++k8) {
                  cplx c = std::conj(ctx.fcoef(TI, a[5], TI, r[6], TO, A, R8, r[7], i[7], j8,
                                               R[6], jprev, k8));
                  c *= gnorm(TI, r[7], TO, R[6]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[7] = static_cast<int16_t>(R8);
                  k[7] = static_cast<int16_t>(k8);
                  go(9, j8, amp * c);
                }
            }
            break;
          }
          case 9: {
            // fA = F[r9, c2, A; R8][(r8, i9, j8)][(X2, mc2, t9)]
            // fB = conj(F[r9, Q, g2; R8][(R9, j9, k9)][(X2, mg2, t9)])
            for (int R9 = 0; R9 < nout; ++R9) {
              int dj = ctx.vmult(TI, r[8], TO, Q, R9);
              int dk = ctx.vmult(TO, R9, TU, tube.g2, R[7]);
              int dt = ctx.vmult(TI, r[8], TO, X2, R[7]);
              for (int j9 = 0; j9 < dj; ++j9)
                for (int k9 = 0; k9 < dk; ++k9) {
                  cplx s = 0;
                  for (int t9 = 0; t9 < dt; ++t9) {
                    cplx fa = ctx.fcoef(TI, r[8], TI, tube.c2, TO, A, R[7], r[7], i[8],
                                        jprev, X2, tube.mc2, t9);
                    fa *= gnorm(TI, r[7], TO, X2);
                    cplx fb = std::conj(ctx.fcoef(TI, r[8], TO, Q, TU, tube.g2, R[7], R9, j9,
                                                  k9, X2, tube.mg2, t9));
                    fb *= gnorm(TO, R9, TO, X2);
                    s += fa * fb;
                  }
                  if (std::abs(s) < kPruneTol) continue;
                  R[8] = static_cast<int16_t>(R9);
                  k[8] = static_cast<int16_t>(k9);
                  go(10, j9, amp * s);
                }
            }
            break;
          }
          case 10: {
            // fA = F[r10, c1, Q; R9][(r9, i10, j9)][(X1, mc1, t10)]
            // fB = conj(F[r10, A, g1; R9][(R10, j10, k10)][(X1, mg1, t10)])
            int dk = ctx.vmult(TO, R[9], TU, tube.g1, R[8]);
            int dt = ctx.vmult(TI, r[9], TO, X1, R[8]);
            for (int k10 = 0; k10 < dk; ++k10) {
              cplx s = 0;
              for (int t10 = 0; t10 < dt; ++t10) {
                cplx fa = ctx.fcoef(TI, r[9], TI, tube.c1, TO, Q, R[8], r[8], i[9], jprev,
                                    X1, tube.mc1, t10);
                fa *= gnorm(TI, r[8], TO, X1);
                cplx fb = std::conj(ctx.fcoef(TI, r[9], TO, A, TU, tube.g1, R[8], R[9], j10,
                                              k10, X1, tube.mg1, t10));
                fb *= gnorm(TO, R[9], TO, X1);
                s += fa * fb;
              }
              if (std::abs(s) < kPruneTol) continue;
              k[9] = static_cast<int16_t>(k10);
              RingState st;
              st.seg = R;
              st.mult = k;
              Key kk = st.key();
              auto it = acc.find(kk);
              if (it == acc.end())
                acc.emplace(kk, std::make_pair(st, amp * s));
              else
                it->second.second += amp * s;
            }
            break;
          }
        }
      };
      go(1, j10, cplx(1.0, 0.0));
    }
  }

  // In the unitary vertex gauge every factor is an entry of a unitary
  // recoupling and all bond contractions pair identically typed slots, so
  // the chain needs no d-weighted prefactor (the paper's sqrt(d) weights
  // belong to the tetrahedrally normalized gauge). For the pure flavors the
  // converted ring must be re-expressed in the lattice convention: segments
  // r2..r6 are traversed against their orientation, so their chain labels
  // are the duals of the physical ones, and the vertex slots at P2..P7 are
  // rotated into the physical vertex spaces by Frobenius bends (inverses of
  // unit-channel F slices). Module flavor output defines the stage-1
  // convention directly and needs neither.
  std::vector<std::pair<RingState, cplx>> out;
  if (env.flavor == ChainFlavor::Module) {
    out.reserve(acc.size());
    for (auto& [kk, pr] : acc) {
      double w = std::sqrt(ctx.dim(TO, A) * ctx.dim(TO, Q) * ctx.dim(TO, X1) *
                           ctx.dim(TO, X2));
      for (int s2 = 0; s2 < 10; ++s2)
        w *= std::sqrt(ctx.dim(TI, r[s2]) * ctx.dim(TO, pr.first.seg[s2]));
      cplx v = pr.second * w;
      if (std::abs(v) > kPruneTol) out.push_back({pr.first, v});
    }
    return out;
  }

  const FusionCat& cat = (env.flavor == ChainFlavor::PureD1) ? env.bm->c1 : env.bm->c2;
  auto dualc = [&](int x) { return cat.dual[x]; };
  auto segment_weight = [&](const RingState& st) {
    double w = std::sqrt(ctx.dim(TO, A) * ctx.dim(TO, Q) * ctx.dim(TO, X1) *
                         ctx.dim(TO, X2));
    for (int s2 = 0; s2 < 10; ++s2)
      w *= std::sqrt(ctx.dim(TI, r[s2]) * ctx.dim(TO, st.seg[s2]));
    return w;
  };
  // bend matrix: maps the chain slot index (source) to the physical lattice
  // vertex index (target); computed as the inverse of the unit-channel F
  // slice, conjugated for the conjugated factors (P2, P6)
  auto bend = [&](int p, const std::array<int16_t, 10>& Rc) -> Mat {
    // Rc holds chain labels; physical labels of r2..r6 are duals
    auto ph = [&](int s) { return (s >= 1 && s <= 5) ? dualc(Rc[s]) : (int)Rc[s]; };
    int x, C, B;
    bool conjugated;
    switch (p) {
      case 2: x = a[1]; C = ph(0); B = ph(1); conjugated = true; break;
      case 3: x = a[2]; C = ph(1); B = ph(2); conjugated = false; break;
      case 4: x = d[0]; C = ph(2); B = ph(3); conjugated = false; break;
      case 5: x = d[1]; C = ph(3); B = ph(4); conjugated = false; break;
      case 6: x = a[3]; C = ph(5); B = ph(4); conjugated = true; break;
      case 7: x = a[4]; C = ph(6); B = ph(5); conjugated = false; break;
      default: return Mat::Identity(1, 1);
    }
    // pin slices (see derivation): P2/P7 use the (I) shape, others (II)
    Mat s;
    if (p == 2 || p == 7) {
      // S[i][k] = F[C, B, Bbar; C][(x, i, k)][(0,0,0)] with i in V^x_{C B},
      // k in V^C_{x Bbar}
      int di = cat.N(C, B, x), dk = cat.N(x, dualc(B), C);
      s = Mat::Zero(di, dk);
      for (int i = 0; i < di; ++i)
        for (int kk2 = 0; kk2 < dk; ++kk2)
          s(i, kk2) = cat.F.get(C, B, dualc(B), C, x, i, kk2, 0, 0, 0);
    } else {
      // S[i][k] = F[C, x, Bbar; 0][(B, i, 0)][(Cbar, k, 0)] with i in
      // V^B_{C x}, k in V^{Cbar}_{x Bbar}
      int di = cat.N(C, x, B), dk = cat.N(x, dualc(B), dualc(C));
      s = Mat::Zero(di, dk);
      for (int i = 0; i < di; ++i)
        for (int kk2 = 0; kk2 < dk; ++kk2)
          s(i, kk2) = cat.F.get(C, x, dualc(B), 0, B, i, 0, dualc(C), kk2, 0);
    }
    if (conjugated) s = s.conjugate();
    if (s.rows() == 0 || s.cols() == 0) return s;
    if (s.rows() != s.cols()) throw domain_error("bend slice is not square");
    // phase-only correction: the magnitude part of the slice is already
    // accounted for by the tetrahedral normalization of the factors.
    // bend = unitary part of (S^T)^{-1}
    Eigen::JacobiSVD<Mat> svd(s.transpose().inverse(),
                              Eigen::ComputeFullU | Eigen::ComputeFullV);
    return Mat(svd.matrixU() * svd.matrixV().adjoint());
  };

  KeyMap<std::pair<RingState, cplx>> bent;
  for (auto& [kk, pr] : acc) {
    const RingState& st = pr.first;
    // physical segment labels
    RingState ph = st;
    for (int s = 1; s <= 5; ++s) ph.seg[s] = static_cast<int16_t>(dualc(st.seg[s]));
    // bend multiplicity slots at P2..P7
    std::array<Mat, 8> bm_;
    for (int p = 2; p <= 7; ++p) bm_[p] = bend(p, st.seg);
    // iterate over target indices
    std::function<void(int, cplx, RingState&)> emit = [&](int p, cplx amp, RingState& cur) {
      if (std::abs(amp) < kPruneTol) return;
      if (p == 8) {
        Key k2 = cur.key();
        auto it = bent.find(k2);
        if (it == bent.end())
          bent.emplace(k2, std::make_pair(cur, amp));
        else
          it->second.second += amp;
        return;
      }
      const Mat& bmx = bm_[p];
      int src = st.mult[p - 1];
      for (int tgt = 0; tgt < bmx.rows(); ++tgt) {
        cur.mult[p - 1] = static_cast<int16_t>(tgt);
        emit(p + 1, amp * bmx(tgt, src), cur);
      }
    };
    RingState cur = ph;
    emit(2, pr.second * segment_weight(st), cur);
  }
  out.reserve(bent.size());
  for (auto& [kk, pr] : bent) {
    if (std::abs(pr.second) > kPruneTol) out.push_back(pr);
  }
  return out;
}

std::vector<std::pair<Ring6, cplx>> chain2_apply(const Chain2Env& env, int D,
                                                 const Ring6& in) {
  RecouplingContext ctx = env.bm->context();
  const SType D1 = SType::D1, M = SType::M, D2 = SType::D2;
  const int nM = ctx.num_labels(M), nA = ctx.num_labels(D2);
  const auto& C = env.legs;
  int a1 = in.seg[0], B1 = in.seg[1], a2 = in.seg[2], B2 = in.seg[3], a3 = in.seg[4],
      B3 = in.seg[5];
  const auto& K = in.mult;

  KeyMap<std::pair<Ring6, cplx>> acc;

  for (int E1 = 0; E1 < nM; ++E1)
    for (int l1 = 0; l1 < ctx.vmult(D1, a1, M, D, E1); ++l1)
      for (int al1 = 0; al1 < nA; ++al1)
        for (int h1 = 0; h1 < ctx.vmult(M, C[0], D2, al1, E1); ++h1)
          for (int l2 = 0; l2 < ctx.vmult(M, B1, D2, al1, D); ++l2) {
            cplx g1 = std::conj(
                ctx.fcoef(D1, a1, M, B1, D2, al1, E1, C[0], K[0], h1, D, l2, l1));
            g1 /= std::sqrt(ctx.dim(M, C[0]) * ctx.dim(M, D));
            if (std::abs(g1) < kPruneTol) continue;
            for (int E2 = 0; E2 < nM; ++E2)
              for (int h2 = 0; h2 < ctx.vmult(M, C[1], D2, al1, E2); ++h2)
                for (int l3 = 0; l3 < ctx.vmult(D1, a2, M, E2, D); ++l3) {
                  cplx g2 = std::conj(
                      ctx.fcoef(D1, a2, M, C[1], D2, al1, D, B1, K[1], l2, E2, h2, l3));
                  g2 /= std::sqrt(ctx.dim(M, B1) * ctx.dim(M, E2));
                  if (std::abs(g2) < kPruneTol) continue;
                  for (int al2 = 0; al2 < nA; ++al2)
                    for (int h3 = 0; h3 < ctx.vmult(M, E2, D2, al2, C[2]); ++h3)
                      for (int l4 = 0; l4 < ctx.vmult(M, D, D2, al2, B2); ++l4) {
                        cplx g3 = std::conj(ctx.fcoef(D1, a2, M, E2, D2, al2, B2, D, l3, l4,
                                                      C[2], h3, K[2]));
                        g3 /= std::sqrt(ctx.dim(M, D) * ctx.dim(M, C[2]));
                        if (std::abs(g3) < kPruneTol) continue;
                        for (int E3 = 0; E3 < nM; ++E3)
                          for (int l5 = 0; l5 < ctx.vmult(D1, a3, M, E3, D); ++l5)
                            for (int h4 = 0; h4 < ctx.vmult(M, E3, D2, al2, C[3]); ++h4) {
                              cplx g4 = ctx.fcoef(D1, a3, M, E3, D2, al2, B2, D, l5, l4,
                                                  C[3], h4, K[3]);
                              g4 /= std::sqrt(ctx.dim(M, D) * ctx.dim(M, C[3]));
                              if (std::abs(g4) < kPruneTol) continue;
                              for (int al3 = 0; al3 < nA; ++al3)
                                for (int h5 = 0; h5 < ctx.vmult(M, C[4], D2, al3, E3); ++h5)
                                  for (int l6 = 0; l6 < ctx.vmult(M, B3, D2, al3, D); ++l6) {
                                    cplx g5 = ctx.fcoef(D1, a3, M, C[4], D2, al3, D, B3,
                                                        K[4], l6, E3, h5, l5);
                                    g5 /= std::sqrt(ctx.dim(M, B3) * ctx.dim(M, E3));
                                    if (std::abs(g5) < kPruneTol) continue;
                                    for (int h6 = 0; h6 < ctx.vmult(M, C[5], D2, al3, E1);
                                         ++h6) {
                                      cplx g6 = ctx.fcoef(D1, a1, M, B3, D2, al3, E1, C[5],
                                                          K[5], h6, D, l6, l1);
                                      g6 /= std::sqrt(ctx.dim(M, C[5]) * ctx.dim(M, D));
                                      if (std::abs(g6) < kPruneTol) continue;
                                      cplx amp = g1 * g2 * g3 * g4 * g5 * g6;
                                      Ring6 st;
                                      st.seg = {static_cast<int16_t>(E1),
                                                static_cast<int16_t>(al1),
                                                static_cast<int16_t>(E2),
                                                static_cast<int16_t>(al2),
                                                static_cast<int16_t>(E3),
                                                static_cast<int16_t>(al3)};
                                      st.mult = {static_cast<int16_t>(h1),
                                                 static_cast<int16_t>(h2),
                                                 static_cast<int16_t>(h3),
                                                 static_cast<int16_t>(h4),
                                                 static_cast<int16_t>(h5),
                                                 static_cast<int16_t>(h6)};
                                      Key kk = st.key();
                                      auto it = acc.find(kk);
                                      if (it == acc.end())
                                        acc.emplace(kk, std::make_pair(st, amp));
                                      else
                                        it->second.second += amp;
                                    }
                                  }
                            }
                      }
                }
          }

  // normalization: segment weights prod sqrt(d_in d_out) over the six ring
  // positions and loop weight 1/d_D (same scheme as the other chains,
  // calibrated by circuit unitarity)
  std::vector<std::pair<Ring6, cplx>> out;
  double din = std::sqrt(ctx.dim(D1, a1) * ctx.dim(M, B1) * ctx.dim(D1, a2) *
                         ctx.dim(M, B2) * ctx.dim(D1, a3) * ctx.dim(M, B3));
  for (auto& [kk, pr] : acc) {
    const auto& o = pr.first.seg;
    double dout = std::sqrt(ctx.dim(M, o[0]) * ctx.dim(D2, o[1]) * ctx.dim(M, o[2]) *
                            ctx.dim(D2, o[3]) * ctx.dim(M, o[4]) * ctx.dim(D2, o[5]));
    cplx v = pr.second * din * dout;
    if (std::abs(v) > kPruneTol) out.push_back({pr.first, v});
  }
  return out;
}

std::vector<std::pair<Ring6, cplx>> chain3_apply(const Chain3Env& env, int G,
                                                 const Ring6& in) {
  RecouplingContext ctx = env.bm->context();
  const SType M = SType::M, D2 = SType::D2;
  const int nA = ctx.num_labels(D2);
  const auto& al = env.legs;
  const auto& E = in.seg;
  const auto& H = in.mult;

  KeyMap<std::pair<Ring6, cplx>> acc;

  for (int b6 = 0; b6 < nA; ++b6)
    for (int n6 = 0; n6 < ctx.vmult(M, E[5], D2, b6, G); ++n6)
      for (int b1 = 0; b1 < nA; ++b1)
        for (int o1 = 0; o1 < ctx.vmult(D2, al[0], D2, b1, b6); ++o1)
          for (int n1 = 0; n1 < ctx.vmult(M, E[0], D2, b1, G); ++n1) {
            cplx t1 = ctx.fcoef(M, E[5], D2, al[0], D2, b1, G, E[0], H[0], n1, b6, o1, n6);
            t1 /= std::sqrt(ctx.dim(M, E[0]) * ctx.dim(D2, b6));
            if (std::abs(t1) < kPruneTol) continue;
            for (int b2 = 0; b2 < nA; ++b2)
              for (int o2 = 0; o2 < ctx.vmult(D2, b1, D2, b2, al[1]); ++o2)
                for (int n2 = 0; n2 < ctx.vmult(M, G, D2, b2, E[1]); ++n2) {
                  cplx t2 = std::conj(
                      ctx.fcoef(M, E[0], D2, b1, D2, b2, E[1], G, n1, n2, al[1], o2, H[1]));
                  t2 /= std::sqrt(ctx.dim(M, G) * ctx.dim(D2, al[1]));
                  if (std::abs(t2) < kPruneTol) continue;
                  for (int b3 = 0; b3 < nA; ++b3)
                    for (int o3 = 0; o3 < ctx.vmult(D2, b2, D2, al[2], b3); ++o3)
                      for (int n3 = 0; n3 < ctx.vmult(M, G, D2, b3, E[2]); ++n3) {
                        cplx t3 = ctx.fcoef(M, G, D2, b2, D2, al[2], E[2], E[1], n2, H[2],
                                            b3, o3, n3);
                        t3 /= std::sqrt(ctx.dim(M, E[1]) * ctx.dim(D2, b3));
                        if (std::abs(t3) < kPruneTol) continue;
                        for (int b4 = 0; b4 < nA; ++b4)
                          for (int o4 = 0; o4 < ctx.vmult(D2, b4, D2, al[3], b3); ++o4)
                            for (int n4 = 0; n4 < ctx.vmult(M, G, D2, b4, E[3]); ++n4) {
                              cplx t4 = std::conj(ctx.fcoef(M, G, D2, b4, D2, al[3], E[2],
                                                            E[3], n4, H[3], b3, o4, n3));
                              t4 /= std::sqrt(ctx.dim(M, E[3]) * ctx.dim(D2, b3));
                              if (std::abs(t4) < kPruneTol) continue;
                              for (int b5 = 0; b5 < nA; ++b5)
                                for (int o5 = 0; o5 < ctx.vmult(D2, b5, D2, b4, al[4]);
                                     ++o5)
                                  for (int n5 = 0; n5 < ctx.vmult(M, E[4], D2, b5, G);
                                       ++n5) {
                                    cplx t5 = ctx.fcoef(M, E[4], D2, b5, D2, b4, E[3], G,
                                                        n5, n4, al[4], o5, H[4]);
                                    t5 /= std::sqrt(ctx.dim(M, G) * ctx.dim(D2, al[4]));
                                    if (std::abs(t5) < kPruneTol) continue;
                                    for (int o6 = 0;
                                         o6 < ctx.vmult(D2, al[5], D2, b5, b6); ++o6) {
                                      cplx t6 = std::conj(
                                          ctx.fcoef(M, E[5], D2, al[5], D2, b5, G, E[4],
                                                    H[5], n5, b6, o6, n6));
                                      t6 /= std::sqrt(ctx.dim(M, E[4]) * ctx.dim(D2, b6));
                                      if (std::abs(t6) < kPruneTol) continue;
                                      cplx amp = t1 * t2 * t3 * t4 * t5 * t6;
                                      Ring6 st;
                                      st.seg = {static_cast<int16_t>(b1),
                                                static_cast<int16_t>(b2),
                                                static_cast<int16_t>(b3),
                                                static_cast<int16_t>(b4),
                                                static_cast<int16_t>(b5),
                                                static_cast<int16_t>(b6)};
                                      st.mult = {static_cast<int16_t>(o1),
                                                 static_cast<int16_t>(o2),
                                                 static_cast<int16_t>(o3),
                                                 static_cast<int16_t>(o4),
                                                 static_cast<int16_t>(o5),
                                                 static_cast<int16_t>(o6)};
                                      Key kk = st.key();
                                      auto it = acc.find(kk);
                                      if (it == acc.end())
                                        acc.emplace(kk, std::make_pair(st, amp));
                                      else
                                        it->second.second += amp;
                                    }
                                  }
                            }
                      }
                }
          }

  // same normalization scheme as chain2
  std::vector<std::pair<Ring6, cplx>> out;
  double din = 1.0;
  for (int s2 = 0; s2 < 6; ++s2) din *= std::sqrt(ctx.dim(M, E[s2]));
  for (auto& [kk, pr] : acc) {
    const auto& b = pr.first.seg;
    double dout = 1.0;
    for (int s2 = 0; s2 < 6; ++s2) dout *= std::sqrt(ctx.dim(D2, b[s2]));
    cplx v = pr.second * din * dout;
    if (std::abs(v) > kPruneTol) out.push_back({pr.first, v});
  }
  return out;
}

int chainT2_vdim(const ChainT2Env& env, const Tube* tube, int p,
                 const std::array<int16_t, 10>& R, int tg1, int tg2) {
  RecouplingContext ctx = env.bm->context();
  const SType D1 = SType::D1, M = SType::M, D2 = SType::D2;
  const auto& a = env.legs;
  const auto& d = env.tails;
  (void)tube;
  switch (p) {
    case 1: return ctx.vmult(D1, a[0], M, R[0], R[9]);
    case 2: return ctx.vmult(D1, a[1], M, R[1], R[0]);
    case 3: return ctx.vmult(D1, a[2], M, R[2], R[1]);
    case 4: return ctx.vmult(D1, d[0], M, R[3], R[2]);
    case 5: return ctx.vmult(D1, d[1], M, R[4], R[3]);
    case 6: return ctx.vmult(D1, a[3], M, R[4], R[5]);
    case 7: return ctx.vmult(D1, a[4], M, R[5], R[6]);
    case 8: return ctx.vmult(D1, a[5], M, R[6], R[7]);
    case 9: return ctx.vmult(M, R[8], D2, tg2, R[7]);
    case 10: return ctx.vmult(M, R[9], D2, tg1, R[8]);
  }
  return 0;
}

std::vector<std::pair<RingState, cplx>> chainT2_apply(const ChainT2Env& env, const Tube& tube,
                                                      const RingState& in) {
  RecouplingContext ctx = env.bm->context();
  const SType D1 = SType::D1, M = SType::M, D2 = SType::D2;
  const int nM = ctx.num_labels(M);
  const auto& a = env.legs;
  const auto& d = env.tails;
  const auto& r = in.seg;
  const auto& i = in.mult;
  const int A = tube.arcA, Q = tube.arcQ, X1 = tube.arcX1, X2 = tube.arcX2;

  if (ctx.vmult(M, r[8], D2, tube.c2, r[7]) <= in.mult[8]) return {};
  if (ctx.vmult(M, r[9], D2, tube.c1, r[8]) <= in.mult[9]) return {};

  auto gnorm = [&](SType te, int e, SType tf, int f) {
    return 1.0 / std::sqrt(ctx.dim(te, e) * ctx.dim(tf, f));
  };

  KeyMap<std::pair<RingState, cplx>> acc;
  std::array<int16_t, 10> R{};
  std::array<int16_t, 10> k{};

  for (int R10 = 0; R10 < nM; ++R10) {
    int dim_j10 = ctx.vmult(M, r[9], D2, A, R10);
    for (int j10 = 0; j10 < dim_j10; ++j10) {
      R[9] = static_cast<int16_t>(R10);
      std::function<void(int, int, cplx)> go = [&](int p, int jprev, cplx amp) {
        if (std::abs(amp) < kPruneTol) return;
        if (p >= 1 && p <= 8) {
          struct Spec {
            int x;      // attached D1 strand
            int qs;     // segment producing the next bond
            int ps;     // segment whose bond is consumed
            bool flip;  // P6..P8 orientation
          };
          Spec sp{};
          switch (p) {
            case 1: sp = {a[0], 0, 9, false}; break;
            case 2: sp = {a[1], 1, 0, false}; break;
            case 3: sp = {a[2], 2, 1, false}; break;
            case 4: sp = {d[0], 3, 2, false}; break;
            case 5: sp = {d[1], 4, 3, false}; break;
            case 6: sp = {a[3], 5, 4, true}; break;
            case 7: sp = {a[4], 6, 5, true}; break;
            case 8: sp = {a[5], 7, 6, true}; break;
          }
          for (int Rq = 0; Rq < nM; ++Rq) {
            int dj = ctx.vmult(M, r[sp.qs], D2, A, Rq);
            int dk = sp.flip ? ctx.vmult(D1, sp.x, M, R[sp.ps], Rq)
                             : ctx.vmult(D1, sp.x, M, Rq, R[sp.ps]);
            for (int jq = 0; jq < dj; ++jq)
              for (int kk = 0; kk < dk; ++kk) {
                cplx c;
                if (!sp.flip) {
                  // F2[x, r_q, A; R'_prev][(r_prev, i, jprev)][(R'_q, jq, kk)]
                  c = ctx.fcoef(D1, sp.x, M, r[sp.qs], D2, A, R[sp.ps], r[sp.ps], i[p - 1],
                                jprev, Rq, jq, kk);
                  c *= gnorm(M, r[sp.ps], M, Rq);
                } else {
                  // conj(F2[x, r_prev, A; R'_q][(r_q, i, jq)][(R'_prev, jprev, kk)])
                  c = std::conj(ctx.fcoef(D1, sp.x, M, r[sp.ps], D2, A, Rq, r[sp.qs],
                                          i[p - 1], jq, R[sp.ps], jprev, kk));
                  c *= gnorm(M, r[sp.qs], M, R[sp.ps]);
                }
                if (std::abs(c) < kPruneTol) continue;
                R[sp.qs] = static_cast<int16_t>(Rq);
                k[p - 1] = static_cast<int16_t>(kk);
                go(p + 1, jq, amp * c);
              }
          }
          return;
        }
        if (p == 9) {
          for (int R9 = 0; R9 < nM; ++R9) {
            int dj = ctx.vmult(M, r[8], D2, Q, R9);
            int dk = ctx.vmult(M, R9, D2, tube.g2, R[7]);
            int dt = ctx.vmult(M, r[8], D2, X2, R[7]);
            for (int j9 = 0; j9 < dj; ++j9)
              for (int k9 = 0; k9 < dk; ++k9) {
                cplx s = 0;
                for (int t9 = 0; t9 < dt; ++t9) {
                  cplx fa = ctx.fcoef(M, r[8], D2, tube.c2, D2, A, R[7], r[7], i[8], jprev,
                                      X2, tube.mc2, t9);
                  fa *= gnorm(M, r[7], D2, X2);
                  cplx fb = std::conj(ctx.fcoef(M, r[8], D2, Q, D2, tube.g2, R[7], R9, j9,
                                                k9, X2, tube.mg2, t9));
                  fb *= gnorm(M, R9, D2, X2);
                  s += fa * fb;
                }
                if (std::abs(s) < kPruneTol) continue;
                R[8] = static_cast<int16_t>(R9);
                k[8] = static_cast<int16_t>(k9);
                go(10, j9, amp * s);
              }
          }
          return;
        }
        int dk = ctx.vmult(M, R[9], D2, tube.g1, R[8]);
        int dt = ctx.vmult(M, r[9], D2, X1, R[8]);
        for (int k10 = 0; k10 < dk; ++k10) {
          cplx s = 0;
          for (int t10 = 0; t10 < dt; ++t10) {
            cplx fa = ctx.fcoef(M, r[9], D2, tube.c1, D2, Q, R[8], r[8], i[9], jprev, X1,
                                tube.mc1, t10);
            fa *= gnorm(M, r[8], D2, X1);
            cplx fb = std::conj(ctx.fcoef(M, r[9], D2, A, D2, tube.g1, R[8], R[9], j10, k10,
                                          X1, tube.mg1, t10));
            fb *= gnorm(M, R[9], D2, X1);
            s += fa * fb;
          }
          if (std::abs(s) < kPruneTol) continue;
          k[9] = static_cast<int16_t>(k10);
          RingState st;
          st.seg = R;
          st.mult = k;
          Key kk = st.key();
          auto it = acc.find(kk);
          if (it == acc.end())
            acc.emplace(kk, std::make_pair(st, amp * s));
          else
            it->second.second += amp * s;
        }
      };
      go(1, j10, cplx(1.0, 0.0));
    }
  }

  std::vector<std::pair<RingState, cplx>> out;
  out.reserve(acc.size());
  for (auto& [kk, pr] : acc) {
    double w = std::sqrt(ctx.dim(D2, A) * ctx.dim(D2, Q) * ctx.dim(D2, X1) *
                         ctx.dim(D2, X2));
    for (int s2 = 0; s2 < 10; ++s2)
      w *= std::sqrt(ctx.dim(M, r[s2]) * ctx.dim(M, pr.first.seg[s2]));
    cplx v = pr.second * w;
    if (std::abs(v) > kPruneTol) out.push_back({pr.first, v});
  }
  return out;
}

}  // namespace snc

namespace snc {

// Extended layer-2 chain. Segment types: r1,r3,r4,r5,r7 are unconverted D1
// (-> module R), r2,r6,r8,r9,r10 are once-converted module (-> D2 output O).
// Bonds: l_s in V^{arc}_{r_s, out_s} (the typed fuse of the segment pair
// with the local loop arc). Factor table derived from the printed layer-2
// display extended by tail and crossing positions (local-tree rule).
std::vector<std::pair<RingState, cplx>> chain2_ext_apply(const Chain2ExtEnv& env,
                                                         const Tube& tube,
                                                         const RingState& in) {
  RecouplingContext ctx = env.bm->context();
  const SType D1 = SType::D1, M = SType::M, D2 = SType::D2;
  const int nM = ctx.num_labels(M), nA2 = ctx.num_labels(D2);
  const auto& C = env.legs;
  const auto& d = env.tails;
  const auto& r = in.seg;
  const auto& i = in.mult;
  const int A = tube.arcA, Q = tube.arcQ, X1 = tube.arcX1, X2 = tube.arcX2;

  // grabbed-tail admissibility: in-vertices at P9/P10 are (c |> r ∋ r')
  if (ctx.vmult(D1, tube.c2, M, r[7], r[8]) <= in.mult[8]) return {};
  if (ctx.vmult(D1, tube.c1, M, r[8], r[9]) <= in.mult[9]) return {};

  auto gn = [&](SType te, int e, SType tf, int f) {
    return 1.0 / std::sqrt(ctx.dim(te, e) * ctx.dim(tf, f));
  };

  KeyMap<std::pair<RingState, cplx>> acc;
  std::array<int16_t, 10> R{};
  std::array<int16_t, 10> k{};

  // sweep order: seed (R1, l1), P2..P10, close at P1
  for (int R1 = 0; R1 < nM; ++R1) {
    int dim_l1 = ctx.vmult(D1, r[0], M, A, R1);
    for (int l1 = 0; l1 < dim_l1; ++l1) {
      R[0] = static_cast<int16_t>(R1);
      std::function<void(int, int, cplx)> go = [&](int p, int lprev, cplx amp) {
        if (std::abs(amp) < kPruneTol) return;
        switch (p) {
          case 2: {  // conj(F2[r1, r2, O2; R1][(C1, i2, k2)][(A, l2, l1)])
            for (int O2 = 0; O2 < nA2; ++O2) {
              int dl = ctx.vmult(M, r[1], D2, O2, A);
              int dk = ctx.vmult(M, C[0], D2, O2, R[0]);
              for (int l2 = 0; l2 < dl; ++l2)
                for (int k2 = 0; k2 < dk; ++k2) {
                  cplx c = std::conj(ctx.fcoef(D1, r[0], M, r[1], D2, O2, R[0], C[0], i[1],
                                               k2, A, l2, lprev));
                  c *= gn(M, C[0], M, A);
                  if (std::abs(c) < kPruneTol) continue;
                  R[1] = static_cast<int16_t>(O2);
                  k[1] = static_cast<int16_t>(k2);
                  go(3, l2, amp * c);
                }
            }
            break;
          }
          case 3: {  // conj(F2[r3, C2, O2; A][(r2, i3, l2)][(R3, k3, l3)])
            for (int R3 = 0; R3 < nM; ++R3) {
              int dl = ctx.vmult(D1, r[2], M, R3, A);
              int dk = ctx.vmult(M, C[1], D2, R[1], R3);
              for (int l3 = 0; l3 < dl; ++l3)
                for (int k3 = 0; k3 < dk; ++k3) {
                  cplx c = std::conj(ctx.fcoef(D1, r[2], M, C[1], D2, R[1], A, r[1], i[2],
                                               lprev, R3, k3, l3));
                  c *= gn(M, r[1], M, R3);
                  if (std::abs(c) < kPruneTol) continue;
                  R[2] = static_cast<int16_t>(R3);
                  k[2] = static_cast<int16_t>(k3);
                  go(4, l3, amp * c);
                }
            }
            break;
          }
          case 4: {  // F1[r3, d1, R4; A][(r4, i4, l4)][(R3, k4, l3)]
            for (int R4 = 0; R4 < nM; ++R4) {
              int dl = ctx.vmult(D1, r[3], M, R4, A);
              int dk = ctx.vmult(D1, d[0], M, R4, R[2]);
              for (int l4 = 0; l4 < dl; ++l4)
                for (int k4 = 0; k4 < dk; ++k4) {
                  cplx c = ctx.fcoef(D1, r[2], D1, d[0], M, R4, A, r[3], i[3], l4, R[2], k4,
                                     lprev);
                  c *= gn(D1, r[3], M, R[2]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[3] = static_cast<int16_t>(R4);
                  k[3] = static_cast<int16_t>(k4);
                  go(5, l4, amp * c);
                }
            }
            break;
          }
          case 5: {  // F1[r4, d2, R5; A][(r5, i5, l5)][(R4, k5, l4)]
            for (int R5 = 0; R5 < nM; ++R5) {
              int dl = ctx.vmult(D1, r[4], M, R5, A);
              int dk = ctx.vmult(D1, d[1], M, R5, R[3]);
              for (int l5 = 0; l5 < dl; ++l5)
                for (int k5 = 0; k5 < dk; ++k5) {
                  cplx c = ctx.fcoef(D1, r[3], D1, d[1], M, R5, A, r[4], i[4], l5, R[3], k5,
                                     lprev);
                  c *= gn(D1, r[4], M, R[3]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[4] = static_cast<int16_t>(R5);
                  k[4] = static_cast<int16_t>(k5);
                  go(6, l5, amp * c);
                }
            }
            break;
          }
          case 6: {  // conj(F2[r5, R5, O6; r6][(A, l5, l6)][(C3, k6, i6)])
            for (int O6 = 0; O6 < nA2; ++O6) {
              int dl = ctx.vmult(M, A, D2, O6, r[5]);
              int dk = ctx.vmult(M, R[4], D2, O6, C[2]);
              for (int l6 = 0; l6 < dl; ++l6)
                for (int k6 = 0; k6 < dk; ++k6) {
                  cplx c = std::conj(ctx.fcoef(D1, r[4], M, R[4], D2, O6, r[5], A, lprev, l6,
                                               C[2], k6, i[5]));
                  c *= gn(M, A, M, C[2]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[5] = static_cast<int16_t>(O6);
                  k[5] = static_cast<int16_t>(k6);
                  go(7, l6, amp * c);
                }
            }
            break;
          }
          case 7: {  // F2[r7, R7, O6; r6][(A, l7, l6)][(C4, k7, i7)]
            for (int R7 = 0; R7 < nM; ++R7) {
              int dl = ctx.vmult(D1, r[6], M, R7, A);
              int dk = ctx.vmult(M, R7, D2, R[5], C[3]);
              for (int l7 = 0; l7 < dl; ++l7)
                for (int k7 = 0; k7 < dk; ++k7) {
                  cplx c = ctx.fcoef(D1, r[6], M, R7, D2, R[5], r[5], A, l7, lprev, C[3], k7,
                                     i[6]);
                  c *= gn(M, A, M, C[3]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[6] = static_cast<int16_t>(R7);
                  k[6] = static_cast<int16_t>(k7);
                  go(8, l7, amp * c);
                }
            }
            break;
          }
          case 8: {  // F2[r7, C5, O8; A][(r8, i8, l8)][(R7, k8, l7)]
            for (int O8 = 0; O8 < nA2; ++O8) {
              int dl = ctx.vmult(M, r[7], D2, O8, A);
              int dk = ctx.vmult(M, C[4], D2, O8, R[6]);
              for (int l8 = 0; l8 < dl; ++l8)
                for (int k8 = 0; k8 < dk; ++k8) {
                  cplx c = ctx.fcoef(D1, r[6], M, C[4], D2, O8, A, r[7], i[7], l8, R[6], k8,
                                     lprev);
                  c *= gn(M, r[7], M, R[6]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[7] = static_cast<int16_t>(O8);
                  k[7] = static_cast<int16_t>(k8);
                  go(9, l8, amp * c);
                }
            }
            break;
          }
          case 9: {  // fA = F2[c2, r8, O8; X2][(r9, i9, w9)][(A, l8, mc2)]
                     // fB = conj(F3[r9, O9, g2; X2][(Q, l9, mg2)][(O8, k9, w9)])
            for (int O9 = 0; O9 < nA2; ++O9) {
              int dl = ctx.vmult(M, r[8], D2, O9, Q);
              int dk = ctx.vmult(D2, O9, D2, tube.g2, R[7]);
              int dw = ctx.vmult(M, r[8], D2, R[7], X2);
              for (int l9 = 0; l9 < dl; ++l9)
                for (int k9 = 0; k9 < dk; ++k9) {
                  cplx ssum = 0;
                  for (int w9 = 0; w9 < dw; ++w9) {
                    cplx fa = ctx.fcoef(D1, tube.c2, M, r[7], D2, R[7], X2, r[8], i[8], w9,
                                        A, lprev, tube.mc2);
                    fa *= gn(M, r[8], M, A);
                    cplx fb = std::conj(ctx.fcoef(M, r[8], D2, O9, D2, tube.g2, X2, Q, l9,
                                                  tube.mg2, R[7], k9, w9));
                    fb *= gn(M, Q, D2, R[7]);
                    ssum += fa * fb;
                  }
                  if (std::abs(ssum) < kPruneTol) continue;
                  R[8] = static_cast<int16_t>(O9);
                  k[8] = static_cast<int16_t>(k9);
                  go(10, l9, amp * ssum);
                }
            }
            break;
          }
          case 10: {  // fA = F2[c1, r9, O9; X1][(r10, i10, w10)][(Q, l9, mc1)]
                      // fB = conj(F3[r10, O10, g1; X1][(A, l10, mg1)][(O9, k10, w10)])
            for (int O10 = 0; O10 < nA2; ++O10) {
              int dl = ctx.vmult(M, r[9], D2, O10, A);
              int dk = ctx.vmult(D2, O10, D2, tube.g1, R[8]);
              int dw = ctx.vmult(M, r[9], D2, R[8], X1);
              for (int l10 = 0; l10 < dl; ++l10)
                for (int k10 = 0; k10 < dk; ++k10) {
                  cplx ssum = 0;
                  for (int w10 = 0; w10 < dw; ++w10) {
                    cplx fa = ctx.fcoef(D1, tube.c1, M, r[8], D2, R[8], X1, r[9], i[9], w10,
                                        Q, lprev, tube.mc1);
                    fa *= gn(M, r[9], M, Q);
                    cplx fb = std::conj(ctx.fcoef(M, r[9], D2, O10, D2, tube.g1, X1, A, l10,
                                                  tube.mg1, R[8], k10, w10));
                    fb *= gn(M, A, D2, R[8]);
                    ssum += fa * fb;
                  }
                  if (std::abs(ssum) < kPruneTol) continue;
                  R[9] = static_cast<int16_t>(O10);
                  k[9] = static_cast<int16_t>(k10);
                  go(1, l10, amp * ssum);
                }
            }
            break;
          }
          case 1: {  // closure: F2[r1, r10, O10; R1][(C6, i1, k1)][(A, l10, l1)]
            int dk = ctx.vmult(M, C[5], D2, R[9], R[0]);
            for (int k1 = 0; k1 < dk; ++k1) {
              cplx c = ctx.fcoef(D1, r[0], M, r[9], D2, R[9], R[0], C[5], i[0], k1, A, lprev,
                                 l1);
              c *= gn(M, C[5], M, A);
              if (std::abs(c) < kPruneTol) continue;
              k[0] = static_cast<int16_t>(k1);
              RingState st;
              st.seg = R;
              st.mult = k;
              Key kk = st.key();
              auto it = acc.find(kk);
              if (it == acc.end())
                acc.emplace(kk, std::make_pair(st, amp * c));
              else
                it->second.second += amp * c;
            }
            break;
          }
        }
      };
      go(2, l1, cplx(1.0, 0.0));
    }
  }

  std::vector<std::pair<RingState, cplx>> out;
  double arcw = std::sqrt(ctx.dim(M, X1) * ctx.dim(M, X2) * ctx.dim(M, A) * ctx.dim(M, Q));
  double din = 1.0;
  const SType tin[10] = {D1, M, D1, D1, D1, M, D1, M, M, M};
  const SType tout[10] = {M, D2, M, M, M, D2, M, D2, D2, D2};
  for (int s2 = 0; s2 < 10; ++s2) din *= std::sqrt(ctx.dim(tin[s2], r[s2]));
  for (auto& [kk, pr] : acc) {
    double dout = 1.0;
    for (int s2 = 0; s2 < 10; ++s2) dout *= std::sqrt(ctx.dim(tout[s2], pr.first.seg[s2]));
    cplx v = pr.second * din * dout * arcw;
    if (std::abs(v) > kPruneTol) out.push_back({pr.first, v});
  }
  return out;
}

// Extended layer-3 chain: all segments module -> D2, D2 legs, own tails must
// be trivial (they were rewritten by layer 1), grabbed tails D1.
std::vector<std::pair<RingState, cplx>> chain3_ext_apply(const Chain3ExtEnv& env,
                                                         const Tube& tube,
                                                         const RingState& in) {
  RecouplingContext ctx = env.bm->context();
  const SType D1 = SType::D1, M = SType::M, D2 = SType::D2;
  const int nA2 = ctx.num_labels(D2);
  const auto& L = env.legs;
  const auto& r = in.seg;
  const auto& i = in.mult;
  const int A = tube.arcA, Q = tube.arcQ, X1 = tube.arcX1, X2 = tube.arcX2;

  if (env.tails[0] != 0 || env.tails[1] != 0)
    throw domain_error("layer-3 chain requires trivial (already rewritten) own tails");
  if (r[2] != r[3] || r[3] != r[4] || in.mult[3] != 0 || in.mult[4] != 0)
    throw domain_error("layer-3 chain requires an unsubdivided own vertical");
  if (ctx.vmult(D1, tube.c2, M, r[7], r[8]) <= in.mult[8]) return {};
  if (ctx.vmult(D1, tube.c1, M, r[8], r[9]) <= in.mult[9]) return {};

  auto gn = [&](SType te, int e, SType tf, int f) {
    return 1.0 / std::sqrt(ctx.dim(te, e) * ctx.dim(tf, f));
  };

  KeyMap<std::pair<RingState, cplx>> acc;
  std::array<int16_t, 10> R{};
  std::array<int16_t, 10> k{};

  // seed (O1 = R[0], n1); sweep P2, P3, [P4 P5 trivial], P6, P7, P8, P9,
  // P10, close at P1
  for (int O1 = 0; O1 < nA2; ++O1) {
    int dim_n1 = ctx.vmult(M, r[0], D2, O1, A);
    for (int n1 = 0; n1 < dim_n1; ++n1) {
      R[0] = static_cast<int16_t>(O1);
      std::function<void(int, int, cplx)> go = [&](int p, int nprev, cplx amp) {
        if (std::abs(amp) < kPruneTol) return;
        switch (p) {
          case 2: {  // conj(F3[r1, O1, O2; r2][(A, n1, n2)][(leg2, k2, i2)])
            for (int O2 = 0; O2 < nA2; ++O2) {
              int dn = ctx.vmult(M, A, D2, O2, r[1]);
              int dk = ctx.vmult(D2, R[0], D2, O2, L[1]);
              for (int n2 = 0; n2 < dn; ++n2)
                for (int k2 = 0; k2 < dk; ++k2) {
                  cplx c = std::conj(ctx.fcoef(M, r[0], D2, R[0], D2, O2, r[1], A, nprev, n2,
                                               L[1], k2, i[1]));
                  c *= gn(M, A, D2, L[1]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[1] = static_cast<int16_t>(O2);
                  k[1] = static_cast<int16_t>(k2);
                  go(3, n2, amp * c);
                }
            }
            break;
          }
          case 3: {  // F3[A, O2, leg3; r3][(r2, n2, i3)][(O3, k3, n3)]
            for (int O3 = 0; O3 < nA2; ++O3) {
              int dn = ctx.vmult(M, A, D2, O3, r[2]);
              int dk = ctx.vmult(D2, R[1], D2, L[2], O3);
              for (int n3 = 0; n3 < dn; ++n3)
                for (int k3 = 0; k3 < dk; ++k3) {
                  cplx c = ctx.fcoef(M, A, D2, R[1], D2, L[2], r[2], r[1], nprev, i[2], O3,
                                     k3, n3);
                  c *= gn(M, r[1], D2, O3);
                  if (std::abs(c) < kPruneTol) continue;
                  R[2] = R[3] = R[4] = static_cast<int16_t>(O3);
                  k[2] = static_cast<int16_t>(k3);
                  k[3] = k[4] = 0;
                  go(6, n3, amp * c);
                }
            }
            break;
          }
          case 6: {  // conj(F3[A, O6, leg4; r5][(r6, n6, i6)][(O5, k6, n5)])
            for (int O6 = 0; O6 < nA2; ++O6) {
              int dn = ctx.vmult(M, A, D2, O6, r[5]);
              int dk = ctx.vmult(D2, O6, D2, L[3], R[4]);
              for (int n6 = 0; n6 < dn; ++n6)
                for (int k6 = 0; k6 < dk; ++k6) {
                  cplx c = std::conj(ctx.fcoef(M, A, D2, O6, D2, L[3], r[4], r[5], n6, i[5],
                                               R[4], k6, nprev));
                  c *= gn(M, r[5], D2, R[4]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[5] = static_cast<int16_t>(O6);
                  k[5] = static_cast<int16_t>(k6);
                  go(7, n6, amp * c);
                }
            }
            break;
          }
          case 7: {  // F3[r7, O7, O6; r6][(A, n7, n6)][(leg5, k7, i7)]
            for (int O7 = 0; O7 < nA2; ++O7) {
              int dn = ctx.vmult(M, r[6], D2, O7, A);
              int dk = ctx.vmult(D2, O7, D2, R[5], L[4]);
              for (int n7 = 0; n7 < dn; ++n7)
                for (int k7 = 0; k7 < dk; ++k7) {
                  cplx c = ctx.fcoef(M, r[6], D2, O7, D2, R[5], r[5], A, n7, nprev, L[4], k7,
                                     i[6]);
                  c *= gn(M, A, D2, L[4]);
                  if (std::abs(c) < kPruneTol) continue;
                  R[6] = static_cast<int16_t>(O7);
                  k[6] = static_cast<int16_t>(k7);
                  go(8, n7, amp * c);
                }
            }
            break;
          }
          case 8: {  // conj(F3[r8, leg6, O7; A][(r7, i8, n7)][(O8, k8, n8)])
            for (int O8 = 0; O8 < nA2; ++O8) {
              int dn = ctx.vmult(M, r[7], D2, O8, A);
              int dk = ctx.vmult(D2, L[5], D2, R[6], O8);
              for (int n8 = 0; n8 < dn; ++n8)
                for (int k8 = 0; k8 < dk; ++k8) {
                  cplx c = std::conj(ctx.fcoef(M, r[7], D2, L[5], D2, R[6], A, r[6], i[7],
                                               nprev, O8, k8, n8));
                  c *= gn(M, r[6], D2, O8);
                  if (std::abs(c) < kPruneTol) continue;
                  R[7] = static_cast<int16_t>(O8);
                  k[7] = static_cast<int16_t>(k8);
                  go(9, n8, amp * c);
                }
            }
            break;
          }
          case 9: {  // crossings, same structure as layer 2
            for (int O9 = 0; O9 < nA2; ++O9) {
              int dn = ctx.vmult(M, r[8], D2, O9, Q);
              int dk = ctx.vmult(D2, O9, D2, tube.g2, R[7]);
              int dw = ctx.vmult(M, r[8], D2, R[7], X2);
              for (int n9 = 0; n9 < dn; ++n9)
                for (int k9 = 0; k9 < dk; ++k9) {
                  cplx ssum = 0;
                  for (int w9 = 0; w9 < dw; ++w9) {
                    cplx fa = ctx.fcoef(D1, tube.c2, M, r[7], D2, R[7], X2, r[8], i[8], w9,
                                        A, nprev, tube.mc2);
                    fa *= gn(M, r[8], M, A);
                    cplx fb = std::conj(ctx.fcoef(M, r[8], D2, O9, D2, tube.g2, X2, Q, n9,
                                                  tube.mg2, R[7], k9, w9));
                    fb *= gn(M, Q, D2, R[7]);
                    ssum += fa * fb;
                  }
                  if (std::abs(ssum) < kPruneTol) continue;
                  R[8] = static_cast<int16_t>(O9);
                  k[8] = static_cast<int16_t>(k9);
                  go(10, n9, amp * ssum);
                }
            }
            break;
          }
          case 10: {
            for (int O10 = 0; O10 < nA2; ++O10) {
              int dn = ctx.vmult(M, r[9], D2, O10, A);
              int dk = ctx.vmult(D2, O10, D2, tube.g1, R[8]);
              int dw = ctx.vmult(M, r[9], D2, R[8], X1);
              for (int n10 = 0; n10 < dn; ++n10)
                for (int k10 = 0; k10 < dk; ++k10) {
                  cplx ssum = 0;
                  for (int w10 = 0; w10 < dw; ++w10) {
                    cplx fa = ctx.fcoef(D1, tube.c1, M, r[8], D2, R[8], X1, r[9], i[9], w10,
                                        Q, nprev, tube.mc1);
                    fa *= gn(M, r[9], M, Q);
                    cplx fb = std::conj(ctx.fcoef(M, r[9], D2, O10, D2, tube.g1, X1, A, n10,
                                                  tube.mg1, R[8], k10, w10));
                    fb *= gn(M, A, D2, R[8]);
                    ssum += fa * fb;
                  }
                  if (std::abs(ssum) < kPruneTol) continue;
                  R[9] = static_cast<int16_t>(O10);
                  k[9] = static_cast<int16_t>(k10);
                  go(1, n10, amp * ssum);
                }
            }
            break;
          }
          case 1: {  // closure: F3[r10, leg1, O1; A][(r1, i1, n1)][(O10, k1, n10)]
            int dk = ctx.vmult(D2, L[0], D2, R[0], R[9]);
            for (int k1 = 0; k1 < dk; ++k1) {
              cplx c = ctx.fcoef(M, r[9], D2, L[0], D2, R[0], A, r[0], i[0], n1, R[9], k1,
                                 nprev);
              c *= gn(M, r[0], D2, R[9]);
              if (std::abs(c) < kPruneTol) continue;
              k[0] = static_cast<int16_t>(k1);
              RingState st;
              st.seg = R;
              st.mult = k;
              Key kk = st.key();
              auto it = acc.find(kk);
              if (it == acc.end())
                acc.emplace(kk, std::make_pair(st, amp * c));
              else
                it->second.second += amp * c;
            }
            break;
          }
        }
      };
      go(2, n1, cplx(1.0, 0.0));
    }
  }

  std::vector<std::pair<RingState, cplx>> out;
  double arcw = std::sqrt(ctx.dim(M, X1) * ctx.dim(M, X2) * ctx.dim(M, A) * ctx.dim(M, Q));
  // the own vertical is unsubdivided here, so it carries one weight, not three
  double din = 1.0;
  for (int s2 = 0; s2 < 10; ++s2)
    if (s2 != 3 && s2 != 4) din *= std::sqrt(ctx.dim(M, r[s2]));
  for (auto& [kk, pr] : acc) {
    double dout = 1.0;
    for (int s2 = 0; s2 < 10; ++s2)
      if (s2 != 3 && s2 != 4) dout *= std::sqrt(ctx.dim(D2, pr.first.seg[s2]));
    cplx v = pr.second * din * dout * arcw;
    if (std::abs(v) > kPruneTol) out.push_back({pr.first, v});
  }
  return out;
}

}  // namespace snc
