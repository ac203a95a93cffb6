#include "snc/lattice.hpp"

#include <algorithm>

#include "snc/parallel.hpp"

namespace snc {

HexTorus::HexTorus(int a, int b) : l1(a), l2(b) {
  if (l1 % 3 || l2 % 3 || l1 <= 0 || l2 <= 0)
    throw domain_error("torus periods must be positive multiples of 3 for a proper "
                       "plaquette 3-coloring");
}

double LatticeState::norm() const {
  double s = 0;
  for (auto& [k, v] : amp) s += std::norm(v);
  return std::sqrt(s);
}

void LatticeState::prune(double tol) {
  for (auto it = amp.begin(); it != amp.end();)
    it = (std::abs(it->second) < tol) ? amp.erase(it) : std::next(it);
}

LatticeState& LatticeState::operator*=(cplx s) {
  for (auto& [k, v] : amp) v *= s;
  return *this;
}

LatticeState& LatticeState::operator+=(const LatticeState& o) {
  for (auto& [k, v] : o.amp) amp[k] += v;
  return *this;
}

cplx dot(const LatticeState& a, const LatticeState& b) {
  cplx s = 0;
  const auto& small = a.amp.size() < b.amp.size() ? a.amp : b.amp;
  const auto& big = a.amp.size() < b.amp.size() ? b.amp : a.amp;
  bool small_is_a = a.amp.size() < b.amp.size();
  for (auto& [k, v] : small) {
    auto it = big.find(k);
    if (it == big.end()) continue;
    s += small_is_a ? std::conj(v) * it->second : std::conj(it->second) * v;
  }
  return s;
}

Key pack_config(const HexTorus& t, const std::vector<CellConf>& cells,
                const std::vector<int16_t>& anc) {
  std::vector<int16_t> v;
  v.reserve(kCellSlots * t.cells() + anc.size());
  for (const auto& c : cells) {
    v.push_back(c.nw);
    v.push_back(c.ne);
    v.push_back(c.rv_top);
    v.push_back(c.rv_mid);
    v.push_back(c.rv_bot);
    v.push_back(c.tail_up);
    v.push_back(c.tail_dn);
    v.push_back(c.mu_n);
    v.push_back(c.mu_s);
    v.push_back(c.mu_t1);
    v.push_back(c.mu_t2);
    v.push_back(0);  // reserved
  }
  v.insert(v.end(), anc.begin(), anc.end());
  return Key(std::move(v));
}

void unpack_config(const HexTorus& t, const Key& k, std::vector<CellConf>& cells,
                   std::vector<int16_t>& anc, bool ancilla) {
  cells.assign(t.cells(), CellConf{});
  for (int h = 0; h < t.cells(); ++h) {
    const int16_t* p = k.v.data() + kCellSlots * h;
    cells[h] = CellConf{p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8], p[9], p[10]};
  }
  anc.clear();
  if (ancilla)
    anc.assign(k.v.begin() + kCellSlots * t.cells(), k.v.end());
}

LatticeState vacuum_state(const Bimodule& bm, const HexTorus& t, int layers, bool ancilla,
                          int anc_dim) {
  LatticeState st;
  st.bm = &bm;
  st.torus = t;
  st.layers = layers;
  st.ancilla = ancilla;
  st.anc_dim = anc_dim;
  std::vector<CellConf> cells(t.cells());
  std::vector<int16_t> anc(ancilla ? t.cells() : 0, 0);
  st.amp[pack_config(t, cells, anc)] = 1.0;
  return st;
}

LatticeState vertex_projector(const LatticeState& in, int cell, int which) {
  LatticeState out = in;
  out.amp.clear();
  std::vector<CellConf> cells;
  std::vector<int16_t> anc;
  for (auto& [k, v] : in.amp) {
    unpack_config(in.torus, k, cells, anc, in.ancilla);
    int16_t tail = which == 0 ? cells[cell].tail_up : cells[cell].tail_dn;
    if (tail == 0) out.amp[k] = v;
  }
  return out;
}

namespace {

struct PlaqIdx {
  int p, se, sw, lv, nwn, nen, sen, swn, lvc, a2c, a5c;  // cell ids
};

PlaqIdx plaq_cells(const HexTorus& t, int I, int J) {
  PlaqIdx x;
  x.p = t.cell(I, J);
  x.se = t.cell(I + 1, J - 1);  // SE slant owner (its nw), SE vertex owner (mu_n)
  x.sw = t.cell(I, J - 1);      // SW slant owner (its ne), SW vertex (mu_n), a5/a6
  x.lv = t.cell(I - 1, J);      // left-vertical trio owner + grabbed tails
  x.nwn = t.cell(I - 1, J + 1); // NW vertex owner (mu_s), a2 leg (its rv_bot)
  x.nen = t.cell(I, J + 1);     // NE vertex owner (mu_s)
  x.sen = t.cell(I + 1, J);     // a3 leg (its nw)
  x.swn = x.sw;
  x.lvc = t.cell(I - 1, J);
  x.a2c = x.nwn;
  x.a5c = x.sw;
  return x;
}

// gather the ten ring segments, mults, legs and tails of plaquette (I,J)
struct Gathered {
  RingState ring;
  std::array<int, 6> legs;
  std::array<int, 2> tails;   // own tails d1, d2
  std::array<int, 2> grabbed; // neighbor tails on the left edge
};

Gathered gather10(const HexTorus& t, const std::vector<CellConf>& c, int I, int J) {
  PlaqIdx x = plaq_cells(t, I, J);
  Gathered g;
  g.ring.seg = {c[x.p].nw,      c[x.p].ne,      c[x.p].rv_top, c[x.p].rv_mid,
                c[x.p].rv_bot,  c[x.se].nw,     c[x.sw].ne,    c[x.lv].rv_bot,
                c[x.lv].rv_mid, c[x.lv].rv_top};
  g.ring.mult = {c[x.nwn].mu_s, c[x.p].mu_n,  c[x.nen].mu_s, c[x.p].mu_t1,
                 c[x.p].mu_t2,  c[x.se].mu_n, c[x.p].mu_s,   c[x.sw].mu_n,
                 c[x.lv].mu_t2, c[x.lv].mu_t1};
  g.legs = {c[t.cell(I - 1, J)].ne, c[x.a2c].rv_bot, c[x.sen].nw,
            c[x.se].ne,             c[x.a5c].rv_top, c[x.sw].nw};
  g.tails = {c[x.p].tail_up, c[x.p].tail_dn};
  g.grabbed = {c[x.lv].tail_up, c[x.lv].tail_dn};
  return g;
}

void scatter10(const HexTorus& t, std::vector<CellConf>& c, int I, int J,
               const RingState& ring, int new_t1, int new_t2) {
  PlaqIdx x = plaq_cells(t, I, J);
  c[x.p].nw = ring.seg[0];
  c[x.p].ne = ring.seg[1];
  c[x.p].rv_top = ring.seg[2];
  c[x.p].rv_mid = ring.seg[3];
  c[x.p].rv_bot = ring.seg[4];
  c[x.se].nw = ring.seg[5];
  c[x.sw].ne = ring.seg[6];
  c[x.lv].rv_bot = ring.seg[7];
  c[x.lv].rv_mid = ring.seg[8];
  c[x.lv].rv_top = ring.seg[9];
  c[x.nwn].mu_s = ring.mult[0];
  c[x.p].mu_n = ring.mult[1];
  c[x.nen].mu_s = ring.mult[2];
  c[x.p].mu_t1 = ring.mult[3];
  c[x.p].mu_t2 = ring.mult[4];
  c[x.se].mu_n = ring.mult[5];
  c[x.p].mu_s = ring.mult[6];
  c[x.sw].mu_n = ring.mult[7];
  c[x.lv].mu_t2 = ring.mult[8];
  c[x.lv].mu_t1 = ring.mult[9];
  c[x.lv].tail_up = static_cast<int16_t>(new_t1);
  c[x.lv].tail_dn = static_cast<int16_t>(new_t2);
}

}  // namespace

LatticeState plaquette_loop_op(const LatticeState& in, int I, int J, int loop_label) {
  if (in.layers != 0 && in.layers != 3)
    throw domain_error("plaquette loop operators act on the pure models");
  const FusionCat& cat = in.layers == 0 ? in.bm->c1 : in.bm->c2;
  Tube tube = physical_loop_tube(cat, in.layers == 0 ? TubeKind::D1 : TubeKind::D2, loop_label);

  Chain1Env env;
  env.bm = in.bm;
  env.flavor = in.layers == 0 ? ChainFlavor::PureD1 : ChainFlavor::PureD2;

  LatticeState out = in;
  out.amp.clear();
  std::vector<CellConf> cells;
  std::vector<int16_t> anc;
  for (auto& [k, v] : in.amp) {
    unpack_config(in.torus, k, cells, anc, in.ancilla);
    Gathered g = gather10(in.torus, cells, I, J);
    if (g.grabbed[0] != 0 || g.grabbed[1] != 0)
      throw domain_error("plaquette loop operator requires trivial grabbed tails");
    env.legs = g.legs;
    env.tails = g.tails;
    auto res = chain1_apply(env, tube, g.ring);
    for (auto& [ring, coef] : res) {
      std::vector<CellConf> nc = cells;
      scatter10(in.torus, nc, I, J, ring, 0, 0);
      out.amp[pack_config(in.torus, nc, anc)] += v * coef;
    }
  }
  out.prune();
  return out;
}

LatticeState plaquette_projector(const LatticeState& in, int I, int J) {
  const FusionCat& cat = in.layers == 0 ? in.bm->c1 : in.bm->c2;
  LatticeState out = in;
  out.amp.clear();
  double d2 = cat.total_dim * cat.total_dim;
  for (int s = 0; s < cat.n; ++s) {
    LatticeState term = plaquette_loop_op(in, I, J, s);
    term *= cplx(cat.qdim[s] / d2, 0);
    out += term;
  }
  out.prune();
  return out;
}

namespace {

// eigenvalue of the vacuum-legged loop tube on the p^{a}_{00} block
cplx loop_eigenvalue(const TubeAlgebra& alg, const IdempotentTable& table, TubeKind kind,
                     int sector, const Tube& loop) {
  const auto& sec = table.sectors[sector];
  const AlgElt& p00 = (kind == TubeKind::D1) ? sec.p_d1[0][0] : sec.p_d2[0][0];
  AlgElt t = alg.unit_tube(kind, alg.basis(kind).find(loop));
  AlgElt u = alg.multiply(p00, alg.multiply(t, p00));
  // u = lambda p00; extract via the coefficient of the largest p00 entry
  const auto& vp = p00.c[static_cast<int>(kind)];
  const auto& vu = u.c[static_cast<int>(kind)];
  int best = 0;
  for (int q = 1; q < vp.size(); ++q)
    if (std::abs(vp[q]) > std::abs(vp[best])) best = q;
  return vu[best] / vp[best];
}

}  // namespace

LatticeState plaquette_projector_general(const LatticeState& in, int I, int J,
                                         const TubeAlgebra& alg,
                                         const IdempotentTable& table) {
  if (in.layers != 0 && in.layers != 3)
    throw domain_error("plaquette projectors act on the pure models");
  const FusionCat& cat = in.layers == 0 ? in.bm->c1 : in.bm->c2;
  TubeKind kind = in.layers == 0 ? TubeKind::D1 : TubeKind::D2;
  double d2 = cat.total_dim * cat.total_dim;

  LatticeState out = in;
  out.amp.clear();
  for (size_t a = 0; a < table.sectors.size(); ++a) {
    cplx beta = 0;
    for (int s = 0; s < cat.n; ++s) {
      Tube loop = physical_loop_tube(cat, kind, s);
      beta += cat.qdim[s] / d2 * loop_eigenvalue(alg, table, kind, static_cast<int>(a), loop);
    }
    if (std::abs(beta) < 1e-12) continue;
    if (std::abs(beta - 1.0) > 1e-9)
      throw domain_error("flux projector eigenvalue is neither 0 nor 1");
    const AlgElt& Pa = (kind == TubeKind::D1) ? table.sectors[a].central_d1
                                              : table.sectors[a].central_d2;
    const auto& v = Pa.c[static_cast<int>(kind)];
    for (int q = 0; q < v.size(); ++q) {
      if (std::abs(v[q]) < kPruneTol) continue;
      LatticeState term = apply_stage_tube(in, I, J, alg.basis(kind).tubes[q]);
      term *= v[q];
      out += term;
    }
  }
  out.prune();
  return out;
}

LatticeState project_ground(const LatticeState& in) {
  LatticeState cur = in;
  for (int J = 0; J < in.torus.l2; ++J)
    for (int I = 0; I < in.torus.l1; ++I) {
      cur = plaquette_projector(cur, I, J);
      cur.prune();
    }
  return cur;
}

std::vector<LatticeState> ground_space_basis(const Bimodule& bm, const HexTorus& t,
                                             int side) {
  const FusionCat& cat = side == 0 ? bm.c1 : bm.c2;
  // Wilson seeds assume invertible simple objects (abelian input); S3-scale
  // lattices are out of desk range anyway.
  for (int a = 0; a < cat.n; ++a)
    for (int b = 0; b < cat.n; ++b) {
      int prod = -1, cnt = 0;
      for (int q = 0; q < cat.n; ++q)
        if (cat.N(a, b, q)) {
          prod = q;
          ++cnt;
        }
      (void)prod;
      if (cnt != 1) throw domain_error("ground_space_basis requires an abelian category");
    }
  auto mul = [&](int a, int b) {
    for (int q = 0; q < cat.n; ++q)
      if (cat.N(a, b, q)) return q;
    return 0;
  };

  std::vector<LatticeState> seeds;
  for (int wh = 0; wh < cat.n; ++wh)
    for (int wv = 0; wv < cat.n; ++wv) {
      std::vector<CellConf> cells(t.cells());
      // horizontal Wilson string along J = 0: ne(I,0) = dual(wh), nw(I+1,0) = wh
      for (int I = 0; I < t.l1; ++I) {
        cells[t.cell(I, 0)].ne = static_cast<int16_t>(cat.dual[wh]);
        cells[t.cell(I + 1, 0)].nw = static_cast<int16_t>(wh);
      }
      // vertical Wilson string along I = 0: rv trio of (0,J) = wv,
      // nw(1,J) = fuse with existing
      for (int Jq = 0; Jq < t.l2; ++Jq) {
        auto& rv = cells[t.cell(0, Jq)];
        rv.rv_top = rv.rv_mid = rv.rv_bot = static_cast<int16_t>(wv);
        auto& n = cells[t.cell(1, Jq)];
        n.nw = static_cast<int16_t>(mul(n.nw, wv));
      }
      LatticeState st;
      st.bm = &bm;
      st.torus = t;
      st.layers = side == 0 ? 0 : 3;
      st.amp[pack_config(t, cells, {})] = 1.0;
      seeds.push_back(std::move(st));
    }

  // project and orthonormalize
  std::vector<LatticeState> basis;
  for (auto& seed : seeds) {
    LatticeState v = project_ground(seed);
    for (const auto& b : basis) {
      cplx ip = dot(b, v);
      LatticeState tmp = b;
      tmp *= -ip;
      v += tmp;
    }
    v.prune(1e-10);
    double n = v.norm();
    if (n > 1e-6) {
      v *= cplx(1.0 / n, 0);
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

LatticeState apply_stage_tube(const LatticeState& in, int I, int J, const Tube& tube) {
  if (!((tube.kind == TubeKind::D1 && in.layers == 0) ||
        (tube.kind == TubeKind::D2 && in.layers == 3)))
    throw domain_error("apply_stage_tube: tube kind does not match the lattice stage");
  Chain1Env env;
  env.bm = in.bm;
  env.flavor = tube.kind == TubeKind::D1 ? ChainFlavor::PureD1 : ChainFlavor::PureD2;
  LatticeState out = in;
  out.amp.clear();
  std::vector<CellConf> cells;
  std::vector<int16_t> anc;
  for (auto& [k, v] : in.amp) {
    unpack_config(in.torus, k, cells, anc, in.ancilla);
    Gathered g = gather10(in.torus, cells, I, J);
    if (g.grabbed[0] != tube.c1 || g.grabbed[1] != tube.c2) continue;
    env.legs = g.legs;
    env.tails = g.tails;
    auto res = chain1_apply(env, tube, g.ring);
    for (auto& [ring, coef] : res) {
      std::vector<CellConf> nc = cells;
      scatter10(in.torus, nc, I, J, ring, tube.g1, tube.g2);
      out.amp[pack_config(in.torus, nc, anc)] += v * coef;
    }
  }
  out.prune();
  return out;
}

LatticeState apply_layer_tube(const LatticeState& in, int I, int J, const Tube& tube) {
  int layer = in.torus.color(I, J) + 1;
  LatticeState out = in;
  out.amp.clear();
  out.layers = in.layers;  // caller advances the layer counter once per sweep

  std::vector<CellConf> cells;
  std::vector<int16_t> anc;

  if (layer == 1) {
    Chain1Env env;
    env.bm = in.bm;
    env.flavor = ChainFlavor::Module;
    for (auto& [k, v] : in.amp) {
      unpack_config(in.torus, k, cells, anc, in.ancilla);
      Gathered g = gather10(in.torus, cells, I, J);
      if (g.grabbed[0] != tube.c1 || g.grabbed[1] != tube.c2) continue;
      env.legs = g.legs;
      env.tails = g.tails;
      auto res = chain1_apply(env, tube, g.ring);
      for (auto& [ring, coef] : res) {
        std::vector<CellConf> nc = cells;
        scatter10(in.torus, nc, I, J, ring, tube.g1, tube.g2);
        out.amp[pack_config(in.torus, nc, anc)] += v * coef;
      }
    }
  } else if (layer == 2) {
    Chain2ExtEnv env;
    env.bm = in.bm;
    for (auto& [k, v] : in.amp) {
      unpack_config(in.torus, k, cells, anc, in.ancilla);
      Gathered g = gather10(in.torus, cells, I, J);
      if (g.grabbed[0] != tube.c1 || g.grabbed[1] != tube.c2) continue;
      env.tails = g.tails;
      env.legs = {g.legs[1], g.legs[2], g.legs[3], g.legs[4], g.legs[5], g.legs[0]};
      auto res = chain2_ext_apply(env, tube, g.ring);
      for (auto& [ring, coef] : res) {
        std::vector<CellConf> nc = cells;
        scatter10(in.torus, nc, I, J, ring, tube.g1, tube.g2);
        out.amp[pack_config(in.torus, nc, anc)] += v * coef;
      }
    }
  } else {
    Chain3ExtEnv env;
    env.bm = in.bm;
    for (auto& [k, v] : in.amp) {
      unpack_config(in.torus, k, cells, anc, in.ancilla);
      Gathered g = gather10(in.torus, cells, I, J);
      if (g.grabbed[0] != tube.c1 || g.grabbed[1] != tube.c2) continue;
      env.tails = g.tails;
      env.legs = g.legs;
      auto res = chain3_ext_apply(env, tube, g.ring);
      for (auto& [ring, coef] : res) {
        std::vector<CellConf> nc = cells;
        scatter10(in.torus, nc, I, J, ring, tube.g1, tube.g2);
        out.amp[pack_config(in.torus, nc, anc)] += v * coef;
      }
    }
  }
  out.prune();
  return out;
}

}  // namespace snc
