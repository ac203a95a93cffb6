#include "snc/patch.hpp"

#include <algorithm>
#include <functional>

namespace snc {

Key PatchSpace::elt_key(const Elt& e) {
  std::vector<int16_t> v{e.d1, e.d2, e.t1, e.t2};
  v.insert(v.end(), e.ring.seg.begin(), e.ring.seg.end());
  v.insert(v.end(), e.ring.mult.begin(), e.ring.mult.end());
  return Key(std::move(v));
}

int PatchSpace::find(const Elt& e) const {
  auto it = index.find(elt_key(e));
  return it == index.end() ? -1 : it->second;
}

PatchSpace make_patch(const Bimodule& bm, int stage, std::array<int, 6> legs) {
  PatchSpace ps;
  ps.bm = &bm;
  ps.stage = stage;
  ps.legs = legs;
  RecouplingContext ctx = bm.context();

  const int nd = bm.c1.n;
  const int nt = (stage == 0) ? bm.c1.n : bm.c2.n;
  const int nring = (stage == 0) ? bm.c1.n : bm.act.nm;

  Chain1Env env0;
  env0.bm = &bm;
  env0.flavor = ChainFlavor::PureD1;
  env0.legs = legs;

  ChainT2Env env1;
  env1.bm = &bm;
  env1.legs = legs;

  for (int d1 = 0; d1 < nd; ++d1)
    for (int d2 = 0; d2 < nd; ++d2)
      for (int t1 = 0; t1 < nt; ++t1)
        for (int t2 = 0; t2 < nt; ++t2) {
          env0.tails = {d1, d2};
          env1.tails = {d1, d2};
          // enumerate ring segments + mults recursively, pruning each vertex
          // constraint as soon as its labels are fixed
          std::array<int16_t, 10> seg{};
          std::array<int16_t, 10> mult{};
          auto vdim = [&](int p) {
            if (stage == 0) {
              if (p == 9) return chain1_in_vdim_cross(env0, 9, seg, t2);
              if (p == 10) return chain1_in_vdim_cross(env0, 10, seg, t1);
              return chain1_in_vdim(env0, p, seg);
            }
            return chainT2_vdim(env1, nullptr, p, seg, t1, t2);
          };
          // position whose labels become complete once segment s is set
          // (0-based s): s=1 -> P2, s=2 -> P3, s=3 -> P4, s=4 -> P5,
          // s=5 -> P6, s=6 -> P7, s=7 -> P8, s=8 -> P9, s=9 -> P10 and P1
          std::function<void(int)> rec = [&](int s) {
            if (s == 10) {
              std::function<void(int)> mrec = [&](int p) {
                if (p == 11) {
                  PatchSpace::Elt e;
                  e.d1 = static_cast<int16_t>(d1);
                  e.d2 = static_cast<int16_t>(d2);
                  e.t1 = static_cast<int16_t>(t1);
                  e.t2 = static_cast<int16_t>(t2);
                  e.ring.seg = seg;
                  e.ring.mult = mult;
                  ps.index[PatchSpace::elt_key(e)] = ps.dim();
                  ps.basis.push_back(e);
                  return;
                }
                int dim = vdim(p);
                for (int m = 0; m < dim; ++m) {
                  mult[p - 1] = static_cast<int16_t>(m);
                  mrec(p + 1);
                }
              };
              mrec(1);
              return;
            }
            for (int x = 0; x < nring; ++x) {
              seg[s] = static_cast<int16_t>(x);
              if (s >= 1 && vdim(s + 1) == 0) continue;
              if (s == 9 && vdim(1) == 0) continue;
              rec(s + 1);
            }
          };
          rec(0);
        }
  return ps;
}

Tube physical_loop_tube(const FusionCat& cat, TubeKind kind, int s) {
  return vacuum_tube(kind, cat.dual[s]);
}

double conjugate_tube_prefactor(const Bimodule& bm, const Tube& m_tube) {
  RecouplingContext ctx = bm.context();
  double dc = ctx.dim(SType::D1, m_tube.c1) * ctx.dim(SType::D1, m_tube.c2);
  double dg = ctx.dim(SType::D2, m_tube.g1) * ctx.dim(SType::D2, m_tube.g2);
  return std::sqrt(dc / dg);
}

SpMat tube_patch_op(const PatchSpace& from, const PatchSpace& to, const Tube& t) {
  std::vector<Eigen::Triplet<cplx>> trip;
  const Bimodule& bm = *from.bm;

  if (t.kind == TubeKind::Mbar) {
    // ConjugateTube: (T^M)^dagger = sqrt(d_c1 d_c2 / (d_g1 d_g2)) T^Mbar,
    // so Pi(T^Mbar) = pref^{-1} Pi(T^M)^dagger
    Tube m = t;
    m.kind = TubeKind::M;
    std::swap(m.c1, m.g1);
    std::swap(m.c2, m.g2);
    SpMat fwd = tube_patch_op(to, from, m);
    double pref = conjugate_tube_prefactor(bm, m);
    SpMat out = SpMat(fwd.adjoint());
    return out * cplx(1.0 / pref, 0.0);
  }

  for (int col = 0; col < from.dim(); ++col) {
    const auto& e = from.basis[col];
    // the tube grabs the neighbor tails: labels must match its lower legs
    if (e.t1 != t.c1 || e.t2 != t.c2) continue;

    std::vector<std::pair<RingState, cplx>> res;
    if (t.kind == TubeKind::D1) {
      if (from.stage != 0 || to.stage != 0) throw domain_error("D1 tube acts on stage 0");
      Chain1Env env;
      env.bm = &bm;
      env.flavor = ChainFlavor::PureD1;
      env.legs = from.legs;
      env.tails = {e.d1, e.d2};
      res = chain1_apply(env, t, e.ring);
    } else if (t.kind == TubeKind::M) {
      if (from.stage != 0 || to.stage != 1) throw domain_error("M tube maps stage 0 to 1");
      Chain1Env env;
      env.bm = &bm;
      env.flavor = ChainFlavor::Module;
      env.legs = from.legs;
      env.tails = {e.d1, e.d2};
      res = chain1_apply(env, t, e.ring);
    } else {  // D2
      if (from.stage != 1 || to.stage != 1) throw domain_error("D2 tube acts on stage 1");
      ChainT2Env env;
      env.bm = &bm;
      env.legs = from.legs;
      env.tails = {e.d1, e.d2};
      res = chainT2_apply(env, t, e.ring);
    }
    for (auto& [ring, coef] : res) {
      PatchSpace::Elt oe;
      oe.d1 = e.d1;
      oe.d2 = e.d2;
      oe.t1 = static_cast<int16_t>(t.g1);
      oe.t2 = static_cast<int16_t>(t.g2);
      oe.ring = ring;
      int row = to.find(oe);
      if (row < 0) throw domain_error("tube op produced a state outside the patch space");
      trip.emplace_back(row, col, coef);
    }
  }
  SpMat out(to.dim(), from.dim());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace snc
