#include "snc/bimodule.hpp"

#include <cmath>

namespace snc {

RecouplingContext Bimodule::context() const {
  RecouplingContext ctx;
  ctx.c1 = &c1;
  ctx.c2 = &c2;
  ctx.act = &act;
  ctx.F1 = &F1;
  ctx.F2 = &F2;
  ctx.F3 = &F3;
  return ctx;
}

void Bimodule::finalize() {
  act.n1 = c1.n;
  act.n2 = c2.n;
  if (act.nm <= 0) throw domain_error("bimodule has no module objects");
  if (static_cast<int>(act.mdim.size()) != act.nm) throw domain_error("bad module dims");
  for (int A = 0; A < act.nm; ++A) {
    for (int B = 0; B < act.nm; ++B) {
      if (act.L(0, A, B) != (A == B ? 1 : 0))
        throw domain_error("unit must act trivially on the left");
      if (act.R(A, 0, B) != (A == B ? 1 : 0))
        throw domain_error("unit must act trivially on the right");
    }
    if (act.mdim[A] <= 0) throw domain_error("module dims must be positive");
  }
}

double verify_mixed_pentagons(const Bimodule& bm) {
  if (bm.F1.size() == 0 || bm.F2.size() == 0 || bm.F3.size() == 0)
    throw domain_error("mixed pentagon check requires all five tensors");
  RecouplingContext ctx = bm.context();
  const SType D = SType::D1, M = SType::M, A = SType::D2;
  double worst = 0;
  for (auto pat : {std::array<SType, 4>{D, D, D, D}, {D, D, D, M}, {D, D, M, A},
                   {D, M, A, A}, {M, A, A, A}, {A, A, A, A}})
    worst = std::max(worst, pentagon_residual(ctx, pat));
  return worst;
}

namespace {

// dense block of a mixed associator for fixed outer labels and typed triple
Mat mixed_block(const RecouplingContext& ctx, SType tp, int p, SType tq, int q, SType tr,
                int r, int d) {
  SType tpq = RecouplingContext::fuse_type(tp, tq);
  SType tqr = RecouplingContext::fuse_type(tq, tr);
  std::vector<std::array<int, 3>> rows, cols;
  for (int e = 0; e < ctx.num_labels(tpq); ++e)
    for (int j = 0; j < ctx.vmult(tp, p, tq, q, e); ++j)
      for (int k = 0; k < ctx.vmult(tpq, e, tr, r, d); ++k) rows.push_back({e, j, k});
  for (int f = 0; f < ctx.num_labels(tqr); ++f)
    for (int m = 0; m < ctx.vmult(tq, q, tr, r, f); ++m)
      for (int n = 0; n < ctx.vmult(tp, p, tqr, f, d); ++n) cols.push_back({f, m, n});
  Mat out = Mat::Zero(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t c = 0; c < cols.size(); ++c)
      out(i, c) = ctx.fcoef(tp, p, tq, q, tr, r, d, rows[i][0], rows[i][1], rows[i][2],
                            cols[c][0], cols[c][1], cols[c][2]);
  return out;
}

}  // namespace

double verify_mixed_unitarity(const Bimodule& bm) {
  RecouplingContext ctx = bm.context();
  double worst = 0;
  auto check = [&](SType tp, SType tq, SType tr) {
    SType td = RecouplingContext::fuse_type(RecouplingContext::fuse_type(tp, tq), tr);
    for (int p = 0; p < ctx.num_labels(tp); ++p)
      for (int q = 0; q < ctx.num_labels(tq); ++q)
        for (int r = 0; r < ctx.num_labels(tr); ++r)
          for (int d = 0; d < ctx.num_labels(td); ++d) {
            Mat f = mixed_block(ctx, tp, p, tq, q, tr, r, d);
            if (f.rows() == 0 && f.cols() == 0) continue;
            if (f.rows() != f.cols()) continue;  // flagged by pentagon checks
            Mat id = Mat::Identity(f.cols(), f.cols());
            worst = std::max(worst, (f.adjoint() * f - id).cwiseAbs().maxCoeff());
            worst = std::max(worst, (f * f.adjoint() - id).cwiseAbs().maxCoeff());
          }
  };
  check(SType::D1, SType::D1, SType::M);
  check(SType::D1, SType::M, SType::D2);
  check(SType::M, SType::D2, SType::D2);
  return worst;
}

double verify_invertibility(const Bimodule& bm) {
  double worst = 0;
  for (int A = 0; A < bm.act.nm; ++A)
    for (int B = 0; B < bm.act.nm; ++B) {
      double dd = bm.act.mdim[A] * bm.act.mdim[B];
      double sl = 0, sr = 0;
      for (int e = 0; e < bm.c1.n; ++e) sl += bm.act.L(e, A, B) * bm.c1.qdim[e];
      for (int al = 0; al < bm.c2.n; ++al) sr += bm.act.R(A, al, B) * bm.c2.qdim[al];
      worst = std::max(worst, std::abs(sl / dd - 1.0));
      worst = std::max(worst, std::abs(sr / dd - 1.0));
    }
  return worst;
}

double verify_action_dims(const Bimodule& bm) {
  double worst = 0;
  for (int A = 0; A < bm.act.nm; ++A) {
    for (int a = 0; a < bm.c1.n; ++a) {
      double s = 0;
      for (int B = 0; B < bm.act.nm; ++B) s += bm.act.L(a, A, B) * bm.act.mdim[B];
      worst = std::max(worst, std::abs(s - bm.c1.qdim[a] * bm.act.mdim[A]));
    }
    for (int al = 0; al < bm.c2.n; ++al) {
      double s = 0;
      for (int B = 0; B < bm.act.nm; ++B) s += bm.act.R(A, al, B) * bm.act.mdim[B];
      worst = std::max(worst, std::abs(s - bm.c2.qdim[al] * bm.act.mdim[A]));
    }
  }
  return worst;
}

Bimodule build_vecG_repG_bimodule(const GroupData& gd) {
  gd.validate();
  Bimodule bm;
  bm.c1 = vec_g(gd.group);
  bm.c2 = rep_g(gd);

  const int ng = gd.group.order;
  const int ni = gd.num_irreps();
  bm.act.nm = 1;
  bm.act.names = {"C"};
  bm.act.mdim = {std::sqrt(double(ng))};
  bm.act.left.assign(ng, 1);  // N^C_{g C} = 1
  bm.act.right.assign(ni, 0);
  for (int al = 0; al < ni; ++al) bm.act.right[al] = gd.irreps[al].dim;  // N^C_{C al} = d_al

  // F1: psi(g1,g2) = 1 (trivial 2-cocycle class)
  for (int g1 = 0; g1 < ng; ++g1)
    for (int g2 = 0; g2 < ng; ++g2)
      bm.F1.set(g1, g2, 0, 0, gd.group.mul(g1, g2), 0, 0, 0, 0, 0, 1.0);

  // F2: the irrep matrix of g sits in the (k,m) multiplicity slots. With
  // our F-move orientation the coupled pentagons select the transposed
  // matrix, (F2^{g C al}_C)^{C, j 0}_{C, 0 i} = D^al(g)^i_j; the opposite
  // orientation convention would carry D^al(g)^j_i instead.
  for (int g = 0; g < ng; ++g)
    for (int al = 0; al < ni; ++al) {
      const Mat& Dg = gd.irreps[al].matrices[g];
      for (int i = 0; i < gd.irreps[al].dim; ++i)
        for (int j = 0; j < gd.irreps[al].dim; ++j)
          bm.F2.set(g, 0, al, 0, 0, 0, i, 0, j, 0, Dg(i, j));
    }

  // F3: (F3^{C a1 a2}_C)^{a3, k i3}_{C, i1 i2} = Clebsch-Gordan coefficient
  for (int a1 = 0; a1 < ni; ++a1)
    for (int a2 = 0; a2 < ni; ++a2) {
      auto cg = clebsch_gordan(gd, a1, a2);
      const int d2 = gd.irreps[a2].dim;
      for (int a3 = 0; a3 < ni; ++a3)
        for (size_t k = 0; k < cg.iso[a3].size(); ++k) {
          const Mat& x = cg.iso[a3][k];
          for (int i1 = 0; i1 < gd.irreps[a1].dim; ++i1)
            for (int i2 = 0; i2 < d2; ++i2)
              for (int i3 = 0; i3 < gd.irreps[a3].dim; ++i3)
                bm.F3.set(0, a1, a2, 0, 0, i1, i2, a3, static_cast<int>(k), i3,
                          x(i1 * d2 + i2, i3));
        }
    }

  bm.finalize();
  return bm;
}

Bimodule identity_bimodule(const FusionCat& cat) {
  Bimodule bm;
  bm.c1 = cat;
  bm.c2 = cat;
  bm.act.nm = cat.n;
  bm.act.names = cat.names;
  bm.act.mdim = cat.qdim;
  bm.act.left = cat.nmult;
  bm.act.right = cat.nmult;
  bm.F1 = cat.F;
  bm.F2 = cat.F;
  bm.F3 = cat.F;
  bm.finalize();
  return bm;
}

Bimodule builtin_bimodule(const std::string& name) {
  if (name == "z2") return build_vecG_repG_bimodule(GroupData::cyclic(2));
  if (name == "z3") return build_vecG_repG_bimodule(GroupData::cyclic(3));
  if (name == "s3") return build_vecG_repG_bimodule(GroupData::symmetric3());
  if (name == "trivial") return identity_bimodule(trivial_category());
  throw domain_error("unknown built-in bimodule: " + name);
}

}  // namespace snc
