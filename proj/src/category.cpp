#include "snc/category.hpp"

#include <cmath>

#include "snc/trees.hpp"

namespace snc {

std::vector<std::pair<int, int>> FusionCat::fuse(int a, int b) const {
  check_ids(a, b);
  std::vector<std::pair<int, int>> out;
  for (int c = 0; c < n; ++c)
    if (N(a, b, c) > 0) out.push_back({c, N(a, b, c)});
  return out;
}

void FusionCat::check_ids(int a, int b) const {
  if (a < 0 || a >= n || b < 0 || b >= n) throw domain_error("invalid object id");
}

void FusionCat::finalize() {
  if (n <= 0) throw domain_error("category has no objects");
  if (static_cast<int>(nmult.size()) != n * n * n) throw domain_error("bad N table size");
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      if (N(0, b, c) != (b == c ? 1 : 0)) throw domain_error("unit constraint N(1,b,c) violated");
      if (N(b, 0, c) != (b == c ? 1 : 0)) throw domain_error("unit constraint N(b,1,c) violated");
    }
  if (dual[0] != 0) throw domain_error("unit must be self-dual");
  for (int a = 0; a < n; ++a) {
    if (dual[dual[a]] != a) throw domain_error("dual is not an involution");
    for (int b = 0; b < n; ++b)
      if (N(a, b, 0) != (b == dual[a] ? 1 : 0))
        throw domain_error("N(a,b,1) must be delta(b, dual a)");
  }
  if (std::abs(qdim[0] - 1.0) > 1e-12) throw domain_error("d[unit] must be 1");
  double s = 0;
  for (int a = 0; a < n; ++a) {
    if (qdim[a] <= 0) throw domain_error("quantum dimensions must be positive");
    if (std::abs(qdim[a] - qdim[dual[a]]) > 1e-12) throw domain_error("d[a] != d[dual a]");
    s += qdim[a] * qdim[a];
  }
  total_dim = std::sqrt(s);
}

Mat FusionCat::f_block(int a, int b, int c, int d, std::vector<std::array<int, 3>>* rows,
                       std::vector<std::array<int, 3>>* cols) const {
  std::vector<std::array<int, 3>> r, co;
  for (int e = 0; e < n; ++e)
    for (int j = 0; j < N(a, b, e); ++j)
      for (int k = 0; k < N(e, c, d); ++k) r.push_back({e, j, k});
  for (int f = 0; f < n; ++f)
    for (int m = 0; m < N(b, c, f); ++m)
      for (int nn = 0; nn < N(a, f, d); ++nn) co.push_back({f, m, nn});
  Mat out = Mat::Zero(r.size(), co.size());
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t q = 0; q < co.size(); ++q)
      out(i, q) = F.get(a, b, c, d, r[i][0], r[i][1], r[i][2], co[q][0], co[q][1], co[q][2]);
  if (rows) *rows = r;
  if (cols) *cols = co;
  return out;
}

double verify_pentagon(const FusionCat& cat) {
  RecouplingContext ctx;
  ctx.c1 = &cat;
  ctx.c2 = &cat;
  return pentagon_residual(ctx, {SType::D1, SType::D1, SType::D1, SType::D1});
}

double verify_unitarity(const FusionCat& cat) {
  double worst = 0;
  for (int a = 0; a < cat.n; ++a)
    for (int b = 0; b < cat.n; ++b)
      for (int c = 0; c < cat.n; ++c)
        for (int d = 0; d < cat.n; ++d) {
          Mat f = cat.f_block(a, b, c, d);
          if (f.rows() == 0 && f.cols() == 0) continue;
          if (f.rows() != f.cols()) return std::numeric_limits<double>::infinity();
          if (f.rows() == 0) continue;
          Mat ida = Mat::Identity(f.cols(), f.cols());
          worst = std::max(worst, (f.adjoint() * f - ida).cwiseAbs().maxCoeff());
          worst = std::max(worst, (f * f.adjoint() - ida).cwiseAbs().maxCoeff());
        }
  return worst;
}

double verify_dim_homomorphism(const FusionCat& cat) {
  double worst = 0;
  for (int a = 0; a < cat.n; ++a)
    for (int b = 0; b < cat.n; ++b) {
      double s = 0;
      for (int c = 0; c < cat.n; ++c) s += cat.N(a, b, c) * cat.qdim[c];
      worst = std::max(worst, std::abs(s - cat.qdim[a] * cat.qdim[b]));
    }
  return worst;
}

double verify_perron_frobenius(const FusionCat& cat) {
  // qdim must satisfy N_a * d = d_a * d for every a (d is the PF vector,
  // normalized by d[0] = 1)
  double worst = 0;
  for (int a = 0; a < cat.n; ++a)
    for (int b = 0; b < cat.n; ++b) {
      double s = 0;
      for (int c = 0; c < cat.n; ++c) s += cat.N(a, b, c) * cat.qdim[c];
      worst = std::max(worst, std::abs(s - cat.qdim[a] * cat.qdim[b]));
    }
  return worst;
}

FusionCat vec_g(const FiniteGroup& g) {
  FusionCat cat;
  cat.n = g.order;
  cat.names.resize(g.order);
  for (int i = 0; i < g.order; ++i) cat.names[i] = "g" + std::to_string(i);
  cat.dual.resize(g.order);
  for (int i = 0; i < g.order; ++i) cat.dual[i] = g.inv(i);
  cat.nmult.assign(cat.n * cat.n * cat.n, 0);
  for (int a = 0; a < cat.n; ++a)
    for (int b = 0; b < cat.n; ++b) cat.N_ref(a, b, g.mul(a, b)) = 1;
  cat.qdim.assign(cat.n, 1.0);
  for (int a = 0; a < cat.n; ++a)
    for (int b = 0; b < cat.n; ++b)
      for (int c = 0; c < cat.n; ++c) {
        int e = g.mul(a, b), f = g.mul(b, c), d = g.mul(e, c);
        cat.F.set(a, b, c, d, e, 0, 0, f, 0, 0, 1.0);
      }
  cat.finalize();
  return cat;
}

FusionCat rep_g(const GroupData& gd) {
  const int ni = gd.num_irreps();
  if (ni == 0) throw domain_error("empty irrep set");
  {
    int sumsq = 0;
    for (const auto& ir : gd.irreps) sumsq += ir.dim * ir.dim;
    if (sumsq != gd.group.order) throw domain_error("incomplete irrep set");
  }
  FusionCat cat;
  cat.n = ni;
  for (const auto& ir : gd.irreps) cat.names.push_back(ir.label);
  cat.dual.resize(ni);
  for (int a = 0; a < ni; ++a) cat.dual[a] = gd.conjugate(a);
  cat.nmult.assign(ni * ni * ni, 0);
  for (int a = 0; a < ni; ++a)
    for (int b = 0; b < ni; ++b)
      for (int c = 0; c < ni; ++c) cat.N_ref(a, b, c) = gd.fusion_mult(a, b, c);
  cat.qdim.resize(ni);
  for (int a = 0; a < ni; ++a) cat.qdim[a] = gd.irreps[a].dim;

  // cache CG slices
  std::vector<std::vector<CGSlice>> cg(ni, std::vector<CGSlice>(ni));
  for (int a = 0; a < ni; ++a)
    for (int b = 0; b < ni; ++b) cg[a][b] = clebsch_gordan(gd, a, b);

  // 6j contraction: F[e,j,k][f,m,n] = tr(R^+ L) / d_d with
  // L = (X^{ab}_{e,j} (x) 1_c) X^{ec}_{d,k},  R = (1_a (x) X^{bc}_{f,m}) X^{af}_{d,n}
  for (int a = 0; a < ni; ++a)
    for (int b = 0; b < ni; ++b)
      for (int c = 0; c < ni; ++c) {
        const int da = gd.irreps[a].dim, db = gd.irreps[b].dim, dc = gd.irreps[c].dim;
        for (int d = 0; d < ni; ++d) {
          const int dd = gd.irreps[d].dim;
          for (int e = 0; e < ni; ++e) {
            if (cat.N(a, b, e) == 0 || cat.N(e, c, d) == 0) continue;
            const int de = gd.irreps[e].dim;
            for (size_t j = 0; j < cg[a][b].iso[e].size(); ++j)
              for (size_t k = 0; k < cg[e][c].iso[d].size(); ++k) {
                const Mat& xab = cg[a][b].iso[e][j];
                const Mat& xec = cg[e][c].iso[d][k];
                Mat L = Mat::Zero(da * db * dc, dd);
                for (int ia = 0; ia < da; ++ia)
                  for (int ib = 0; ib < db; ++ib)
                    for (int ic = 0; ic < dc; ++ic)
                      for (int id = 0; id < dd; ++id) {
                        cplx s = 0;
                        for (int ie = 0; ie < de; ++ie)
                          s += xab(ia * db + ib, ie) * xec(ie * dc + ic, id);
                        L((ia * db + ib) * dc + ic, id) = s;
                      }
                for (int f = 0; f < ni; ++f) {
                  if (cat.N(b, c, f) == 0 || cat.N(a, f, d) == 0) continue;
                  const int df = gd.irreps[f].dim;
                  for (size_t m = 0; m < cg[b][c].iso[f].size(); ++m)
                    for (size_t nn = 0; nn < cg[a][f].iso[d].size(); ++nn) {
                      const Mat& xbc = cg[b][c].iso[f][m];
                      const Mat& xaf = cg[a][f].iso[d][nn];
                      Mat R = Mat::Zero(da * db * dc, dd);
                      for (int ia = 0; ia < da; ++ia)
                        for (int ib = 0; ib < db; ++ib)
                          for (int ic = 0; ic < dc; ++ic)
                            for (int id = 0; id < dd; ++id) {
                              cplx s = 0;
                              for (int idf = 0; idf < df; ++idf)
                                s += xbc(ib * dc + ic, idf) * xaf(ia * df + idf, id);
                              R((ia * db + ib) * dc + ic, id) = s;
                            }
                      cplx v = (R.adjoint() * L).trace() / double(dd);
                      cat.F.set(a, b, c, d, e, static_cast<int>(j), static_cast<int>(k), f,
                                static_cast<int>(m), static_cast<int>(nn), v);
                    }
                }
              }
          }
        }
      }
  cat.finalize();
  return cat;
}

FusionCat trivial_category() {
  FusionCat cat;
  cat.n = 1;
  cat.names = {"1"};
  cat.dual = {0};
  cat.nmult = {1};
  cat.qdim = {1.0};
  cat.F.set(0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1.0);
  cat.finalize();
  return cat;
}

}  // namespace snc
