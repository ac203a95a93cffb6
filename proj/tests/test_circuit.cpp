#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snc/circuit.hpp"

using namespace snc;

TEST_CASE("plan covers every plaquette once with non-adjacent same-color sets") {
  HexTorus t(3, 3);
  auto plan = make_plan(t);
  int total = 0;
  for (auto& l : plan.layers) total += static_cast<int>(l.size());
  CHECK(total == 9);
  for (auto& l : plan.layers) {
    CHECK(l.size() == 3);
    for (auto [I, J] : l)
      for (auto [I2, J2] : l) {
        if (I == I2 && J == J2) continue;
        // no two same-layer plaquettes adjacent
        bool adj = (t.cell(I + 1, J) == t.cell(I2, J2)) ||
                   (t.cell(I - 1, J) == t.cell(I2, J2)) ||
                   (t.cell(I, J + 1) == t.cell(I2, J2)) ||
                   (t.cell(I, J - 1) == t.cell(I2, J2)) ||
                   (t.cell(I + 1, J - 1) == t.cell(I2, J2)) ||
                   (t.cell(I - 1, J + 1) == t.cell(I2, J2));
        CHECK(!adj);
      }
  }
}

TEST_CASE("trivial bimodule: V acts as the identity on the ground state") {
  auto bm = builtin_bimodule("trivial");
  HexTorus t(3, 3);
  TubeAlgebra alg(bm);
  auto table = decompose(alg, 3);
  auto vac = vacuum_state(bm, t, 0, true, ancilla_dim(table));
  auto out = apply_V(vac, alg, table);
  CHECK(std::abs(dot(vac, out) - cplx(1, 0)) < 1e-9);
}

TEST_CASE("toric: V maps ground states into the D2 ground space unitarily") {
  auto bm = builtin_bimodule("z2");
  HexTorus t(3, 3);
  TubeAlgebra alg(bm);
  auto table = decompose(alg, 101);
  auto rep = map_ground_space(bm, t, alg, table);
  REQUIRE(rep.gs_residuals.size() == 4);
  for (double r : rep.gs_residuals) CHECK(r < 1e-9);
  CHECK(rep.overlap.rows() == 4);
  CHECK(rep.overlap_unitarity < 1e-8);
}

namespace {

// an excited toric eigenstate: one e-type tail pair on the right vertical of
// cell (1,0) (grabbed by the layer-3 plaquette (2,0)), flux-projected
LatticeState excited_toric_state(const Bimodule& bm, const HexTorus& t,
                                 const TubeAlgebra& alg, const IdempotentTable& table) {
  std::vector<CellConf> cells(t.cells());
  int h0 = t.cell(1, 0);
  cells[h0].tail_up = 1;
  cells[h0].tail_dn = 1;
  cells[h0].rv_mid = 1;
  LatticeState st;
  st.bm = &bm;
  st.torus = t;
  st.amp[pack_config(t, cells, {})] = 1.0;
  for (int J = 0; J < t.l2; ++J)
    for (int I = 0; I < t.l1; ++I) st = plaquette_projector_general(st, I, J, alg, table);
  st *= cplx(1.0 / st.norm(), 0);
  return st;
}

LatticeState with_ancillas(const LatticeState& b, int ad) {
  LatticeState st = b;
  st.ancilla = true;
  st.anc_dim = ad;
  KeyMap<cplx> namp;
  std::vector<CellConf> cells;
  std::vector<int16_t> dummy;
  std::vector<int16_t> anc0(b.torus.cells(), 0);
  for (auto& [k, v] : b.amp) {
    unpack_config(b.torus, k, cells, dummy, false);
    namp[pack_config(b.torus, cells, anc0)] = v;
  }
  st.amp = std::move(namp);
  return st;
}

}  // namespace

TEST_CASE("toric excited state: V is isometric and the round trip returns to ancilla 0") {
  auto bm = builtin_bimodule("z2");
  HexTorus t(3, 3);
  TubeAlgebra alg(bm);
  auto table = decompose(alg, 909);
  auto psi = excited_toric_state(bm, t, alg, table);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-10);

  auto st = with_ancillas(psi, ancilla_dim(table));
  auto v = apply_V(st, alg, table);
  CHECK(std::abs(v.norm() - 1.0) < 1e-9);

  RoundTripReport rep;
  auto rt = round_trip(st, alg, table, &rep);
  // toric: all m_a = 2 = n_a, no truncation; result in the ancilla-0
  // subspace with norm 1
  for (int m : rep.m_a) CHECK(m == 2);
  CHECK(std::abs(rt.norm() - 1.0) < 1e-9);
  std::vector<CellConf> cells;
  std::vector<int16_t> anc;
  double outside = 0;
  for (auto& [k, val] : rt.amp) {
    unpack_config(t, k, cells, anc, true);
    for (auto a : anc)
      if (a) outside += std::norm(val);
  }
  CHECK(outside < 1e-18);
}

TEST_CASE("toric excited state maps consistently with the direct bimodule action") {
  auto bm = builtin_bimodule("z2");
  HexTorus t(3, 3);
  TubeAlgebra alg(bm);
  auto table = decompose(alg, 909);
  auto psi = excited_toric_state(bm, t, alg, table);
  auto st = with_ancillas(psi, ancilla_dim(table));
  auto v = apply_V(st, alg, table);

  // identify the excited sector: probe the mapped state at the grabbing
  // plaquette (2,0) with D2-side simple idempotents p^{b,D2}_{ii}: the paper
  // says only i = 0 responds
  LatticeState s2 = v;  // keep ancillas; the probes act on the lattice part
  s2.layers = 3;
  const int kD2 = static_cast<int>(TubeKind::D2);
  int responders_i0 = 0, responders_i1 = 0;
  for (size_t b = 0; b < table.sectors.size(); ++b)
    for (int i = 0; i < table.sectors[b].n_d2; ++i) {
      const auto& coeffs = table.sectors[b].p_d2[i][i].c[kD2];
      LatticeState probe = s2;
      probe.amp.clear();
      for (int q = 0; q < coeffs.size(); ++q) {
        if (std::abs(coeffs[q]) < 1e-13) continue;
        auto term = apply_stage_tube(s2, 2, 0, alg.basis(TubeKind::D2).tubes[q]);
        term *= coeffs[q];
        probe += term;
      }
      probe.prune();
      if (probe.norm() > 1e-8) (i == 0 ? responders_i0 : responders_i1)++;
    }
  CHECK(responders_i0 >= 1);
  CHECK(responders_i1 == 0);
}

TEST_CASE("Z3: V maps the 9-dim ground space unitarily") {
  auto bm = builtin_bimodule("z3");
  HexTorus t(3, 3);
  TubeAlgebra alg(bm);
  auto table = decompose(alg, 55);
  auto rep = map_ground_space(bm, t, alg, table);
  REQUIRE(rep.gs_residuals.size() == 9);
  for (double r : rep.gs_residuals) CHECK(r < 1e-9);
  CHECK(rep.overlap_unitarity < 1e-8);
}
