#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snc/lattice.hpp"

using namespace snc;

TEST_CASE("torus counting and coloring") {
  HexTorus t(3, 3);
  CHECK(t.cells() == 9);
  CHECK(t.num_vertices() == 18);
  CHECK(t.num_edges() == 27);
  // proper coloring: all six neighbors differ
  for (int I = 0; I < 3; ++I)
    for (int J = 0; J < 3; ++J) {
      int c = t.color(I, J);
      CHECK(c != t.color(I + 1, J));
      CHECK(c != t.color(I, J + 1));
      CHECK(c != t.color(I + 1, J - 1));
    }
  CHECK_THROWS_AS(HexTorus(4, 3), domain_error);
}

TEST_CASE("toric vacuum is invariant under B^0 and flipped by B^1") {
  auto bm = builtin_bimodule("z2");
  HexTorus t(3, 3);
  auto vac = vacuum_state(bm, t);
  auto b0 = plaquette_loop_op(vac, 1, 1, 0);
  CHECK(b0.amp.size() == 1);
  CHECK(std::abs(dot(vac, b0) - cplx(1, 0)) < 1e-12);
  auto b1 = plaquette_loop_op(vac, 1, 1, 1);
  CHECK(b1.amp.size() == 1);
  CHECK(std::abs(dot(vac, b1)) < 1e-12);
  CHECK(std::abs(b1.norm() - 1.0) < 1e-12);
}

TEST_CASE("plaquette projector is idempotent and plaquettes commute (toric)") {
  auto bm = builtin_bimodule("z2");
  HexTorus t(3, 3);
  // a non-trivial test state: superpose vacuum and some loop insertions
  auto vac = vacuum_state(bm, t);
  auto s1 = plaquette_loop_op(vac, 0, 0, 1);
  auto s2 = plaquette_loop_op(vac, 2, 1, 1);
  LatticeState psi = vac;
  s1 *= cplx(0.6, 0.2);
  s2 *= cplx(-0.3, 0.4);
  psi += s1;
  psi += s2;

  auto bp = plaquette_projector(psi, 1, 1);
  auto bpp = plaquette_projector(bp, 1, 1);
  LatticeState diff = bpp;
  diff *= -1.0;
  diff += bp;
  CHECK(diff.norm() < 1e-10);

  auto ab = plaquette_projector(plaquette_projector(psi, 0, 1), 1, 1);
  auto ba = plaquette_projector(plaquette_projector(psi, 1, 1), 0, 1);
  LatticeState d2 = ab;
  d2 *= -1.0;
  d2 += ba;
  CHECK(d2.norm() < 1e-10);

  // adjacent plaquettes
  auto ab2 = plaquette_projector(plaquette_projector(psi, 1, 1), 2, 1);
  auto ba2 = plaquette_projector(plaquette_projector(psi, 2, 1), 1, 1);
  LatticeState d3 = ab2;
  d3 *= -1.0;
  d3 += ba2;
  CHECK(d3.norm() < 1e-10);
}

TEST_CASE("toric ground space on the smallest torus has dimension 4") {
  auto bm = builtin_bimodule("z2");
  HexTorus t(3, 3);
  auto basis = ground_space_basis(bm, t, 0);
  CHECK(basis.size() == 4);
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = 0; j < basis.size(); ++j) {
      cplx ip = dot(basis[i], basis[j]);
      CHECK(std::abs(ip - (i == j ? cplx(1, 0) : cplx(0, 0))) < 1e-10);
    }
  // each basis state is invariant under every plaquette projector
  for (int I = 0; I < 3; ++I) {
    LatticeState p = plaquette_projector(basis[0], I, 0);
    LatticeState d = p;
    d *= -1.0;
    d += basis[0];
    CHECK(d.norm() < 1e-9);
  }
}

TEST_CASE("D2 side (Rep Z2) ground space also has dimension 4") {
  auto bm = builtin_bimodule("z2");
  HexTorus t(3, 3);
  auto basis = ground_space_basis(bm, t, 1);
  CHECK(basis.size() == 4);
}

TEST_CASE("Z3 ground spaces have dimension 9") {
  auto bm = builtin_bimodule("z3");
  HexTorus t(3, 3);
  auto b1 = ground_space_basis(bm, t, 0);
  CHECK(b1.size() == 9);
  auto b2 = ground_space_basis(bm, t, 1);
  CHECK(b2.size() == 9);
}

TEST_CASE("trivial category ground space is one state") {
  auto bm = builtin_bimodule("trivial");
  HexTorus t(3, 3);
  auto basis = ground_space_basis(bm, t, 0);
  CHECK(basis.size() == 1);
}

TEST_CASE("vertex projector acts by tail triviality") {
  auto bm = builtin_bimodule("z2");
  HexTorus t(3, 3);
  auto vac = vacuum_state(bm, t);
  auto p = vertex_projector(vac, 0, 0);
  CHECK(std::abs(p.norm() - 1.0) < 1e-12);
}
