#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snc/group.hpp"

using namespace snc;

TEST_CASE("cyclic groups validate") {
  for (int n : {1, 2, 3, 4, 6}) {
    auto gd = GroupData::cyclic(n);
    gd.validate();
    CHECK(gd.group.order == n);
  }
}

TEST_CASE("S3 validates and has the expected structure") {
  auto gd = GroupData::symmetric3();
  gd.validate();
  CHECK(gd.group.order == 6);
  CHECK(gd.irreps[0].dim == 1);
  CHECK(gd.irreps[1].dim == 1);
  CHECK(gd.irreps[2].dim == 2);
  CHECK(gd.check_homomorphism() < 1e-12);
  CHECK(gd.check_unitarity() < 1e-12);
  CHECK(gd.check_orthogonality() < 1e-10);
}

TEST_CASE("S3 fusion from characters matches the character table") {
  auto gd = GroupData::symmetric3();
  // rho (x) rho = triv + sgn + rho
  CHECK(gd.fusion_mult(2, 2, 0) == 1);
  CHECK(gd.fusion_mult(2, 2, 1) == 1);
  CHECK(gd.fusion_mult(2, 2, 2) == 1);
  CHECK(gd.fusion_mult(1, 1, 0) == 1);
  CHECK(gd.fusion_mult(1, 2, 2) == 1);
  CHECK(gd.fusion_mult(1, 2, 0) == 0);
}

TEST_CASE("Z2 CG: 1 x 1 -> 0 is the scalar 1") {
  auto gd = GroupData::cyclic(2);
  auto cg = clebsch_gordan(gd, 1, 1);
  REQUIRE(cg.iso[0].size() == 1);
  CHECK(std::abs(cg.iso[0][0](0, 0) - cplx(1, 0)) < 1e-12);
  CHECK(cg.iso[1].empty());
}

TEST_CASE("CG with the trivial irrep is the identity") {
  auto gd = GroupData::symmetric3();
  auto cg = clebsch_gordan(gd, 0, 2);
  REQUIRE(cg.iso[2].size() == 1);
  CHECK((cg.iso[2][0] - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("S3 rho x rho CG is an isometry family with small intertwiner residual") {
  auto gd = GroupData::symmetric3();
  auto cg = clebsch_gordan(gd, 2, 2);
  REQUIRE(cg.iso[0].size() == 1);
  REQUIRE(cg.iso[1].size() == 1);
  REQUIRE(cg.iso[2].size() == 1);
  // |C|^2 sums to 1 for the trivial component (columns orthonormal)
  cplx norm2 = (cg.iso[0][0].adjoint() * cg.iso[0][0]).trace();
  CHECK(std::abs(norm2 - cplx(1, 0)) < 1e-10);
  CHECK(cg_intertwiner_residual(gd, cg) < 1e-10);
  // completeness: stacking all isometries gives a unitary on V_rho (x) V_rho
  Mat u(4, 4);
  int col = 0;
  for (int c = 0; c < 3; ++c)
    for (const auto& x : cg.iso[c])
      for (int i = 0; i < gd.irreps[c].dim; ++i) u.col(col++) = x.col(i);
  REQUIRE(col == 4);
  CHECK((u.adjoint() * u - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("all S3 CG slices intertwine") {
  auto gd = GroupData::symmetric3();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      auto cg = clebsch_gordan(gd, a, b);
      CHECK(cg_intertwiner_residual(gd, cg) < 1e-10);
    }
}

TEST_CASE("broken group table is rejected") {
  auto g = FiniteGroup::cyclic(3);
  g.table[4] = 0;  // break associativity/latin-square structure
  CHECK_THROWS_AS(g.validate(), domain_error);
}
