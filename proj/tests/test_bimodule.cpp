#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "snc/bimodule.hpp"

using namespace snc;

TEST_CASE("toric bimodule: all consistency residuals vanish") {
  auto bm = builtin_bimodule("z2");
  CHECK(bm.act.nm == 1);
  CHECK(bm.act.mdim[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(verify_mixed_pentagons(bm) < 1e-12);
  CHECK(verify_mixed_unitarity(bm) < 1e-12);
  CHECK(verify_invertibility(bm) < 1e-12);
  CHECK(verify_action_dims(bm) < 1e-12);
}

TEST_CASE("Z3 bimodule consistency") {
  auto bm = builtin_bimodule("z3");
  CHECK(verify_mixed_pentagons(bm) < 1e-10);
  CHECK(verify_mixed_unitarity(bm) < 1e-10);
  CHECK(verify_invertibility(bm) < 1e-10);
}

TEST_CASE("S3 bimodule consistency") {
  auto bm = builtin_bimodule("s3");
  CHECK(bm.act.R(0, 2, 0) == 2);  // rho acts with multiplicity 2 on C
  CHECK(verify_mixed_pentagons(bm) < 1e-10);
  CHECK(verify_mixed_unitarity(bm) < 1e-10);
  CHECK(verify_invertibility(bm) < 1e-10);
  CHECK(verify_action_dims(bm) < 1e-10);
  // Frobenius-Perron: d_C^2 = |G|
  CHECK(bm.act.mdim[0] * bm.act.mdim[0] == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("identity bimodule: mixed tensors coincide with F0 and checks vanish") {
  for (auto name : {"z2", "s3"}) {
    auto base = builtin_bimodule(name);
    auto bm = identity_bimodule(base.c1);
    CHECK(verify_mixed_pentagons(bm) < 1e-10);
    CHECK(verify_mixed_unitarity(bm) < 1e-10);
    CHECK(verify_invertibility(bm) < 1e-10);
  }
  auto rep = identity_bimodule(rep_g(GroupData::symmetric3()));
  CHECK(verify_mixed_pentagons(rep) < 1e-10);
  CHECK(verify_invertibility(rep) < 1e-10);
}

TEST_CASE("transposed irrep matrices break the mixed pentagons") {
  auto gd = GroupData::symmetric3();
  auto bm = build_vecG_repG_bimodule(gd);
  // replace the F2 block of rho by its transpose; for a non-abelian group
  // this turns a homomorphism into an anti-homomorphism
  for (int g = 0; g < 6; ++g) {
    const Mat& Dg = gd.irreps[2].matrices[g];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) bm.F2.set(g, 0, 2, 0, 0, 0, i, 0, j, 0, Dg(j, i));
  }
  CHECK(verify_mixed_pentagons(bm) > 1e-2);
}

TEST_CASE("a non-invertible module fails the resolution identity") {
  // Vec_Z2 as a module over itself on the left, with the trivial category
  // acting on the right: the right-hand resolution cannot create lines
  Bimodule bm;
  bm.c1 = vec_g(FiniteGroup::cyclic(2));
  bm.c2 = trivial_category();
  bm.act.nm = 2;
  bm.act.names = {"A0", "A1"};
  bm.act.mdim = {1.0, 1.0};
  bm.act.left.assign(2 * 2 * 2, 0);
  auto g = FiniteGroup::cyclic(2);
  for (int a = 0; a < 2; ++a)
    for (int A = 0; A < 2; ++A) bm.act.left[(a * 2 + A) * 2 + g.mul(a, A)] = 1;
  bm.act.right.assign(2 * 1 * 2, 0);
  for (int A = 0; A < 2; ++A) bm.act.right[(A * 1 + 0) * 2 + A] = 1;
  bm.finalize();
  CHECK(verify_invertibility(bm) >= 0.5);
}

TEST_CASE("missing tensors are a domain error") {
  auto bm = builtin_bimodule("z2");
  bm.F2 = FTensor{};
  CHECK_THROWS_AS(verify_mixed_pentagons(bm), domain_error);
}
