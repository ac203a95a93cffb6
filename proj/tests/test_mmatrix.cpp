#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "snc/patch.hpp"

using namespace snc;

namespace {

Mat dense_op(const PatchSpace& from, const PatchSpace& to, const Tube& t) {
  return Mat(tube_patch_op(from, to, t));
}



}  // namespace

TEST_CASE("toric: B^0 acts as identity on the trivial-tail sector") {
  auto bm = builtin_bimodule("z2");
  auto p0 = make_patch(bm, 0);
  REQUIRE(p0.dim() == 16);
  Mat b0 = dense_op(p0, p0, physical_loop_tube(bm.c1, TubeKind::D1, 0));
  for (int c = 0; c < p0.dim(); ++c) {
    const auto& e = p0.basis[c];
    if (e.t1 == 0 && e.t2 == 0) {
      CHECK(std::abs(b0(c, c) - cplx(1, 0)) < 1e-12);
      CHECK(b0.col(c).cwiseAbs().sum() == doctest::Approx(1.0));
    } else {
      CHECK(b0.col(c).cwiseAbs().sum() == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("toric: B^1 flips the six ring edges with unit coefficient") {
  auto bm = builtin_bimodule("z2");
  auto p0 = make_patch(bm, 0);
  Mat b1 = dense_op(p0, p0, physical_loop_tube(bm.c1, TubeKind::D1, 1));
  for (int c = 0; c < p0.dim(); ++c) {
    const auto& e = p0.basis[c];
    if (!(e.t1 == 0 && e.t2 == 0)) {
      CHECK(b1.col(c).cwiseAbs().sum() == doctest::Approx(0.0));
      continue;
    }
    PatchSpace::Elt oe = e;
    for (int s = 0; s < 10; ++s) oe.ring.seg[s] = static_cast<int16_t>(1 - e.ring.seg[s]);
    int row = p0.find(oe);
    REQUIRE(row >= 0);
    CHECK(std::abs(b1(row, c) - cplx(1, 0)) < 1e-12);
    CHECK(b1.col(c).cwiseAbs().sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("toric: B_p = (B^0 + B^1)/2 is a Hermitian projector on its sector") {
  auto bm = builtin_bimodule("z2");
  auto p0 = make_patch(bm, 0);
  Mat bp = 0.5 * (dense_op(p0, p0, physical_loop_tube(bm.c1, TubeKind::D1, 0)) +
                  dense_op(p0, p0, physical_loop_tube(bm.c1, TubeKind::D1, 1)));
  CHECK((bp - bp.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((bp * bp - bp).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Rep(S3): loop operators satisfy the fusion algebra on the trivial sector") {
  auto bm = identity_bimodule(rep_g(GroupData::symmetric3()));
  auto p0 = make_patch(bm, 0);
  std::array<Mat, 3> B;
  for (int s = 0; s < 3; ++s) B[s] = dense_op(p0, p0, physical_loop_tube(bm.c1, TubeKind::D1, s));

  std::vector<int> idx;
  for (int c = 0; c < p0.dim(); ++c)
    if (p0.basis[c].t1 == 0 && p0.basis[c].t2 == 0) idx.push_back(c);
  auto restrict_m = [&](const Mat& m) {
    Mat r(idx.size(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
      for (size_t j = 0; j < idx.size(); ++j) r(i, j) = m(idx[i], idx[j]);
    return r;
  };
  Mat b0 = restrict_m(B[0]), b1 = restrict_m(B[1]), b2 = restrict_m(B[2]);
  Mat id = Mat::Identity(idx.size(), idx.size());
  CHECK((b0 - id).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b2 * b2 - (b0 + b1 + b2)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((b1 * b1 - b0).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((b1 * b2 - b2).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((b1 - b1.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((b2 - b2.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  Mat bp = (b0 + b1 + 2.0 * b2) / 6.0;
  CHECK((bp * bp - bp).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Vec_S3: loop fusion algebra (non-abelian labels)") {
  auto bm = builtin_bimodule("s3");
  auto p0 = make_patch(bm, 0);
  std::vector<int> idx;
  for (int c = 0; c < p0.dim(); ++c)
    if (p0.basis[c].t1 == 0 && p0.basis[c].t2 == 0) idx.push_back(c);
  auto restrict_m = [&](const Mat& m) {
    Mat r(idx.size(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i)
      for (size_t j = 0; j < idx.size(); ++j) r(i, j) = m(idx[i], idx[j]);
    return r;
  };
  std::array<Mat, 6> B;
  for (int s = 0; s < 6; ++s) B[s] = restrict_m(dense_op(p0, p0, physical_loop_tube(bm.c1, TubeKind::D1, s)));
  auto g = FiniteGroup::symmetric3();
  for (int r = 0; r < 6; ++r)
    for (int s = 0; s < 6; ++s)
      CHECK((B[r] * B[s] - B[g.mul(r, s)]).cwiseAbs().maxCoeff() < 1e-10);
  for (int s = 0; s < 6; ++s)
    CHECK((B[s].adjoint() - B[g.inv(s)]).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("toric M tube maps stage 0 to stage 1 and the patch dims are right") {
  auto bm = builtin_bimodule("z2");
  auto p0 = make_patch(bm, 0);
  auto p1 = make_patch(bm, 1);
  CHECK(p0.dim() == 16);
  CHECK(p1.dim() == 16);
  Tube m = vacuum_tube(TubeKind::M, 0);
  Mat v = dense_op(p0, p1, m);
  CHECK(v.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("S3 patch dimensions match the tube algebra dimensions") {
  auto bm = builtin_bimodule("s3");
  auto p0 = make_patch(bm, 0);
  auto p1 = make_patch(bm, 1);
  CHECK(p0.dim() == 1296);
  CHECK(p1.dim() == 576);
}
