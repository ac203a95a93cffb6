#pragma once

#include <optional>

#include "snc/patch.hpp"

namespace snc {

struct TubeBasis {
  TubeKind kind;
  std::vector<Tube> tubes;
  KeyMap<int> index;
  int dim() const { return static_cast<int>(tubes.size()); }
  int find(const Tube& t) const;
};

TubeBasis enumerate_tubes(const Bimodule& bm, TubeKind kind);

// Element of the big C*-algebra: one coefficient vector per kind. Products
// of mismatched kinds are zero.
struct AlgElt {
  std::array<Eigen::VectorXcd, 4> c;  // indexed by TubeKind
  double norm() const;
};

// The big tube algebra: bases of the four kinds, their patch operators, all
// pairwise structure constants f and the dagger tables u; products and
// daggers of elements; associativity and C* checks.
class TubeAlgebra {
 public:
  explicit TubeAlgebra(const Bimodule& bm);

  const Bimodule& bimodule() const { return *bm_; }
  const TubeBasis& basis(TubeKind k) const { return basis_[static_cast<int>(k)]; }

  AlgElt zero() const;
  AlgElt unit_tube(TubeKind k, int i) const;  // basis element as an AlgElt
  AlgElt multiply(const AlgElt& x, const AlgElt& y) const;
  AlgElt dagger(const AlgElt& x) const;
  // product of two basis tubes as a coefficient vector over the result kind
  // (zero vector when the kinds do not compose)
  std::vector<std::pair<Tube, cplx>> multiply_tubes(const Tube& a, const Tube& b) const;
  std::vector<std::pair<Tube, cplx>> dagger_tube(const Tube& a) const;

  // identity element of the big algebra (unit of T^D1 plus unit of T^D2)
  AlgElt unit() const;

  double check_associativity(Rng& rng, int trials = 20) const;
  double check_dagger_antihomomorphism(Rng& rng, int trials = 20) const;
  // worst least-squares residual met while expanding operator products in
  // the tube bases; nonzero values signal a representation inconsistency
  double expansion_residual() const { return expansion_residual_; }

  const PatchSpace& patch0() const { return p0_; }
  const PatchSpace& patch1() const { return p1_; }
  SpMat op(TubeKind k, int i) const;
  SpMat op(const AlgElt& x, TubeKind k) const;  // operator of the kind-k part

 private:
  const Bimodule* bm_;
  PatchSpace p0_, p1_;
  std::array<TubeBasis, 4> basis_;
  std::array<std::vector<SpMat>, 4> ops_;
  // f[a][b]: for composable kind pair (a,b): map (i,j) -> coefficients
  std::array<std::array<KeyMap<std::vector<std::pair<int, cplx>>>, 4>, 4> f_;
  std::array<std::vector<std::vector<std::pair<int, cplx>>>, 4> u_;
  double expansion_residual_ = 0;

  static std::optional<TubeKind> compose_kind(TubeKind a, TubeKind b);
  void build_products(TubeKind ka, TubeKind kb);
  void build_daggers(TubeKind k);
  std::vector<std::pair<int, cplx>> expand(const SpMat& x, TubeKind k, int cpair1,
                                           int cpair2, int gpair1, int gpair2);
};

// -------------------------------------------------------------------------
// Artin-Wedderburn decomposition of the big algebra

struct Sector {
  int n_d1 = 0, n_d2 = 0;
  std::vector<std::vector<AlgElt>> p_d1;  // n_d1 x n_d1 matrix units
  std::vector<std::vector<AlgElt>> p_d2;  // n_d2 x n_d2
  std::vector<std::vector<AlgElt>> p_m;   // n_d2 x n_d1 simple bimodules
  std::vector<std::vector<AlgElt>> p_mbar;
  AlgElt central_d1, central_d2;  // P_a on each side
};

struct IdempotentTable {
  std::vector<Sector> sectors;
  uint64_t seed = 0;
  double residual = 0;  // max relation-table residual at build time
};

IdempotentTable decompose(const TubeAlgebra& alg, uint64_t seed);

// exhaustive check of the eight relation families; returns max residual
double verify_relation_table(const TubeAlgebra& alg, const IdempotentTable& table);

}  // namespace snc
