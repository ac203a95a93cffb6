#pragma once

#include "snc/category.hpp"
#include "snc/common.hpp"
#include "snc/group.hpp"
#include "snc/trees.hpp"

namespace snc {

// (D1,D2)-bimodule category data: module objects with left/right action
// multiplicities and the three mixed associator tensors F1, F2, F3.
// F0 and F4 live in c1 and c2.
struct Bimodule {
  FusionCat c1, c2;
  ModuleActions act;
  FTensor F1, F2, F3;
  double tol = kDefaultTol;

  // context with pointers into this object; keep the bimodule alive
  RecouplingContext context() const;

  void finalize();  // sets act.n1/n2, validates unit actions and dims
};

// max residual over the six coherence families (DDDD, DDDM, DDMA, DMAA,
// MAAA, AAAA with A = D2 strand), each the equality of the two recoupling
// paths of a 4-strand tree.
double verify_mixed_pentagons(const Bimodule& bm);

// unitarity of every fixed-outer-label block of F1, F2, F3
double verify_mixed_unitarity(const Bimodule& bm);

// invertibility residual: the traced resolution identities
//   sum_e N^B_{eA} d_e = d_A d_B   and   sum_al N^B_{A al} d_al = d_A d_B
// for all module pairs (A,B); returns the max deviation normalized by d_A d_B
double verify_invertibility(const Bimodule& bm);

// left/right action dimension compatibility: d_a d_A = sum_B N^B_{aA} d_B
double verify_action_dims(const Bimodule& bm);

// The invertible (Vec_G, Rep(G)) bimodule with M = Vec: a single module
// object of dimension sqrt|G|, F1 = trivial 2-cocycle, F2 = irrep matrices,
// F3 = Clebsch-Gordan coefficients.
Bimodule build_vecG_repG_bimodule(const GroupData& gd);

// cat as a bimodule over itself: F1 = F2 = F3 = F0
Bimodule identity_bimodule(const FusionCat& cat);

// Built-in bimodules used throughout tests and the CLI
Bimodule builtin_bimodule(const std::string& name);  // "z2", "z3", "s3", "trivial"

}  // namespace snc
