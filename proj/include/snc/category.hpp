#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "snc/common.hpp"
#include "snc/group.hpp"

namespace snc {

// Sparse associator tensor. Entries are keyed by the full 10-index label
// (a,b,c,d, e,j,k, f,m,n); absent keys are zero. The same container holds
// all five associator flavours (F0..F4) since they share the index shape.
struct FTensor {
  KeyMap<cplx> entries;

  cplx get(int a, int b, int c, int d, int e, int j, int k, int f, int m, int n) const {
    auto it = entries.find(make_key({a, b, c, d, e, j, k, f, m, n}));
    return it == entries.end() ? cplx(0, 0) : it->second;
  }
  void set(int a, int b, int c, int d, int e, int j, int k, int f, int m, int n, cplx v) {
    if (std::abs(v) < kPruneTol) return;
    entries[make_key({a, b, c, d, e, j, k, f, m, n})] = v;
  }
  size_t size() const { return entries.size(); }
};

struct FusionCat {
  std::vector<std::string> names;
  int n = 0;                     // number of simple objects; object 0 is the unit
  std::vector<int> dual;         // involution a -> abar
  std::vector<int> nmult;        // flattened N[a][b][c], size n^3
  std::vector<double> qdim;      // quantum dimensions
  double total_dim = 0;          // D with D^2 = sum d^2
  FTensor F;
  double tol = kDefaultTol;

  int N(int a, int b, int c) const { return nmult[(a * n + b) * n + c]; }
  int& N_ref(int a, int b, int c) { return nmult[(a * n + b) * n + c]; }

  // all c with N^c_{ab} > 0, with multiplicities
  std::vector<std::pair<int, int>> fuse(int a, int b) const;

  void check_ids(int a, int b) const;
  void finalize();  // computes total_dim, checks basic unit/dual invariants

  // Dense F block for fixed outer labels (a,b,c,d): rows (e,j,k), cols (f,m,n).
  // Also returns the row/col index enumerations.
  Mat f_block(int a, int b, int c, int d, std::vector<std::array<int, 3>>* rows = nullptr,
              std::vector<std::array<int, 3>>* cols = nullptr) const;
};

// max pentagon residual by exhaustive summation (uses the recoupling engine)
double verify_pentagon(const FusionCat& cat);

// max over (a,b,c,d) of ||F^+F - 1||_max on each block
double verify_unitarity(const FusionCat& cat);

// d_a d_b = sum_c N^c_ab d_c residual
double verify_dim_homomorphism(const FusionCat& cat);

// Perron-Frobenius residual: qdim must be the PF eigenvector of each fusion
// matrix N_a with eigenvalue qdim[a]
double verify_perron_frobenius(const FusionCat& cat);

// Vec_G with the trivial-cocycle gauge (all admissible F entries 1)
FusionCat vec_g(const FiniteGroup& g);

// Rep(G) with 6j symbols contracted from Clebsch-Gordan isometries
FusionCat rep_g(const GroupData& gd);

// Trivial category with a single object
FusionCat trivial_category();

}  // namespace snc
