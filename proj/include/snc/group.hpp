#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "snc/common.hpp"

namespace snc {

using Mat = Eigen::MatrixXcd;

struct FiniteGroup {
  int order = 0;
  std::vector<int> table;  // row-major, table[g*order + h] = g*h
  std::vector<int> inverse;
  int identity = 0;

  int mul(int g, int h) const { return table[g * order + h]; }
  int inv(int g) const { return inverse[g]; }

  // Checks associativity, identity and inverses exhaustively; throws
  // domain_error with a diagnostic on the first violation.
  void validate() const;

  static FiniteGroup cyclic(int n);
  static FiniteGroup symmetric3();
};

struct Irrep {
  std::string label;
  int dim = 0;
  std::vector<Mat> matrices;  // one unitary dim x dim matrix per element
};

struct GroupData {
  FiniteGroup group;
  std::vector<Irrep> irreps;

  int num_irreps() const { return static_cast<int>(irreps.size()); }
  // index of the conjugate irrep (matched by characters)
  int conjugate(int a) const;
  // multiplicity of irrep c in a (x) b from character inner products
  int fusion_mult(int a, int b, int c) const;
  cplx character(int a, int g) const { return irreps[a].matrices[g].trace(); }

  // residual checks; all should be <= 1e-10 for shipped data
  double check_homomorphism() const;
  double check_unitarity() const;
  double check_orthogonality() const;
  void validate(double tol = 1e-9) const;

  static GroupData cyclic(int n);
  static GroupData symmetric3();
};

// Clebsch-Gordan data for one (a,b) pair: for each target irrep c a list of
// isometries V_c -> V_a (x) V_b, one per fusion multiplicity slot. Columns
// are orthonormal across all (c, slot, i_c).
struct CGSlice {
  int a = 0, b = 0;
  // iso[c][k] has shape (dim_a*dim_b) x dim_c; row index is i_a*dim_b + i_b
  std::vector<std::vector<Mat>> iso;
};

// Projection-method Clebsch-Gordan coefficients with a deterministic
// column-pivoted orthonormalization.
CGSlice clebsch_gordan(const GroupData& gd, int a, int b);

// Max residual of the intertwining identity over all g and all slots.
double cg_intertwiner_residual(const GroupData& gd, const CGSlice& cg);

}  // namespace snc
