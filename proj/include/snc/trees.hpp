#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "snc/category.hpp"
#include "snc/common.hpp"

namespace snc {

// Strand types for mixed fusion trees. Admissible sequences match the
// pattern D1* M? D2*: a module strand separates the two category regions.
enum class SType : uint8_t { D1 = 0, M = 1, D2 = 2 };

struct ModuleActions {
  int nm = 0;
  std::vector<std::string> names;
  std::vector<int> left;     // left[a*nm*? ] flattened: left[(a*nm + A)*nm + B]
  std::vector<int> right;    // right[(A*n2 + alpha)*nm + B]
  std::vector<double> mdim;  // per module object
  int n1 = 0, n2 = 0;        // label counts of the two categories

  int L(int a, int A, int B) const { return left[(a * nm + A) * nm + B]; }
  int R(int A, int al, int B) const { return right[(A * n2 + al) * nm + B]; }
};

// Everything the recoupling engine needs to evaluate typed trees: the two
// categories, the module action tables and the five associator tensors.
struct RecouplingContext {
  const FusionCat* c1 = nullptr;
  const FusionCat* c2 = nullptr;
  const ModuleActions* act = nullptr;  // null for pure-category contexts
  const FTensor* F1 = nullptr;
  const FTensor* F2 = nullptr;
  const FTensor* F3 = nullptr;

  int num_labels(SType t) const;
  double dim(SType t, int x) const;
  static SType fuse_type(SType tx, SType ty);
  // multiplicity of z in x (type tx) fused with y (type ty)
  int vmult(SType tx, int x, SType ty, int y, int z) const;
  // associator entry for the typed triple (p,q,r) with total root d
  cplx fcoef(SType tp, int p, SType tq, int q, SType tr, int r, int d, int e,
             int j, int k, int f, int m, int n) const;
};

// Binary tree shape over n ordered leaves. Internal nodes are identified by
// their (contiguous) leaf span, which is stable across rotations.
struct Shape {
  int nleaves = 0;
  // children[i] = pair of node ids; node ids: 0..nleaves-1 leaves,
  // nleaves+i for internal node i; root is the node with full span
  std::vector<std::pair<int, int>> children;
  int root = -1;

  static Shape left_comb(int n);
  int num_internal() const { return static_cast<int>(children.size()); }
  // spans (lo, hi) inclusive per node id
  std::vector<std::pair<int, int>> spans() const;
  // the internal nodes ordered by span (lexicographic) - canonical order
  std::vector<int> canonical_internal_order() const;
};

// Basis of labeled trees for fixed shape, leaf types and leaf labels. A
// basis element stores (label, mult) for every internal node in canonical
// span order. Root label is unconstrained (all admissible roots enumerated).
struct TreeSpace {
  const RecouplingContext* ctx = nullptr;
  Shape shape;
  std::vector<SType> types;
  std::vector<int> leaves;

  std::vector<std::vector<int16_t>> basis;  // [labels..., mults...]
  KeyMap<int> index;

  int dim() const { return static_cast<int>(basis.size()); }
  int root_label(int i) const;
  SType root_type() const;
  int find(const std::vector<int16_t>& elt) const;
};

TreeSpace make_tree_space(const RecouplingContext& ctx, const Shape& shape,
                          std::vector<SType> types, std::vector<int> leaves);

// F-move at internal node `node` (id). Forward direction requires the left
// child to be internal: ((P Q) R) -> (P (Q R)). Returns the rotated space
// and the unitary matrix mapping old coordinates to new coordinates.
struct RotationResult {
  TreeSpace space;
  Mat matrix;
};
RotationResult rotate_fwd(const TreeSpace& in, int node);
RotationResult rotate_bwd(const TreeSpace& in, int node);

// Pentagon residual for the typed 4-strand pattern: compares the 2-move and
// 3-move recoupling paths from (((01)2)3) to (0(1(23))) over all admissible
// leaf labelings of the given type pattern.
double pentagon_residual(const RecouplingContext& ctx,
                         const std::array<SType, 4>& pattern);

}  // namespace snc
