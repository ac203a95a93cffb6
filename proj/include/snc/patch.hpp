#pragma once

#include <Eigen/SparseCore>

#include "snc/mmatrix.hpp"

namespace snc {

using SpMat = Eigen::SparseMatrix<cplx>;

// Single-plaquette patch: one hexagon with its ten boundary segments, two
// own tails (on the right vertical edge) and the two neighbor tails hanging
// on the left vertical edge that tube insertions grab. Legs are fixed (the
// operator acts diagonally on them); own tails and neighbor tails are free
// state labels. Stage 0 = everything in D1; stage 1 = ring converted to
// module labels and neighbor tails to D2 (the image of an M tube).
struct PatchSpace {
  const Bimodule* bm = nullptr;
  int stage = 0;
  std::array<int, 6> legs{};

  struct Elt {
    int16_t d1 = 0, d2 = 0;  // own tails (D1 at both stages)
    int16_t t1 = 0, t2 = 0;  // neighbor tails (D1 at stage 0, D2 at stage 1)
    RingState ring;
  };
  std::vector<Elt> basis;
  KeyMap<int> index;

  int dim() const { return static_cast<int>(basis.size()); }
  int find(const Elt& e) const;
  static Key elt_key(const Elt& e);
};

PatchSpace make_patch(const Bimodule& bm, int stage, std::array<int, 6> legs = {});

// Patch operator of a tube: D1 tubes act on stage-0 patches, M tubes map
// stage 0 to stage 1, D2 tubes act on stage-1 patches. Mbar tubes are
// realized as scaled adjoints of their M partners (ConjugateTube).
SpMat tube_patch_op(const PatchSpace& from, const PatchSpace& to, const Tube& t);

// dagger prefactor sqrt(d_c1 d_c2 / (d_g1 d_g2)) from the conjugate-tube
// identity; Pi(T^Mbar) = pref * Pi(T^M)^dagger
double conjugate_tube_prefactor(const Bimodule& bm, const Tube& m_tube);

// Vacuum tube whose insertion realizes the plaquette loop operator B^s for
// the physical loop label s. The ring chain consumes arc labels in the
// traversal orientation, which runs against the inserted loop, so the arc
// carries the dual label.
Tube physical_loop_tube(const FusionCat& cat, TubeKind kind, int s);

}  // namespace snc
