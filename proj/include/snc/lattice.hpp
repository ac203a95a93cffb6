#pragma once

#include "snc/tube.hpp"

namespace snc {

// Hexagonal torus in axial coordinates: l1 x l2 hexagon cells, both periods
// multiples of 3 so the plaquette 3-coloring color(I,J) = (I-J) mod 3 is
// proper. Per cell the lattice owns three edges (the NW slant, the NE slant
// and the right vertical), with the right vertical split into three segments
// by the cell's two tails (extended model). All edge arrows point upward.
//
// Cell-local template positions of the plaquette ring (cyclic):
//   r1 = NW(I,J)    r2 = NE(I,J)        r3..r5 = RV(I,J) top/mid/bot
//   r6 = NW(I+1,J-1) r7 = NE(I,J-1)     r8..r10 = RV(I-1,J) bot/mid/top
// Legs: a1 = NE(I-1,J), a2 = RVbot(I-1,J+1), a3 = NW(I+1,J),
//       a4 = NE(I+1,J-1), a5 = RVtop(I,J-1), a6 = NW(I,J-1).
// Own tails d1,d2 sit on RV(I,J); the neighbor tails grabbed by the
// plaquette sit on RV(I-1,J).
struct HexTorus {
  int l1 = 3, l2 = 3;

  HexTorus() = default;
  HexTorus(int a, int b);

  int cells() const { return l1 * l2; }
  int wrap1(int i) const { return ((i % l1) + l1) % l1; }
  int wrap2(int j) const { return ((j % l2) + l2) % l2; }
  int cell(int i, int j) const { return wrap1(i) + l1 * wrap2(j); }
  int color(int i, int j) const { return ((i - j) % 3 + 3) % 3; }

  int num_vertices() const { return 2 * cells(); }
  int num_edges() const { return 3 * cells(); }
  int num_plaquettes() const { return cells(); }
};

// Per-cell configuration slots. Values are small label indices whose
// category depends on the circuit stage of the adjacent plaquettes.
struct CellConf {
  int16_t nw = 0, ne = 0;                    // slant edges
  int16_t rv_top = 0, rv_mid = 0, rv_bot = 0;  // right-vertical segments
  int16_t tail_up = 0, tail_dn = 0;          // the cell's two tails
  int16_t mu_n = 0, mu_s = 0;                // N / S vertex multiplicities
  int16_t mu_t1 = 0, mu_t2 = 0;              // tail vertex multiplicities
};

constexpr int kCellSlots = 12;

// Sparse lattice state. `layers` counts how many circuit layers have been
// applied (0 = D1 string-net, 3 = D2 string-net); `side` distinguishes the
// pure D1 and pure D2 models when layers is 0 or 3. Ancillas, when present,
// hold one qudit value per plaquette.
struct LatticeState {
  const Bimodule* bm = nullptr;
  HexTorus torus;
  int layers = 0;
  bool ancilla = false;
  int anc_dim = 1;
  KeyMap<cplx> amp;

  double norm() const;
  void prune(double tol = kPruneTol);
  LatticeState& operator*=(cplx s);
  LatticeState& operator+=(const LatticeState& o);
};

cplx dot(const LatticeState& a, const LatticeState& b);

// key packing helpers
Key pack_config(const HexTorus& t, const std::vector<CellConf>& cells,
                const std::vector<int16_t>& anc);
void unpack_config(const HexTorus& t, const Key& k, std::vector<CellConf>& cells,
                   std::vector<int16_t>& anc, bool ancilla);

// all-vacuum configuration
LatticeState vacuum_state(const Bimodule& bm, const HexTorus& t, int layers = 0,
                          bool ancilla = false, int anc_dim = 1);

// extended vertex projector A_v: keeps only amplitudes whose tail at the
// given vertex is trivial. Vertices are addressed as (cell, which) with
// which = 0 for the tail on top of the cell's right vertical (its NE-side
// vertex) and 1 for the lower one.
LatticeState vertex_projector(const LatticeState& in, int cell, int which);

// B_p^s for the pure models (layers 0 with loop in D1, layers 3 with loop
// in D2). Requires the grabbed neighbor tails at p to be trivial in every
// supported configuration.
LatticeState plaquette_loop_op(const LatticeState& in, int I, int J, int loop_label);

// B_p = sum_s d_s B_p^s / D^2; Hermitian projector
LatticeState plaquette_projector(const LatticeState& in, int I, int J);

// General plaquette projector valid on excited grabbed tails: the central
// element sum_a beta_a P_a with beta_a = 1 exactly on the flux-free sectors
// (those where the weighted loop sum acts as the identity).
LatticeState plaquette_projector_general(const LatticeState& in, int I, int J,
                                         const TubeAlgebra& alg,
                                         const IdempotentTable& table);

// product over all plaquettes of B_p interleaved with pruning
LatticeState project_ground(const LatticeState& in);

// Orthonormal ground space basis from vacuum + Wilson-loop seeds (abelian
// input categories). side = 0 builds the D1 model, side = 1 the D2 model
// (layers = 3 states).
std::vector<LatticeState> ground_space_basis(const Bimodule& bm, const HexTorus& t,
                                             int side);

// Apply a tube of the bimodule at plaquette (I,J) during circuit layer
// `layer` (1-based; must equal color(I,J)+1). Handles the conversion
// bookkeeping of the three sublattices. Ancilla untouched (caller's job).
LatticeState apply_layer_tube(const LatticeState& in, int I, int J, const Tube& tube);

// Apply a D1 tube on a stage-0 lattice (or a D2 tube on a stage-3 lattice)
// without converting anything: the annular action on the plaquette's
// excitation content.
LatticeState apply_stage_tube(const LatticeState& in, int I, int J, const Tube& tube);

}  // namespace snc
