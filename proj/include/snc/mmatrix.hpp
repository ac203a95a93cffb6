#pragma once

#include <array>

#include "snc/bimodule.hpp"
#include "snc/common.hpp"

namespace snc {

// Tube basis element. The annulus diagram: a loop with four attachment
// vertices, two lower legs (grabbed boundary tails) and two upper legs (the
// new tails written by the tube), one multiplicity slot per trivalent
// vertex. Arcs in loop order: arcA -[crossing 2: c2 in, g2 out]- arcX2 -
// arcQ -[crossing 1: c1 in, g1 out]- arcX1 - back to arcA. Vertex relations:
//   crossing 2: (c2 |> arcA  = arcX2)[mc2],  (arcQ <| g2 = arcX2)[mg2]
//   crossing 1: (c1 |> arcQ  = arcX1)[mc1],  (arcA <| g1 = arcX1)[mg1]
// For kind D1 all strands are in D1 and |>, <| are plain fusion; for kind
// D2 everything lives in D2; for kind M the arcs are module objects, the
// lower legs D1 and the upper legs D2. Mbar tubes are indexed by the same
// tuples as their daggered M partners.
enum class TubeKind : uint8_t { D1 = 0, M = 1, Mbar = 2, D2 = 3 };

struct Tube {
  TubeKind kind;
  int c1 = 0, c2 = 0;  // lower legs
  int g1 = 0, g2 = 0;  // upper legs
  int arcA = 0, arcQ = 0, arcX1 = 0, arcX2 = 0;
  int mc1 = 0, mg1 = 0, mc2 = 0, mg2 = 0;

  bool operator==(const Tube& o) const;
  Key key() const;
};

// The vacuum tube of a given kind with loop label `arc` (all legs trivial).
Tube vacuum_tube(TubeKind kind, int arc);

// Ring chain template ("kind-1" plaquette): a loop of the tube's arc type
// is fused onto the ten boundary segments of a hexagon whose right vertical
// edge carries the plaquette's own two tails and whose left vertical edge
// carries the neighbor tails grabbed by the tube.
//
// Segment cycle (positions in brackets):
//   [P1: leg a1/V1] r1 [P2: a2/V2] r2 [P3: a3/V3] r3 [P4: tail d1] r4
//   [P5: tail d2] r5 [P6: a4/V4] r6 [P7: a5/V5] r7 [P8: a6/V6] r8
//   [P9: crossing c2/g2] r9 [P10: crossing c1/g1] r10 -> r1
//
// Flavors: PureD1 (D1 ring, D1 loop; the string-net B_p^s building block),
// Module (D1 ring, module loop; circuit layer 1), PureD2 (D2 everything).
enum class ChainFlavor { PureD1 = 0, Module = 1, PureD2 = 2 };

struct Chain1Env {
  const Bimodule* bm = nullptr;
  ChainFlavor flavor = ChainFlavor::PureD1;
  std::array<int, 6> legs{};   // a1..a6
  std::array<int, 2> tails{};  // d1, d2 (own tails; unchanged by the op)
};

// one local configuration of the ring: 10 segment labels + 10 vertex mults
struct RingState {
  std::array<int16_t, 10> seg{};
  std::array<int16_t, 10> mult{};
  bool operator==(const RingState& o) const { return seg == o.seg && mult == o.mult; }
  Key key() const;
};

// apply the loop/tube of `tube` to one input ring state; returns the list
// of (output ring state, coefficient). The tube's lower legs must equal the
// grabbed neighbor-tail labels carried by the caller (checked against
// tube.c1/c2 by the caller). Input mults index the input vertex spaces,
// output mults the converted ones.
std::vector<std::pair<RingState, cplx>> chain1_apply(const Chain1Env& env, const Tube& tube,
                                                     const RingState& in);

// Strand/vertex bookkeeping helpers shared with the lattice code.
SType chain1_ring_in_type(ChainFlavor f);
SType chain1_ring_out_type(ChainFlavor f);
SType chain1_loop_type(ChainFlavor f);
SType chain1_upper_leg_type(ChainFlavor f);

// input vertex-space dimension at position p (1..10) for the given labels
int chain1_in_vdim(const Chain1Env& env, int p, const std::array<int16_t, 10>& seg);
// positions 9 and 10 carry the grabbed neighbor tail of label `cleg`
int chain1_in_vdim_cross(const Chain1Env& env, int p, const std::array<int16_t, 10>& seg,
                         int cleg);
// output vertex-space dimension at position p given output segments and the
// tube's upper legs (positions 9,10 host the written tails)
int chain1_out_vdim(const Chain1Env& env, const Tube& tube, int p,
                    const std::array<int16_t, 10>& seg);

// ---------------------------------------------------------------------------
// Layer-2 chain (printed M^2): a module loop D on a mixed hexagon whose ring
// alternates D1 edges a_i (-> module E_i) and module edges B_i (-> D2
// alpha_i), with module legs C_1..C_6. Ground version (trivial tails).
struct Chain2Env {
  const Bimodule* bm = nullptr;
  std::array<int, 6> legs{};  // C1..C6 (module labels)
};
struct Ring6 {
  std::array<int16_t, 6> seg{};   // a1,B1,a2,B2,a3,B3 (in) / E1,t1?,.. see impl
  std::array<int16_t, 6> mult{};  // k1..k6 (in) / h1..h6 (out)
  bool operator==(const Ring6& o) const { return seg == o.seg && mult == o.mult; }
  Key key() const;
};
std::vector<std::pair<Ring6, cplx>> chain2_apply(const Chain2Env& env, int loopD,
                                                 const Ring6& in);

// Layer-3 chain (printed M^3): module loop G on an all-module ring E_i with
// D2 legs alpha_i, producing the final D2 ring beta_i. Ground version.
struct Chain3Env {
  const Bimodule* bm = nullptr;
  std::array<int, 6> legs{};  // alpha1..alpha6 (D2 labels)
};
std::vector<std::pair<Ring6, cplx>> chain3_apply(const Chain3Env& env, int loopG,
                                                 const Ring6& in);

// ---------------------------------------------------------------------------
// Extended ten-segment chains for circuit layers 2 and 3: same ring
// geometry as chain1 (own tails on the right vertical, grabbed tails on the
// left vertical), with the mixed/converted segment types of the respective
// layer. Layer 2: ring alternates unconverted D1 and once-converted module
// segments, module legs; layer 3: all-module ring, D2 legs, trivially
// passing D2 own-tails.
struct Chain2ExtEnv {
  const Bimodule* bm = nullptr;
  std::array<int, 6> legs{};   // module legs C (positions P1..P8 pattern)
  std::array<int, 2> tails{};  // own D1 tails
};
std::vector<std::pair<RingState, cplx>> chain2_ext_apply(const Chain2ExtEnv& env,
                                                         const Tube& tube,
                                                         const RingState& in);

struct Chain3ExtEnv {
  const Bimodule* bm = nullptr;
  std::array<int, 6> legs{};   // D2 legs
  std::array<int, 2> tails{};  // own tails, already D2; must be trivial
};
std::vector<std::pair<RingState, cplx>> chain3_ext_apply(const Chain3ExtEnv& env,
                                                         const Tube& tube,
                                                         const RingState& in);

// Mirror chain for a D2 tube acting on a converted (stage-1) plaquette: the
// D2 loop is fused from the inside onto the all-module ring; ring labels
// stay module-typed, the tube rewrites the D2 neighbor tails.
struct ChainT2Env {
  const Bimodule* bm = nullptr;
  std::array<int, 6> legs{};   // a1..a6, still D1
  std::array<int, 2> tails{};  // own tails, still D1
};
std::vector<std::pair<RingState, cplx>> chainT2_apply(const ChainT2Env& env, const Tube& tube,
                                                      const RingState& in);
int chainT2_vdim(const ChainT2Env& env, const Tube* tube_or_null, int p,
                 const std::array<int16_t, 10>& seg, int tail_g1, int tail_g2);

}  // namespace snc
