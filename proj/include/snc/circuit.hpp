#pragma once

#include "snc/lattice.hpp"

namespace snc {

// Three-sublattice schedule: layer ell (1..3) holds the plaquettes of color
// ell-1; same-color plaquettes are pairwise non-adjacent.
struct CircuitPlan {
  HexTorus torus;
  std::array<std::vector<std::pair<int, int>>, 3> layers;
};

CircuitPlan make_plan(const HexTorus& t);

// ancilla qudit dimension: max over sectors of max(n_d1, n_d2)
int ancilla_dim(const IdempotentTable& table);

// V = (sum_{a,ij} p_ij^{a,M} (x) |j><i|)^(x)N applied as a depth-3 circuit.
// Input: a D1-model state with ancillas (anc_dim from the table).
LatticeState apply_V(const LatticeState& in, const TubeAlgebra& alg,
                     const IdempotentTable& table);

// V^dagger: the adjoint circuit, layers in reverse order
LatticeState apply_V_dagger(const LatticeState& in, const TubeAlgebra& alg,
                            const IdempotentTable& table);

// Round trip V_{D2}^{D2} V_{D1}^{D2} collapsed to its closed form
// (sum_a sum_{i<m_a} p_ii^{a,M} (x) |0><0|)^(x)N; reports the per-sector
// truncation weight when m_a < n_a^{D1}.
struct RoundTripReport {
  std::vector<int> m_a;
  double truncated_weight = 0;  // norm^2 lost to truncation
};
LatticeState round_trip(const LatticeState& in, const TubeAlgebra& alg,
                        const IdempotentTable& table, RoundTripReport* report = nullptr);

// ground-state mapping report: residual of (1 - P_GS^{D2}) on each mapped
// basis state and the overlap matrix against the directly built D2 basis
struct GroundMapReport {
  std::vector<double> gs_residuals;
  Mat overlap;
  double overlap_unitarity = 0;
};
GroundMapReport map_ground_space(const Bimodule& bm, const HexTorus& t,
                                 const TubeAlgebra& alg, const IdempotentTable& table);

}  // namespace snc
