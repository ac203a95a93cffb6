#include "snc/trees.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "snc/parallel.hpp"

namespace snc {

int RecouplingContext::num_labels(SType t) const {
  switch (t) {
    case SType::D1: return c1->n;
    case SType::M: return act ? act->nm : 0;
    case SType::D2: return c2->n;
  }
  return 0;
}

double RecouplingContext::dim(SType t, int x) const {
  switch (t) {
    case SType::D1: return c1->qdim[x];
    case SType::M: return act->mdim[x];
    case SType::D2: return c2->qdim[x];
  }
  return 0;
}

SType RecouplingContext::fuse_type(SType tx, SType ty) {
  if (tx == SType::D1 && ty == SType::D1) return SType::D1;
  if (tx == SType::D1 && ty == SType::M) return SType::M;
  if (tx == SType::M && ty == SType::D2) return SType::M;
  if (tx == SType::D2 && ty == SType::D2) return SType::D2;
  throw domain_error("ill-typed strand pair");
}

int RecouplingContext::vmult(SType tx, int x, SType ty, int y, int z) const {
  if (tx == SType::D1 && ty == SType::D1) return c1->N(x, y, z);
  if (tx == SType::D1 && ty == SType::M) return act->L(x, y, z);
  if (tx == SType::M && ty == SType::D2) return act->R(x, y, z);
  if (tx == SType::D2 && ty == SType::D2) return c2->N(x, y, z);
  return 0;
}

cplx RecouplingContext::fcoef(SType tp, int p, SType tq, int q, SType tr, int r,
                              int d, int e, int j, int k, int f, int m, int n) const {
  if (tp == SType::D1 && tq == SType::D1 && tr == SType::D1)
    return c1->F.get(p, q, r, d, e, j, k, f, m, n);
  if (tp == SType::D1 && tq == SType::D1 && tr == SType::M)
    return F1->get(p, q, r, d, e, j, k, f, m, n);
  if (tp == SType::D1 && tq == SType::M && tr == SType::D2)
    return F2->get(p, q, r, d, e, j, k, f, m, n);
  if (tp == SType::M && tq == SType::D2 && tr == SType::D2)
    return F3->get(p, q, r, d, e, j, k, f, m, n);
  if (tp == SType::D2 && tq == SType::D2 && tr == SType::D2)
    return c2->F.get(p, q, r, d, e, j, k, f, m, n);
  throw domain_error("ill-typed F move");
}

Shape Shape::left_comb(int n) {
  Shape s;
  s.nleaves = n;
  if (n == 1) {
    s.root = 0;
    return s;
  }
  int prev = 0;
  for (int i = 1; i < n; ++i) {
    s.children.push_back({prev, i});
    prev = n + (i - 1);
  }
  s.root = prev;
  return s;
}

std::vector<std::pair<int, int>> Shape::spans() const {
  std::vector<std::pair<int, int>> sp(nleaves + children.size());
  for (int i = 0; i < nleaves; ++i) sp[i] = {i, i};
  // children vector is in construction order; resolve recursively
  std::vector<bool> done(sp.size(), false);
  for (int i = 0; i < nleaves; ++i) done[i] = true;
  bool progress = true;
  while (progress) {
    progress = false;
    for (size_t i = 0; i < children.size(); ++i) {
      int id = nleaves + static_cast<int>(i);
      if (done[id]) continue;
      auto [l, r] = children[i];
      if (done[l] && done[r]) {
        sp[id] = {sp[l].first, sp[r].second};
        done[id] = true;
        progress = true;
      }
    }
  }
  return sp;
}

std::vector<int> Shape::canonical_internal_order() const {
  auto sp = spans();
  std::vector<int> ids;
  for (int i = 0; i < num_internal(); ++i) ids.push_back(nleaves + i);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) { return sp[a] < sp[b]; });
  return ids;
}

namespace {

struct NodeInfo {
  SType type;
  int parent = -1;
};

// type of each node, bottom-up
std::vector<SType> node_types(const Shape& sh, const std::vector<SType>& leaf_types) {
  std::vector<SType> t(sh.nleaves + sh.num_internal());
  for (int i = 0; i < sh.nleaves; ++i) t[i] = leaf_types[i];
  std::vector<bool> done(t.size(), false);
  for (int i = 0; i < sh.nleaves; ++i) done[i] = true;
  bool progress = true;
  while (progress) {
    progress = false;
    for (int i = 0; i < sh.num_internal(); ++i) {
      int id = sh.nleaves + i;
      if (done[id]) continue;
      auto [l, r] = sh.children[i];
      if (done[l] && done[r]) {
        t[id] = RecouplingContext::fuse_type(t[l], t[r]);
        done[id] = true;
        progress = true;
      }
    }
  }
  return t;
}

}  // namespace

int TreeSpace::root_label(int i) const {
  // root is the last node in canonical order (largest span)
  auto order = shape.canonical_internal_order();
  if (order.empty()) return leaves[0];
  int pos = -1;
  for (size_t q = 0; q < order.size(); ++q)
    if (order[q] == shape.root) pos = static_cast<int>(q);
  return basis[i][pos];
}

SType TreeSpace::root_type() const {
  auto t = node_types(shape, types);
  return t[shape.root];
}

int TreeSpace::find(const std::vector<int16_t>& elt) const {
  auto it = index.find(Key(elt));
  return it == index.end() ? -1 : it->second;
}

TreeSpace make_tree_space(const RecouplingContext& ctx, const Shape& shape,
                          std::vector<SType> types, std::vector<int> leaves) {
  TreeSpace ts;
  ts.ctx = &ctx;
  ts.shape = shape;
  ts.types = std::move(types);
  ts.leaves = std::move(leaves);

  const int ni = shape.num_internal();
  if (ni == 0) {
    ts.basis.push_back({});
    ts.index[Key(std::vector<int16_t>{})] = 0;
    return ts;
  }
  auto order = shape.canonical_internal_order();
  std::vector<int> pos_of(shape.nleaves + ni, -1);
  for (size_t q = 0; q < order.size(); ++q) pos_of[order[q]] = static_cast<int>(q);
  auto ntypes = node_types(shape, ts.types);

  // process internal nodes bottom-up (children before parents)
  std::vector<int> proc;
  {
    std::vector<bool> done(shape.nleaves + ni, false);
    for (int i = 0; i < shape.nleaves; ++i) done[i] = true;
    while (static_cast<int>(proc.size()) < ni) {
      for (int i = 0; i < ni; ++i) {
        int id = shape.nleaves + i;
        if (done[id]) continue;
        auto [l, r] = shape.children[i];
        if (done[l] && done[r]) {
          proc.push_back(id);
          done[id] = true;
        }
      }
    }
  }

  // incremental assignment: labels[node], mults[node]
  std::vector<int> labels(shape.nleaves + ni, -1), mults(ni, 0);
  for (int i = 0; i < shape.nleaves; ++i) labels[i] = ts.leaves[i];

  std::vector<std::vector<int16_t>> out;
  std::function<void(size_t)> rec = [&](size_t step) {
    if (step == proc.size()) {
      std::vector<int16_t> elt(2 * ni);
      for (int i = 0; i < ni; ++i) {
        int id = shape.nleaves + i;
        elt[pos_of[id]] = static_cast<int16_t>(labels[id]);
        elt[ni + pos_of[id]] = static_cast<int16_t>(mults[i]);
      }
      out.push_back(std::move(elt));
      return;
    }
    int id = proc[step];
    auto [l, r] = shape.children[id - shape.nleaves];
    SType tz = ntypes[id];
    int nz = ctx.num_labels(tz);
    for (int z = 0; z < nz; ++z) {
      int m = ctx.vmult(ntypes[l], labels[l], ntypes[r], labels[r], z);
      if (m == 0) continue;
      labels[id] = z;
      for (int mu = 0; mu < m; ++mu) {
        mults[id - shape.nleaves] = mu;
        rec(step + 1);
      }
    }
    labels[id] = -1;
  };
  rec(0);

  ts.basis = std::move(out);
  for (size_t i = 0; i < ts.basis.size(); ++i) ts.index[Key(ts.basis[i])] = static_cast<int>(i);
  return ts;
}

namespace {

// Shared implementation of the F-move. fwd: ((P Q) R) -> (P (Q R)).
RotationResult rotate_impl(const TreeSpace& in, int node, bool fwd) {
  const auto& sh = in.shape;
  const auto& ctx = *in.ctx;
  if (node < sh.nleaves) throw domain_error("rotation at a leaf");
  auto [cl, cr] = sh.children[node - sh.nleaves];
  int moved = fwd ? cl : cr;  // internal child that gets re-associated
  if (moved < sh.nleaves) throw domain_error("rotation needs an internal child");

  auto [gl, gr] = sh.children[moved - sh.nleaves];
  // fwd: P=gl, Q=gr, R=cr ; new: node' = (P, (Q R)), inner' = (Q, R)
  // bwd: P=cl, Q=gl, R=gr ; new: node' = ((P Q), R), inner' = (P, Q)
  Shape ns = sh;
  int p, q, r;
  if (fwd) {
    p = gl; q = gr; r = cr;
    ns.children[moved - sh.nleaves] = {q, r};
    ns.children[node - sh.nleaves] = {p, moved};
  } else {
    p = cl; q = gl; r = gr;
    ns.children[moved - sh.nleaves] = {p, q};
    ns.children[node - sh.nleaves] = {moved, r};
  }

  TreeSpace out = make_tree_space(ctx, ns, in.types, in.leaves);

  auto old_order = sh.canonical_internal_order();
  auto new_order = ns.canonical_internal_order();
  const int ni = sh.num_internal();
  std::vector<int> old_pos(sh.nleaves + ni), new_pos(sh.nleaves + ni);
  for (size_t i = 0; i < old_order.size(); ++i) old_pos[old_order[i]] = static_cast<int>(i);
  for (size_t i = 0; i < new_order.size(); ++i) new_pos[new_order[i]] = static_cast<int>(i);

  auto old_types = node_types(sh, in.types);
  auto new_types = node_types(ns, in.types);

  // label of a node in an assignment vector of `in` / `out`
  auto old_label = [&](const std::vector<int16_t>& elt, int id) -> int {
    return id < sh.nleaves ? in.leaves[id] : elt[old_pos[id]];
  };

  Mat mat = Mat::Zero(out.dim(), in.dim());
  for (int col = 0; col < in.dim(); ++col) {
    const auto& elt = in.basis[col];
    int lp = old_label(elt, p), lq = old_label(elt, q), lr = old_label(elt, r);
    int d = elt[old_pos[node]];
    int e = elt[old_pos[moved]];
    int j = elt[ni + old_pos[moved]];
    int k = elt[ni + old_pos[node]];
    SType tp = old_types[p], tq = old_types[q], tr = old_types[r];
    SType tqr = RecouplingContext::fuse_type(tq, tr);
    SType tpq = RecouplingContext::fuse_type(tp, tq);

    // enumerate new inner labels
    int nf = fwd ? ctx.num_labels(tqr) : ctx.num_labels(tpq);
    for (int f = 0; f < nf; ++f) {
      int minner = fwd ? ctx.vmult(tq, lq, tr, lr, f) : ctx.vmult(tp, lp, tq, lq, f);
      int mouter = fwd ? ctx.vmult(tp, lp, tqr, f, d) : ctx.vmult(tpq, f, tr, lr, d);
      for (int m = 0; m < minner; ++m)
        for (int n = 0; n < mouter; ++n) {
          cplx coef;
          if (fwd)
            coef = ctx.fcoef(tp, lp, tq, lq, tr, lr, d, e, j, k, f, m, n);
          else
            // inverse move: conj of the entry with (e,j,k) <-> (f,m,n) roles
            coef = std::conj(ctx.fcoef(tp, lp, tq, lq, tr, lr, d, f, m, n, e, j, k));
          if (std::abs(coef) < kPruneTol) continue;
          std::vector<int16_t> nelt(2 * ni);
          for (int t = 0; t < ni; ++t) {
            int oid = old_order[t];
            if (oid == moved || oid == node) continue;
            // same node id persists with same span for untouched nodes
            nelt[new_pos[oid]] = elt[old_pos[oid]];
            nelt[ni + new_pos[oid]] = elt[ni + old_pos[oid]];
          }
          nelt[new_pos[node]] = static_cast<int16_t>(d);
          nelt[ni + new_pos[node]] = static_cast<int16_t>(n);
          nelt[new_pos[moved]] = static_cast<int16_t>(f);
          nelt[ni + new_pos[moved]] = static_cast<int16_t>(m);
          int row = out.find(nelt);
          if (row < 0) throw domain_error("rotation produced inadmissible tree");
          mat(row, col) += coef;
        }
    }
  }
  return {std::move(out), std::move(mat)};
}

}  // namespace

RotationResult rotate_fwd(const TreeSpace& in, int node) { return rotate_impl(in, node, true); }
RotationResult rotate_bwd(const TreeSpace& in, int node) { return rotate_impl(in, node, false); }

double pentagon_residual(const RecouplingContext& ctx, const std::array<SType, 4>& pattern) {
  // leaf label ranges per position
  std::array<int, 4> nl{};
  for (int i = 0; i < 4; ++i) nl[i] = ctx.num_labels(pattern[i]);

  std::vector<std::array<int, 4>> cases;
  for (int w = 0; w < nl[0]; ++w)
    for (int x = 0; x < nl[1]; ++x)
      for (int y = 0; y < nl[2]; ++y)
        for (int z = 0; z < nl[3]; ++z) cases.push_back({w, x, y, z});

  double worst = 0.0;
  const bool par = parallel_enabled();
#pragma omp parallel for schedule(dynamic) reduction(max : worst) if (par)
  for (long ci = 0; ci < static_cast<long>(cases.size()); ++ci) {
    auto [w, x, y, z] = cases[ci];
    Shape s1 = Shape::left_comb(4);
    std::vector<SType> types(pattern.begin(), pattern.end());
    TreeSpace t1 = make_tree_space(ctx, s1, types, {w, x, y, z});
    if (t1.dim() == 0) continue;
    // node ids: leaves 0..3; internal: 4=(01), 5=((01)2), 6=(((01)2)3)=root
    // path A: rotate at root (left child 5): S5 = ((01)(23)); then rotate at
    // root again (left child 4): S4 = (0(1(23)))
    auto a1 = rotate_fwd(t1, 6);
    auto a2 = rotate_fwd(a1.space, 6);
    Mat pa = a2.matrix * a1.matrix;
    // path B: rotate at 5 -> ((0(12))3); rotate at root -> (0((12)3));
    // rotate at the right inner node -> (0(1(23)))
    auto b1 = rotate_fwd(t1, 5);
    auto b2 = rotate_fwd(b1.space, 6);
    // right child of root in b2: the node holding span (1,3)
    int inner = -1;
    {
      auto sp = b2.space.shape.spans();
      for (int i = 0; i < b2.space.shape.num_internal(); ++i)
        if (sp[4 + i] == std::make_pair(1, 3)) inner = 4 + i;
    }
    auto b3 = rotate_fwd(b2.space, inner);
    Mat pb = b3.matrix * b2.matrix * b1.matrix;
    // the two final spaces share span structure but may enumerate their
    // bases in different orders; align rows before comparing
    Mat pb_aligned = Mat::Zero(a2.space.dim(), t1.dim());
    for (int rr = 0; rr < b3.space.dim(); ++rr) {
      int r2 = a2.space.find(b3.space.basis[rr]);
      if (r2 < 0) throw domain_error("pentagon: basis mismatch between paths");
      pb_aligned.row(r2) = pb.row(rr);
    }
    double r = (pa - pb_aligned).cwiseAbs().maxCoeff();
    worst = std::max(worst, r);
  }
  return worst;
}

}  // namespace snc
