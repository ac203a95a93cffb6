#include "snc/group.hpp"

#include <cmath>
#include <numbers>

namespace snc {

void FiniteGroup::validate() const {
  const int n = order;
  if (n <= 0 || static_cast<int>(table.size()) != n * n)
    throw domain_error("group table has wrong size");
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) {
      int gh = mul(g, h);
      if (gh < 0 || gh >= n) throw domain_error("group table entry out of range");
      for (int k = 0; k < n; ++k)
        if (mul(mul(g, h), k) != mul(g, mul(h, k)))
          throw domain_error("associativity violated at (" + std::to_string(g) + "," +
                             std::to_string(h) + "," + std::to_string(k) + ")");
    }
  for (int g = 0; g < n; ++g) {
    if (mul(identity, g) != g || mul(g, identity) != g)
      throw domain_error("identity element is not neutral");
    if (mul(g, inv(g)) != identity || mul(inv(g), g) != identity)
      throw domain_error("inverse table wrong at " + std::to_string(g));
  }
}

FiniteGroup FiniteGroup::cyclic(int n) {
  FiniteGroup g;
  g.order = n;
  g.identity = 0;
  g.table.resize(n * n);
  g.inverse.resize(n);
  for (int a = 0; a < n; ++a) {
    g.inverse[a] = (n - a) % n;
    for (int b = 0; b < n; ++b) g.table[a * n + b] = (a + b) % n;
  }
  return g;
}

namespace {

// permutations of {0,1,2} in a fixed order: e, (01), (02), (12), (012), (021)
const int kS3Perm[6][3] = {{0, 1, 2}, {1, 0, 2}, {2, 1, 0},
                           {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};

int s3_compose(int a, int b) {
  // (a*b)(x) = a(b(x))
  int c[3];
  for (int x = 0; x < 3; ++x) c[x] = kS3Perm[a][kS3Perm[b][x]];
  for (int i = 0; i < 6; ++i)
    if (c[0] == kS3Perm[i][0] && c[1] == kS3Perm[i][1] && c[2] == kS3Perm[i][2]) return i;
  return -1;
}

int s3_parity(int a) {
  int p = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (kS3Perm[a][i] > kS3Perm[a][j]) ++p;
  return p % 2;
}

}  // namespace

FiniteGroup FiniteGroup::symmetric3() {
  FiniteGroup g;
  g.order = 6;
  g.identity = 0;
  g.table.resize(36);
  g.inverse.assign(6, -1);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      int c = s3_compose(a, b);
      g.table[a * 6 + b] = c;
      if (c == 0) g.inverse[a] = b;
    }
  return g;
}

int GroupData::conjugate(int a) const {
  const int n = group.order;
  for (int b = 0; b < num_irreps(); ++b) {
    bool match = true;
    for (int g = 0; g < n && match; ++g)
      if (std::abs(character(b, g) - std::conj(character(a, g))) > 1e-9) match = false;
    if (match) return b;
  }
  throw domain_error("conjugate irrep not found for " + irreps[a].label);
}

int GroupData::fusion_mult(int a, int b, int c) const {
  const int n = group.order;
  cplx s = 0;
  for (int g = 0; g < n; ++g)
    s += character(a, g) * character(b, g) * std::conj(character(c, g));
  double m = s.real() / n;
  long r = std::lround(m);
  if (std::abs(m - r) > 1e-9 || std::abs(s.imag()) > 1e-9 * n)
    throw domain_error("non-integer fusion multiplicity");
  return static_cast<int>(r);
}

double GroupData::check_homomorphism() const {
  double worst = 0;
  for (const auto& ir : irreps)
    for (int g = 0; g < group.order; ++g)
      for (int h = 0; h < group.order; ++h) {
        double r = (ir.matrices[g] * ir.matrices[h] - ir.matrices[group.mul(g, h)])
                       .cwiseAbs()
                       .maxCoeff();
        worst = std::max(worst, r);
      }
  return worst;
}

double GroupData::check_unitarity() const {
  double worst = 0;
  for (const auto& ir : irreps)
    for (int g = 0; g < group.order; ++g) {
      Mat u = ir.matrices[g];
      worst = std::max(worst, (u.adjoint() * u - Mat::Identity(ir.dim, ir.dim))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
  return worst;
}

double GroupData::check_orthogonality() const {
  // Schur orthogonality of matrix elements across the shipped set
  const int n = group.order;
  double worst = 0;
  for (int a = 0; a < num_irreps(); ++a)
    for (int b = 0; b < num_irreps(); ++b)
      for (int i = 0; i < irreps[a].dim; ++i)
        for (int j = 0; j < irreps[a].dim; ++j)
          for (int k = 0; k < irreps[b].dim; ++k)
            for (int l = 0; l < irreps[b].dim; ++l) {
              cplx s = 0;
              for (int g = 0; g < n; ++g)
                s += irreps[a].matrices[g](i, j) * std::conj(irreps[b].matrices[g](k, l));
              cplx expect = (a == b && i == k && j == l)
                                ? cplx(double(n) / irreps[a].dim, 0.0)
                                : cplx(0.0, 0.0);
              worst = std::max(worst, std::abs(s - expect));
            }
  return worst;
}

void GroupData::validate(double tol) const {
  group.validate();
  int sumsq = 0;
  for (const auto& ir : irreps) sumsq += ir.dim * ir.dim;
  if (sumsq != group.order)
    throw domain_error("irrep set incomplete: sum of squared dims != |G|");
  if (check_homomorphism() > tol) throw domain_error("irrep homomorphism residual too large");
  if (check_unitarity() > tol) throw domain_error("irrep unitarity residual too large");
  if (check_orthogonality() > tol) throw domain_error("Schur orthogonality residual too large");
}

GroupData GroupData::cyclic(int n) {
  GroupData gd;
  gd.group = FiniteGroup::cyclic(n);
  for (int k = 0; k < n; ++k) {
    Irrep ir;
    ir.label = "chi" + std::to_string(k);
    ir.dim = 1;
    for (int g = 0; g < n; ++g) {
      Mat m(1, 1);
      double th = 2.0 * std::numbers::pi * k * g / n;
      m(0, 0) = cplx(std::cos(th), std::sin(th));
      ir.matrices.push_back(m);
    }
    gd.irreps.push_back(std::move(ir));
  }
  return gd;
}

GroupData GroupData::symmetric3() {
  GroupData gd;
  gd.group = FiniteGroup::symmetric3();

  Irrep triv{"triv", 1, {}};
  Irrep sgn{"sgn", 1, {}};
  Irrep rho{"rho", 2, {}};

  // standard representation: permutation action on the plane orthogonal to
  // (1,1,1), in the orthonormal basis u1=(1,-1,0)/sqrt2, u2=(1,1,-2)/sqrt6
  Eigen::Matrix<double, 3, 2> u;
  u << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),
      -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(6.0),
      0.0, -2.0 / std::sqrt(6.0);
  for (int g = 0; g < 6; ++g) {
    Mat t(1, 1), s(1, 1);
    t(0, 0) = 1.0;
    s(0, 0) = s3_parity(g) ? -1.0 : 1.0;
    triv.matrices.push_back(t);
    sgn.matrices.push_back(s);
    Eigen::Matrix3d p = Eigen::Matrix3d::Zero();
    for (int x = 0; x < 3; ++x) p(kS3Perm[g][x], x) = 1.0;
    Eigen::Matrix2d r = u.transpose() * p * u;
    rho.matrices.push_back(r.cast<cplx>());
  }
  gd.irreps = {triv, sgn, rho};
  return gd;
}

CGSlice clebsch_gordan(const GroupData& gd, int a, int b) {
  const auto& G = gd.group;
  const int da = gd.irreps[a].dim, db = gd.irreps[b].dim;
  CGSlice out;
  out.a = a;
  out.b = b;
  out.iso.resize(gd.num_irreps());

  for (int c = 0; c < gd.num_irreps(); ++c) {
    int mult = gd.fusion_mult(a, b, c);
    if (mult == 0) continue;
    const int dc = gd.irreps[c].dim;

    // unit constraints are fixed to exact identity blocks
    if (gd.irreps[a].dim == 1 && a == 0) {  // assumes irrep 0 is trivial
      if (c == b) out.iso[c].push_back(Mat::Identity(db, db));
      continue;
    }
    if (gd.irreps[b].dim == 1 && b == 0) {
      if (c == a) out.iso[c].push_back(Mat::Identity(da, da));
      continue;
    }

    // intertwiner projector: X -> (1/|G|) sum_g (Da(x)Db)(g) X Dc(g)^+
    auto project = [&](const Mat& x) {
      Mat acc = Mat::Zero(da * db, dc);
      for (int g = 0; g < G.order; ++g) {
        const Mat& A = gd.irreps[a].matrices[g];
        const Mat& B = gd.irreps[b].matrices[g];
        const Mat& C = gd.irreps[c].matrices[g];
        Mat ab(da * db, da * db);
        for (int i = 0; i < da; ++i)
          for (int j = 0; j < db; ++j)
            for (int k = 0; k < da; ++k)
              for (int l = 0; l < db; ++l)
                ab(i * db + j, k * db + l) = A(i, k) * B(j, l);
        acc += ab * x * C.adjoint();
      }
      return Mat(acc / double(G.order));
    };

    // deterministic column-pivoted orthonormalization over projected
    // canonical candidates
    std::vector<Mat> found;
    std::vector<Mat> cands;
    for (int r = 0; r < da * db; ++r)
      for (int s = 0; s < dc; ++s) {
        Mat e = Mat::Zero(da * db, dc);
        e(r, s) = 1.0;
        cands.push_back(project(e));
      }
    while (static_cast<int>(found.size()) < mult) {
      int best = -1;
      double bestn = 1e-8;
      std::vector<Mat> res = cands;
      for (size_t q = 0; q < res.size(); ++q) {
        for (const Mat& f : found) {
          cplx ip = (f.adjoint() * res[q]).trace() / double(dc);
          res[q] -= ip * f;
        }
        double nn = std::sqrt(std::abs((res[q].adjoint() * res[q]).trace().real() / dc));
        if (nn > bestn) {
          bestn = nn;
          best = static_cast<int>(q);
          break;  // first candidate above threshold: stable pivot order
        }
      }
      if (best < 0) throw domain_error("CG projection found too few intertwiners");
      Mat x = res[best];
      // enforce X^+ X = 1 exactly (Schur: X^+X is a scalar)
      cplx norm2 = (x.adjoint() * x).trace() / double(dc);
      x /= std::sqrt(norm2.real());
      // fix the overall phase so the first sizable entry is real positive
      for (int r = 0; r < x.rows() * x.cols(); ++r) {
        cplx v = x(r % x.rows(), r / x.rows());
        if (std::abs(v) > 1e-6) {
          x *= std::conj(v) / std::abs(v);
          break;
        }
      }
      found.push_back(x);
    }
    out.iso[c] = std::move(found);
  }
  return out;
}

double cg_intertwiner_residual(const GroupData& gd, const CGSlice& cg) {
  const auto& G = gd.group;
  const int a = cg.a, b = cg.b;
  const int da = gd.irreps[a].dim, db = gd.irreps[b].dim;
  double worst = 0;
  for (int c = 0; c < gd.num_irreps(); ++c)
    for (const Mat& x : cg.iso[c])
      for (int g = 0; g < G.order; ++g) {
        const Mat& A = gd.irreps[a].matrices[g];
        const Mat& B = gd.irreps[b].matrices[g];
        const Mat& C = gd.irreps[c].matrices[g];
        Mat ab(da * db, da * db);
        for (int i = 0; i < da; ++i)
          for (int j = 0; j < db; ++j)
            for (int k = 0; k < da; ++k)
              for (int l = 0; l < db; ++l)
                ab(i * db + j, k * db + l) = A(i, k) * B(j, l);
        worst = std::max(worst, (ab * x - x * C).cwiseAbs().maxCoeff());
      }
  return worst;
}

}  // namespace snc
