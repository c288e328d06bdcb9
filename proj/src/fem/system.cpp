#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "dwave/error.hpp"
#include "dwave/fem.hpp"

namespace dwave::fem {

namespace {

// 2-point Gauss on [0, 1]
constexpr std::array<double, 2> kGaussX{0.21132486540518711775, 0.78867513459481288225};

int intervals_from_h(double h) {
  require(h > 0.0 && h <= 0.5, "FemSystem: mesh width must lie in (0, 1/2], got " + std::to_string(h));
  const double inv = 1.0 / h;
  const long n = std::lround(inv);
  require(std::abs(inv - static_cast<double>(n)) <= 1e-9 * inv,
          "FemSystem: 1/h must be an integer, got 1/h = " + std::to_string(inv));
  return static_cast<int>(n);
}

CsrMatrix from_triplets(std::size_t n, const std::map<std::pair<std::size_t, std::size_t>, double>& entries) {
  std::vector<std::size_t> ptr(n + 1, 0);
  std::vector<std::size_t> cols;
  Vec vals;
  cols.reserve(entries.size());
  vals.reserve(entries.size());
  for (const auto& [ij, v] : entries) {
    ++ptr[ij.first + 1];
    cols.push_back(ij.second);
    vals.push_back(v);
  }
  for (std::size_t i = 0; i < n; ++i) ptr[i + 1] += ptr[i];
  return CsrMatrix(n, std::move(ptr), std::move(cols), std::move(vals));
}

// Triangles of grid square (i, j): lower (i,j),(i+1,j),(i+1,j+1) and upper
// (i,j),(i+1,j+1),(i,j+1), as grid coordinates.
using Tri = std::array<std::array<int, 2>, 3>;
std::array<Tri, 2> square_triangles(int i, int j) {
  return {Tri{{{i, j}, {i + 1, j}, {i + 1, j + 1}}}, Tri{{{i, j}, {i + 1, j + 1}, {i, j + 1}}}};
}

}  // namespace

FemSystem FemSystem::assemble(int dim, double h) {
  require(dim == 1 || dim == 2, "FemSystem: dim must be 1 or 2");
  FemSystem s;
  s.dim_ = dim;
  s.n_ = intervals_from_h(h);
  s.h_ = 1.0 / s.n_;
  const int n = s.n_;
  const double hh = s.h_;
  std::map<std::pair<std::size_t, std::size_t>, double> m, k;

  if (dim == 1) {
    const std::size_t nd = static_cast<std::size_t>(n - 1);
    for (std::size_t i = 0; i < nd; ++i) {
      s.nodes_.push_back({(static_cast<double>(i) + 1.0) * hh, 0.0});
      m[{i, i}] = 4.0 * hh / 6.0;
      k[{i, i}] = 2.0 / hh;
      if (i + 1 < nd) {
        m[{i, i + 1}] = m[{i + 1, i}] = hh / 6.0;
        k[{i, i + 1}] = k[{i + 1, i}] = -1.0 / hh;
      }
    }
    s.mass_ = from_triplets(nd, m);
    s.stiffness_ = from_triplets(nd, k);
    return s;
  }

  const int side = n - 1;
  auto dof = [&](int i, int j) -> long {
    if (i <= 0 || j <= 0 || i >= n || j >= n) return -1;
    return static_cast<long>(j - 1) * side + (i - 1);
  };
  for (int j = 1; j < n; ++j)
    for (int i = 1; i < n; ++i) s.nodes_.push_back({i * hh, j * hh});

  const double area = 0.5 * hh * hh;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      for (const Tri& t : square_triangles(i, j)) {
        // gradients of the barycentric functions
        const double x0 = t[0][0] * hh, y0 = t[0][1] * hh;
        const double x1 = t[1][0] * hh, y1 = t[1][1] * hh;
        const double x2 = t[2][0] * hh, y2 = t[2][1] * hh;
        const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
        const std::array<std::array<double, 2>, 3> g{{{(y1 - y2) / det, (x2 - x1) / det},
                                                      {(y2 - y0) / det, (x0 - x2) / det},
                                                      {(y0 - y1) / det, (x1 - x0) / det}}};
        for (int a = 0; a < 3; ++a) {
          const long da = dof(t[a][0], t[a][1]);
          if (da < 0) continue;
          for (int b = 0; b < 3; ++b) {
            const long db = dof(t[b][0], t[b][1]);
            if (db < 0) continue;
            const auto key = std::make_pair(static_cast<std::size_t>(da), static_cast<std::size_t>(db));
            m[key] += area / 12.0 * (a == b ? 2.0 : 1.0);
            k[key] += area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
          }
        }
      }
    }
  }
  const std::size_t nd = static_cast<std::size_t>(side) * side;
  s.mass_ = from_triplets(nd, m);
  s.stiffness_ = from_triplets(nd, k);
  return s;
}

Vec FemSystem::load(const Function1D& f, const std::vector<double>& breakpoints) const {
  require(dim_ == 1, "FemSystem::load: 1D integrand on a 2D system");
  std::vector<double> bp(breakpoints);
  std::sort(bp.begin(), bp.end());
  Vec out(dof_count(), 0.0);
  for (int e = 0; e < n_; ++e) {
    const double xl = e * h_;
    const double xr = (e + 1) * h_;
    std::vector<double> cuts{xl};
    for (auto it = std::upper_bound(bp.begin(), bp.end(), xl); it != bp.end() && *it < xr; ++it)
      if (*it - cuts.back() > 1e-14) cuts.push_back(*it);
    cuts.push_back(xr);
    double left = 0.0, right = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double a = cuts[c];
      const double len = cuts[c + 1] - a;
      for (double g : kGaussX) {
        const double x = a + g * len;
        const double fx = f(x) * 0.5 * len;
        left += fx * (xr - x) / h_;
        right += fx * (x - xl) / h_;
      }
    }
    if (e >= 1) out[static_cast<std::size_t>(e - 1)] += left;
    if (e + 1 <= n_ - 1) out[static_cast<std::size_t>(e)] += right;
  }
  return out;
}

Vec FemSystem::load(const Function2D& f) const {
  require(dim_ == 2, "FemSystem::load: 2D integrand on a 1D system");
  Vec out(dof_count(), 0.0);
  const int n = n_;
  const int side = n - 1;
  const double w = 0.5 * h_ * h_ / 3.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      for (const Tri& t : square_triangles(i, j)) {
        for (int e = 0; e < 3; ++e) {
          const auto& p = t[e];
          const auto& q = t[(e + 1) % 3];
          const double fx = f(0.5 * (p[0] + q[0]) * h_, 0.5 * (p[1] + q[1]) * h_) * w;
          // basis value 1/2 at the two edge endpoints, 0 at the third vertex
          for (const auto& v : {p, q}) {
            if (v[0] <= 0 || v[1] <= 0 || v[0] >= n || v[1] >= n) continue;
            out[static_cast<std::size_t>((v[1] - 1) * side + (v[0] - 1))] += 0.5 * fx;
          }
        }
      }
    }
  }
  return out;
}

double FemSystem::evaluate(const Vec& values, double x, double y) const {
  require(values.size() == dof_count(), "FemSystem::evaluate: wrong vector length");
  auto at = [&](int i, int j) -> double {
    if (i <= 0 || i >= n_) return 0.0;
    if (dim_ == 1) return values[static_cast<std::size_t>(i - 1)];
    if (j <= 0 || j >= n_) return 0.0;
    return values[static_cast<std::size_t>((j - 1) * (n_ - 1) + (i - 1))];
  };
  const double sx = std::clamp(x, 0.0, 1.0) * n_;
  const int i = std::min(static_cast<int>(sx), n_ - 1);
  const double s = sx - i;
  if (dim_ == 1) return (1.0 - s) * at(i, 0) + s * at(i + 1, 0);
  const double sy = std::clamp(y, 0.0, 1.0) * n_;
  const int j = std::min(static_cast<int>(sy), n_ - 1);
  const double t = sy - j;
  if (s >= t) return (1.0 - s) * at(i, j) + (s - t) * at(i + 1, j) + t * at(i + 1, j + 1);
  return (1.0 - t) * at(i, j) + s * at(i + 1, j + 1) + (t - s) * at(i, j + 1);
}

Vec FemSystem::load_from(const FemSystem& finer, const Vec& fine_values) const {
  require(finer.dim_ == dim_, "load_from: dimension mismatch");
  require(fine_values.size() == finer.dof_count(), "load_from: wrong vector length");
  if (dim_ == 1) {
    std::vector<double> bp;
    for (const Point& p : finer.nodes_) bp.push_back(p.x);
    return load([&](double x) { return finer.evaluate(fine_values, x); }, bp);
  }
  require(finer.n_ % n_ == 0, "load_from: 2D meshes must be nested");
  // Every fine triangle sits inside one coarse triangle, so the midpoint rule
  // on the fine triangles integrates the quadratic product exactly.
  Vec out(dof_count(), 0.0);
  const int nf = finer.n_;
  const double w = 0.5 * finer.h_ * finer.h_ / 3.0;
  const int side = n_ - 1;
  for (int j = 0; j < nf; ++j) {
    for (int i = 0; i < nf; ++i) {
      for (const Tri& t : square_triangles(i, j)) {
        const double cx = (t[0][0] + t[1][0] + t[2][0]) / 3.0 * finer.h_;
        const double cy = (t[0][1] + t[1][1] + t[2][1]) / 3.0 * finer.h_;
        // coarse triangle containing the fine centroid
        const double sx = cx * n_, sy = cy * n_;
        const int ci = std::min(static_cast<int>(sx), n_ - 1);
        const int cj = std::min(static_cast<int>(sy), n_ - 1);
        const bool lower = (sx - ci) >= (sy - cj);
        const Tri ct = square_triangles(ci, cj)[lower ? 0 : 1];
        for (int e = 0; e < 3; ++e) {
          const auto& p = t[e];
          const auto& q = t[(e + 1) % 3];
          const double mx = 0.5 * (p[0] + q[0]) * finer.h_;
          const double my = 0.5 * (p[1] + q[1]) * finer.h_;
          const double fv = finer.evaluate(fine_values, mx, my) * w;
          // barycentric coordinates in the coarse triangle
          const double x0 = ct[0][0] * h_, y0 = ct[0][1] * h_;
          const double x1 = ct[1][0] * h_, y1 = ct[1][1] * h_;
          const double x2 = ct[2][0] * h_, y2 = ct[2][1] * h_;
          const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
          const double l1 = ((mx - x0) * (y2 - y0) - (x2 - x0) * (my - y0)) / det;
          const double l2 = ((x1 - x0) * (my - y0) - (mx - x0) * (y1 - y0)) / det;
          const std::array<double, 3> lam{1.0 - l1 - l2, l1, l2};
          for (int a = 0; a < 3; ++a) {
            const int vi = ct[a][0], vj = ct[a][1];
            if (vi <= 0 || vj <= 0 || vi >= n_ || vj >= n_) continue;
            out[static_cast<std::size_t>((vj - 1) * side + (vi - 1))] += lam[a] * fv;
          }
        }
      }
    }
  }
  return out;
}

double FemSystem::l2_inner(const Vec& u, const Vec& v) const {
  const Vec mv = mass_ * v;
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * mv[i];
  return s;
}

double FemSystem::l2_norm(const Vec& v) const { return std::sqrt(std::max(0.0, l2_inner(v, v))); }

}  // namespace dwave::fem
