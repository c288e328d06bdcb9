#pragma once

// Piecewise-linear finite elements on (0,1) and on the unit square with
// homogeneous Dirichlet data. Only interior nodes carry degrees of freedom.
// The 2D mesh splits every grid square along the diagonal from (i, j) to
// (i+1, j+1).

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace dwave::fem {

using Vec = std::vector<double>;

class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> cols, Vec values);

  std::size_t size() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  /// y = A x
  void multiply(const Vec& x, Vec& y) const;
  Vec operator*(const Vec& x) const;
  double at(std::size_t i, std::size_t j) const;
  Vec diagonal() const;

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& cols() const noexcept { return cols_; }
  const Vec& values() const noexcept { return values_; }

  /// One "i j value" line per stored entry, 0-based.
  void write_coordinate(std::ostream& out) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  Vec values_;
};

/// a*A + b*B on the union pattern.
CsrMatrix combine(double a, const CsrMatrix& A, double b, const CsrMatrix& B);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Function1D = std::function<double(double)>;
using Function2D = std::function<double(double, double)>;

class FemSystem {
 public:
  /// Requires 1/h to be an integer >= 2 (within 1e-9); dim is 1 or 2.
  static FemSystem assemble(int dim, double h);

  int dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }
  /// Number of mesh intervals per side, 1/h.
  int intervals() const noexcept { return n_; }
  std::size_t dof_count() const noexcept { return nodes_.size(); }
  const CsrMatrix& mass() const noexcept { return mass_; }
  const CsrMatrix& stiffness() const noexcept { return stiffness_; }
  const std::vector<Point>& nodes() const noexcept { return nodes_; }

  /// Load vector (f, phi_i). Each 1D element is split at the given
  /// breakpoints before 2-point Gauss quadrature; triangles use the 3-point
  /// edge-midpoint rule.
  Vec load(const Function1D& f, const std::vector<double>& breakpoints = {}) const;
  Vec load(const Function2D& f) const;

  /// Finite element function with these interior nodal values, at a point.
  double evaluate(const Vec& values, double x, double y = 0.0) const;

  /// Load of a finite element function given on a finer mesh, exact for the
  /// product of the two piecewise-linear functions. In 2D the finer mesh must
  /// be nested (its interval count a multiple of this one's).
  Vec load_from(const FemSystem& finer, const Vec& fine_values) const;

  /// sqrt(v' M v) and (u, v) = u' M v
  double l2_norm(const Vec& v) const;
  double l2_inner(const Vec& u, const Vec& v) const;

 private:
  int dim_ = 1;
  double h_ = 0.5;
  int n_ = 2;
  CsrMatrix mass_;
  CsrMatrix stiffness_;
  std::vector<Point> nodes_;
};

using LinearOperator = std::function<void(const Vec& x, Vec& y)>;

enum class SolveStatus { Converged, MaxIterations, Breakdown };

std::string to_string(SolveStatus s);

struct SolveReport {
  Vec x;
  int iterations = 0;
  double relative_residual = 0.0;
  SolveStatus status = SolveStatus::Converged;
};

/// Jacobi-preconditioned conjugate gradients from the initial guess x0 (zero
/// if empty). Stops when ||r|| <= tol ||rhs||.
SolveReport cg(const LinearOperator& apply, const Vec& rhs, const Vec& inv_diag, double tol, int max_iter,
               const Vec& x0 = {});
SolveReport cg(const CsrMatrix& A, const Vec& rhs, double tol, int max_iter, const Vec& x0 = {});

/// Unpreconditioned BiCGStab from a zero initial guess. A breakdown
/// (rho or <r0, v> vanishing) is reported as such, not as MaxIterations.
SolveReport bicgstab(const LinearOperator& apply, const Vec& rhs, double tol, int max_iter);

/// Solves M x = load(f).
Vec l2_project(const Function1D& f, const FemSystem& sys, const std::vector<double>& breakpoints = {});
Vec l2_project(const Function2D& f, const FemSystem& sys);

/// Ritz projection of v, given -Laplace(v): solves K x = (-Laplace v, phi_i).
Vec ritz_project(const Function1D& minus_laplacian, const FemSystem& sys);
Vec ritz_project(const Function2D& minus_laplacian, const FemSystem& sys);

/// Nodal interpolant at interior nodes.
Vec interpolate(const Function1D& f, const FemSystem& sys);
Vec interpolate(const Function2D& f, const FemSystem& sys);

}  // namespace dwave::fem
