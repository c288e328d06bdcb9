#pragma once

// Dirichlet eigenbases of -Laplace and fields stored as modal coefficients.
//
//   Continuous1D        lambda_j = (j pi)^2, phi_j = sqrt(2) sin(j pi x)
//   Fem1D               closed-form eigenpairs of K v = lambda M v on a
//                       uniform mesh, eigenvectors normalized in the M inner
//                       product
//   Continuous2DTensor  2 sin(j pi x) sin(k pi y), lambda = (j^2 + k^2) pi^2,
//                       ascending with ties broken by (j, k)
//
// Modes are indexed from 0 in code and from 1 in files.

#include <functional>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "dwave/fem.hpp"

namespace dwave::spectral {

enum class BasisKind { Continuous1D, Fem1D, Continuous2DTensor };

class EigenBasis {
 public:
  static std::shared_ptr<const EigenBasis> continuous_1d(int count);
  /// count = 1/h - 1; throws unless 1/h is an integer >= 2.
  static std::shared_ptr<const EigenBasis> fem_1d(double h);
  static std::shared_ptr<const EigenBasis> continuous_2d(int count);

  BasisKind kind() const noexcept { return kind_; }
  int count() const noexcept { return static_cast<int>(lambda_.size()); }
  double mesh_width() const noexcept { return h_; }
  const std::vector<double>& eigenvalues() const noexcept { return lambda_; }
  double lambda(int j) const { return lambda_.at(static_cast<std::size_t>(j)); }

  /// Eigenfunction j at a point. For Fem1D this is the piecewise-linear
  /// interpolant of the normalized nodal vector.
  double eval(int j, double x, double y = 0.0) const;

  /// Fem1D: M-orthonormal nodal eigenvector over the interior nodes.
  std::vector<double> nodal_vector(int j) const;

  /// Continuous2DTensor: the (j, k) pair, both starting at 1.
  std::pair<int, int> tensor_index(int j) const { return tensor_.at(static_cast<std::size_t>(j)); }

 private:
  BasisKind kind_ = BasisKind::Continuous1D;
  double h_ = 0.0;
  std::vector<double> lambda_;
  std::vector<double> scale_;  // Fem1D normalization per mode
  std::vector<std::pair<int, int>> tensor_;
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

struct ModalField {
  BasisPtr basis;
  std::vector<double> coeffs;

  ModalField() = default;
  ModalField(BasisPtr b, std::vector<double> c);
  static ModalField zeros(BasisPtr b);

  /// Euclidean norm of the coefficients, equal to the L2 norm (Parseval).
  double l2_norm() const;
  /// (sum lambda_j^q c_j^2)^(1/2)
  double hq_norm(double q) const;
  double eval(double x, double y = 0.0) const;
};

/// Coefficients (f, phi_j). Continuous bases use composite Gauss-Legendre
/// with panel edges at the given breakpoints; Fem1D takes phi_j' load(f), the
/// modal coefficients of the L2 projection P_h f.
ModalField project_to_basis(const std::function<double(double)>& f, BasisPtr basis,
                            const std::vector<double>& breakpoints = {});
ModalField project_to_basis(const std::function<double(double, double)>& f, BasisPtr basis);

/// Fem1D only: coefficients of a nodal field, c_j = phi_j' M v.
ModalField project_nodal(const std::vector<double>& nodal, BasisPtr basis);
/// Fem1D only: sum_j c_j phi_j as interior nodal values.
std::vector<double> reconstruct_nodal(const ModalField& field);

/// Fem1D only: modal coefficients of a load vector (f, psi_i).
ModalField modal_from_load(const std::vector<double>& load, BasisPtr basis);

void write_csv(std::ostream& out, const ModalField& field);
/// Reads `j,lambda,coeff`; the basis must match the listed eigenvalues to
/// 1e-9 relative.
ModalField read_csv(std::istream& in, BasisPtr basis);

}  // namespace dwave::spectral
