#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "dwave/error.hpp"
#include "dwave/spectral.hpp"

namespace dwave::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

// Composite 10-point Gauss-Legendre on [0, 1] with `panels` equal panels,
// additionally split at the breakpoints.
Rule composite_rule(int panels, const std::vector<double>& breakpoints) {
  using G = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> edges;
  for (int p = 0; p <= panels; ++p) edges.push_back(static_cast<double>(p) / panels);
  for (double b : breakpoints)
    if (b > 0.0 && b < 1.0) edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(), [](double a, double b) { return b - a < 1e-15; }), edges.end());
  Rule r;
  const auto& ab = G::abscissa();
  const auto& wt = G::weights();
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double mid = 0.5 * (edges[e] + edges[e + 1]);
    const double half = 0.5 * (edges[e + 1] - edges[e]);
    for (std::size_t k = 0; k < ab.size(); ++k) {
      if (ab[k] == 0.0) {
        r.x.push_back(mid);
        r.w.push_back(wt[k] * half);
        continue;
      }
      r.x.push_back(mid - ab[k] * half);
      r.w.push_back(wt[k] * half);
      r.x.push_back(mid + ab[k] * half);
      r.w.push_back(wt[k] * half);
    }
  }
  return r;
}

// sin(pi k / n) for k = 0 .. 2n-1
std::vector<double> sine_table(int n) {
  std::vector<double> t(static_cast<std::size_t>(2 * n));
  for (int k = 0; k < 2 * n; ++k) t[static_cast<std::size_t>(k)] = std::sin(kPi * k / n);
  return t;
}

void require_fem(const EigenBasis& b, const char* who) {
  require(b.kind() == BasisKind::Fem1D, std::string(who) + ": needs a Fem1D basis");
}

}  // namespace

std::shared_ptr<const EigenBasis> EigenBasis::continuous_1d(int count) {
  require(count >= 1, "continuous_1d: count must be positive");
  auto b = std::make_shared<EigenBasis>();
  b->kind_ = BasisKind::Continuous1D;
  for (int j = 1; j <= count; ++j) b->lambda_.push_back(kPi * kPi * j * j);
  return b;
}

std::shared_ptr<const EigenBasis> EigenBasis::fem_1d(double h) {
  const fem::FemSystem probe = fem::FemSystem::assemble(1, h);  // validates h
  auto b = std::make_shared<EigenBasis>();
  b->kind_ = BasisKind::Fem1D;
  b->h_ = probe.h();
  const int n = probe.intervals();
  for (int j = 1; j < n; ++j) {
    const double c = std::cos(kPi * j / n);
    b->lambda_.push_back(6.0 / (b->h_ * b->h_) * (1.0 - c) / (2.0 + c));
    b->scale_.push_back(std::sqrt(3.0 / (2.0 + c)));
  }
  return b;
}

std::shared_ptr<const EigenBasis> EigenBasis::continuous_2d(int count) {
  require(count >= 1, "continuous_2d: count must be positive");
  auto b = std::make_shared<EigenBasis>();
  b->kind_ = BasisKind::Continuous2DTensor;
  // all pairs with j^2 + k^2 up to a radius that surely holds `count` modes
  int kmax = 1;
  while (kmax * kmax * kPi / 4.0 < 2.0 * count + 8.0) ++kmax;
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j <= kmax; ++j)
    for (int k = 1; k <= kmax; ++k) pairs.emplace_back(j, k);
  std::sort(pairs.begin(), pairs.end(), [](const auto& p, const auto& q) {
    const int a = p.first * p.first + p.second * p.second;
    const int c = q.first * q.first + q.second * q.second;
    return a != c ? a < c : p < q;
  });
  pairs.resize(static_cast<std::size_t>(count));
  for (const auto& [j, k] : pairs) {
    b->lambda_.push_back(kPi * kPi * (j * j + k * k));
    b->tensor_.emplace_back(j, k);
  }
  return b;
}

double EigenBasis::eval(int j, double x, double y) const {
  require(j >= 0 && j < count(), "EigenBasis::eval: mode index out of range");
  switch (kind_) {
    case BasisKind::Continuous1D: return std::numbers::sqrt2 * std::sin((j + 1) * kPi * x);
    case BasisKind::Continuous2DTensor: {
      const auto [p, q] = tensor_[static_cast<std::size_t>(j)];
      return 2.0 * std::sin(p * kPi * x) * std::sin(q * kPi * y);
    }
    case BasisKind::Fem1D: {
      const int n = count() + 1;
      const double s = std::clamp(x, 0.0, 1.0) * n;
      const int i = std::min(static_cast<int>(s), n - 1);
      const double t = s - i;
      auto node = [&](int m) { return std::numbers::sqrt2 * scale_[static_cast<std::size_t>(j)] * std::sin((j + 1) * kPi * m / n); };
      return (1.0 - t) * node(i) + t * node(i + 1);
    }
  }
  return 0.0;
}

std::vector<double> EigenBasis::nodal_vector(int j) const {
  require_fem(*this, "nodal_vector");
  require(j >= 0 && j < count(), "nodal_vector: mode index out of range");
  const int n = count() + 1;
  std::vector<double> v(static_cast<std::size_t>(n - 1));
  const double s = std::numbers::sqrt2 * scale_[static_cast<std::size_t>(j)];
  for (int i = 1; i < n; ++i) v[static_cast<std::size_t>(i - 1)] = s * std::sin(kPi * ((j + 1) * i % (2 * n)) / n);
  return v;
}

ModalField::ModalField(BasisPtr b, std::vector<double> c) : basis(std::move(b)), coeffs(std::move(c)) {
  require(basis != nullptr, "ModalField: null basis");
  require(static_cast<int>(coeffs.size()) == basis->count(), "ModalField: coefficient count differs from basis size");
}

ModalField ModalField::zeros(BasisPtr b) {
  const auto n = static_cast<std::size_t>(b->count());
  return ModalField(std::move(b), std::vector<double>(n, 0.0));
}

double ModalField::l2_norm() const { return hq_norm(0.0); }

double ModalField::hq_norm(double q) const {
  double s = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) s += std::pow(basis->eigenvalues()[j], q) * coeffs[j] * coeffs[j];
  return std::sqrt(s);
}

double ModalField::eval(double x, double y) const {
  double s = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j)
    if (coeffs[j] != 0.0) s += coeffs[j] * basis->eval(static_cast<int>(j), x, y);
  return s;
}

ModalField project_to_basis(const std::function<double(double)>& f, BasisPtr basis,
                            const std::vector<double>& breakpoints) {
  require(basis != nullptr, "project_to_basis: null basis");
  const int J = basis->count();
  std::vector<double> c(static_cast<std::size_t>(J), 0.0);
  switch (basis->kind()) {
    case BasisKind::Continuous2DTensor: fail(ErrorCode::InvalidArgument, "project_to_basis: 1D function on a 2D basis");
    case BasisKind::Fem1D: {
      const fem::FemSystem sys = fem::FemSystem::assemble(1, basis->mesh_width());
      return modal_from_load(sys.load(f, breakpoints), basis);
    }
    case BasisKind::Continuous1D: {
      const Rule r = composite_rule(std::max(64, 2 * J), breakpoints);
      std::vector<double> fw(r.x.size());
      for (std::size_t q = 0; q < r.x.size(); ++q) fw[q] = f(r.x[q]) * r.w[q];
      for (int j = 0; j < J; ++j) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.x.size(); ++q) s += fw[q] * std::sin((j + 1) * kPi * r.x[q]);
        c[static_cast<std::size_t>(j)] = std::numbers::sqrt2 * s;
      }
      break;
    }
  }
  return ModalField(std::move(basis), std::move(c));
}

ModalField project_to_basis(const std::function<double(double, double)>& f, BasisPtr basis) {
  require(basis != nullptr, "project_to_basis: null basis");
  require(basis->kind() == BasisKind::Continuous2DTensor, "project_to_basis: 2D function needs a 2D basis");
  const int J = basis->count();
  int kmax = 1;
  for (int j = 0; j < J; ++j) kmax = std::max({kmax, basis->tensor_index(j).first, basis->tensor_index(j).second});
  const Rule r = composite_rule(std::max(16, 2 * kmax), {});
  const std::size_t Q = r.x.size();
  std::vector<double> fw(Q * Q);
  for (std::size_t p = 0; p < Q; ++p)
    for (std::size_t q = 0; q < Q; ++q) fw[p * Q + q] = f(r.x[p], r.x[q]) * r.w[p] * r.w[q];
  std::vector<double> c(static_cast<std::size_t>(J), 0.0);
  for (int j = 0; j < J; ++j) {
    const auto [m, k] = basis->tensor_index(j);
    std::vector<double> sx(Q), sy(Q);
    for (std::size_t p = 0; p < Q; ++p) {
      sx[p] = std::sin(m * kPi * r.x[p]);
      sy[p] = std::sin(k * kPi * r.x[p]);
    }
    double s = 0.0;
    for (std::size_t p = 0; p < Q; ++p) {
      double row = 0.0;
      for (std::size_t q = 0; q < Q; ++q) row += fw[p * Q + q] * sy[q];
      s += sx[p] * row;
    }
    c[static_cast<std::size_t>(j)] = 2.0 * s;
  }
  return ModalField(std::move(basis), std::move(c));
}

ModalField modal_from_load(const std::vector<double>& load, BasisPtr basis) {
  require(basis != nullptr, "modal_from_load: null basis");
  require_fem(*basis, "modal_from_load");
  const int J = basis->count();
  const int n = J + 1;
  require(static_cast<int>(load.size()) == J, "modal_from_load: dimension mismatch");
  const std::vector<double> tab = sine_table(n);
  std::vector<double> c(static_cast<std::size_t>(J));
  for (int j = 1; j <= J; ++j) {
    double s = 0.0;
    for (int i = 1; i < n; ++i) s += tab[static_cast<std::size_t>(j * i % (2 * n))] * load[static_cast<std::size_t>(i - 1)];
    const double cj = std::cos(kPi * j / n);
    c[static_cast<std::size_t>(j - 1)] = std::numbers::sqrt2 * std::sqrt(3.0 / (2.0 + cj)) * s;
  }
  return ModalField(std::move(basis), std::move(c));
}

ModalField project_nodal(const std::vector<double>& nodal, BasisPtr basis) {
  require(basis != nullptr, "project_nodal: null basis");
  require_fem(*basis, "project_nodal");
  require(static_cast<int>(nodal.size()) == basis->count(), "project_nodal: dimension mismatch");
  const fem::FemSystem sys = fem::FemSystem::assemble(1, basis->mesh_width());
  return modal_from_load(sys.mass() * nodal, std::move(basis));
}

std::vector<double> reconstruct_nodal(const ModalField& field) {
  require(field.basis != nullptr, "reconstruct_nodal: null basis");
  require_fem(*field.basis, "reconstruct_nodal");
  const int J = field.basis->count();
  const int n = J + 1;
  const std::vector<double> tab = sine_table(n);
  std::vector<double> scaled(static_cast<std::size_t>(J));
  for (int j = 1; j <= J; ++j)
    scaled[static_cast<std::size_t>(j - 1)] =
        std::numbers::sqrt2 * std::sqrt(3.0 / (2.0 + std::cos(kPi * j / n))) * field.coeffs[static_cast<std::size_t>(j - 1)];
  std::vector<double> v(static_cast<std::size_t>(J), 0.0);
  for (int i = 1; i < n; ++i) {
    double s = 0.0;
    for (int j = 1; j <= J; ++j) s += tab[static_cast<std::size_t>(j * i % (2 * n))] * scaled[static_cast<std::size_t>(j - 1)];
    v[static_cast<std::size_t>(i - 1)] = s;
  }
  return v;
}

void write_csv(std::ostream& out, const ModalField& field) {
  const auto old = out.precision(17);
  out << "j,lambda,coeff\n";
  for (std::size_t j = 0; j < field.coeffs.size(); ++j)
    out << j + 1 << ',' << field.basis->eigenvalues()[j] << ',' << field.coeffs[j] << '\n';
  out.precision(old);
}

ModalField read_csv(std::istream& in, BasisPtr basis) {
  require(basis != nullptr, "read_csv: null basis");
  std::string line;
  if (!std::getline(in, line) || line.rfind("j,lambda,coeff", 0) != 0)
    fail(ErrorCode::Io, "modal CSV: expected header 'j,lambda,coeff'");
  ModalField f = ModalField::zeros(basis);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      fail(ErrorCode::Io, "modal CSV: malformed row '" + line + "'");
    const int j = std::stoi(a);
    if (j < 1 || j > basis->count()) fail(ErrorCode::Io, "modal CSV: mode index out of range in '" + line + "'");
    const double lam = basis->lambda(j - 1);
    if (std::abs(std::stod(b) - lam) > 1e-9 * lam) fail(ErrorCode::Io, "modal CSV: eigenvalue does not match the basis");
    f.coeffs[static_cast<std::size_t>(j - 1)] = std::stod(c);
  }
  return f;
}

}  // namespace dwave::spectral
