#include "hofer/polynomial.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace hofer {

ComplexPolynomial::ComplexPolynomial(CVec coeffs) : coeffs_(std::move(coeffs)) {}

ComplexPolynomial ComplexPolynomial::monomial(int degree, Complex coeff) {
  CVec c(static_cast<std::size_t>(degree) + 1, 0.0);
  c.back() = coeff;
  return ComplexPolynomial(std::move(c));
}

int ComplexPolynomial::degree() const {
  for (int d = static_cast<int>(coeffs_.size()) - 1; d >= 0; --d)
    if (coeffs_[d] != Complex(0.0)) return d;
  return -1;
}

Complex ComplexPolynomial::operator()(Complex z) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

ComplexPolynomial ComplexPolynomial::derivative() const {
  if (coeffs_.size() <= 1) return ComplexPolynomial(CVec{0.0});
  CVec d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
  return ComplexPolynomial(std::move(d));
}

ComplexPolynomial ComplexPolynomial::shifted(Complex center) const {
  // repeated synthetic division (Horner's Taylor shift)
  CVec c = coeffs_;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = n - 1; j > i; --j) c[j - 1] += center * c[j];
  return ComplexPolynomial(std::move(c));
}

int ComplexPolynomial::vanishing_order(Complex z0, double tol) const {
  if (is_zero()) return -1;
  const CVec taylor = shifted(z0).coeffs();
  double scale = 0.0;
  for (const Complex& c : taylor) scale = std::max(scale, std::abs(c));
  for (std::size_t m = 0; m < taylor.size(); ++m)
    if (std::abs(taylor[m]) > tol * scale) return static_cast<int>(m);
  return -1;
}

namespace {

Complex newton_polish(const ComplexPolynomial& p, Complex z) {
  const ComplexPolynomial dp = p.derivative();
  for (int iter = 0; iter < 50; ++iter) {
    const Complex d = dp(z);
    if (d == Complex(0.0)) break;
    const Complex step = p(z) / d;
    z -= step;
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(z))) break;
  }
  return z;
}

}  // namespace

std::vector<ComplexPolynomial::Root> ComplexPolynomial::roots() const {
  std::vector<Root> out;
  const int deg = degree();
  if (deg <= 0) return out;

  // exact zeros at the origin from vanishing low-order coefficients
  int low = 0;
  while (low <= deg && coeffs_[low] == Complex(0.0)) ++low;
  if (low > 0) out.push_back({0.0, low});
  const int reduced = deg - low;
  if (reduced == 0) return out;

  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(reduced, reduced);
  const Complex lead = coeffs_[deg];
  for (int i = 0; i < reduced; ++i) companion(0, i) = -coeffs_[deg - 1 - i] / lead;
  for (int i = 1; i < reduced; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<Complex> raw(reduced);
  for (int i = 0; i < reduced; ++i) raw[i] = solver.eigenvalues()[i];

  double scale = 0.0;
  for (const Complex& r : raw) scale = std::max(scale, std::abs(r));
  const double cluster_radius = 1e-4 * std::max(1.0, scale);

  std::vector<bool> used(raw.size(), false);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    std::vector<Complex> cluster{raw[i]};
    used[i] = true;
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      if (!used[j] && std::abs(raw[j] - raw[i]) < cluster_radius) {
        cluster.push_back(raw[j]);
        used[j] = true;
      }
    }
    Complex center = 0.0;
    for (const Complex& c : cluster) center += c;
    center /= static_cast<double>(cluster.size());
    const int mult = static_cast<int>(cluster.size());
    ComplexPolynomial q = *this;
    for (int m = 1; m < mult; ++m) q = q.derivative();
    center = newton_polish(q, center);
    out.push_back({center, mult});
  }
  std::sort(out.begin(), out.end(), [](const Root& a, const Root& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

PolynomialMap::PolynomialMap(std::vector<ComplexPolynomial> components)
    : components_(std::move(components)) {
  derivatives_.reserve(components_.size());
  for (const auto& c : components_) derivatives_.push_back(c.derivative());
}

CVec PolynomialMap::operator()(Complex z) const {
  CVec out(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) out[k] = components_[k](z);
  return out;
}

CVec PolynomialMap::derivative(Complex z) const {
  CVec out(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) out[k] = derivatives_[k](z);
  return out;
}

PolynomialMap PolynomialMap::shifted(Complex center) const {
  std::vector<ComplexPolynomial> s;
  s.reserve(components_.size());
  for (const auto& c : components_) s.push_back(c.shifted(center));
  return PolynomialMap(std::move(s));
}

bool PolynomialMap::is_zero() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ComplexPolynomial& p) { return p.is_zero(); });
}

}  // namespace hofer
