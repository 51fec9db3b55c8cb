#pragma once

#include "hofer/types.hpp"

#include <vector>

namespace hofer {

/// Polynomial in one complex variable, coefficients in ascending degree.
class ComplexPolynomial {
 public:
  ComplexPolynomial() = default;
  explicit ComplexPolynomial(CVec coeffs);

  static ComplexPolynomial monomial(int degree, Complex coeff = 1.0);

  const CVec& coeffs() const { return coeffs_; }
  int degree() const;  // -1 for the zero polynomial
  bool is_zero() const { return degree() < 0; }

  Complex operator()(Complex z) const;
  ComplexPolynomial derivative() const;

  /// Coefficients of z -> p(center + z).
  ComplexPolynomial shifted(Complex center) const;

  /// Smallest m with |p^{(m)}(z0)/m!| above `tol` (relative to the largest
  /// Taylor coefficient at z0). Zero polynomial returns -1.
  int vanishing_order(Complex z0, double tol = 1e-8) const;

  struct Root {
    Complex value;
    int multiplicity;
  };

  /// Roots with multiplicity. Clusters produced by the companion-matrix
  /// eigenvalues of multiple roots are merged and re-centred on a simple root
  /// of the appropriate derivative.
  std::vector<Root> roots() const;

 private:
  CVec coeffs_;
};

/// Map C -> C^N with polynomial components.
class PolynomialMap {
 public:
  PolynomialMap() = default;
  explicit PolynomialMap(std::vector<ComplexPolynomial> components);

  int complex_dim() const { return static_cast<int>(components_.size()); }
  const std::vector<ComplexPolynomial>& components() const { return components_; }

  CVec operator()(Complex z) const;
  CVec derivative(Complex z) const;
  PolynomialMap shifted(Complex center) const;
  bool is_zero() const;

 private:
  std::vector<ComplexPolynomial> components_;
  std::vector<ComplexPolynomial> derivatives_;
};

}  // namespace hofer
