#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hofer {

/// Largest supported real ambient dimension 2N. Fixed-capacity Eigen storage
/// keeps the per-point linear algebra off the heap.
inline constexpr int kMaxRealDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxRealDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                          kMaxRealDim, kMaxRealDim>;
using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

enum class ErrorKind {
  domain,
  invalid_diffeomorphism,
  not_almost_cylindrical,
  degenerate_splitting,
  acc3_violation,
  integration_failure,
  not_closed,
  not_converged,
  ill_posed_domain,
  geometry,
  region_too_shallow,
  no_tail_bound,
  validation,
  cannot_evaluate,
  config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Complex vectors are laid out as interleaved real pairs (x1, y1, x2, y2, ...).
Vec to_real(const CVec& z);
CVec to_complex(const Vec& x);

/// Matrix of multiplication by i on C^N in the interleaved real layout.
Mat complex_structure(int complex_dim);

/// Standard symplectic form sum dx_k ^ dy_k, i.e. <i a, b>.
double omega_standard(const Vec& a, const Vec& b);

/// Multiplication by i applied to a real-layout vector.
Vec times_i(const Vec& a);

}  // namespace hofer
