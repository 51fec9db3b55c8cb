#include "hofer/types.hpp"

namespace hofer {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::invalid_diffeomorphism: return "invalid-diffeomorphism";
    case ErrorKind::not_almost_cylindrical: return "not-almost-cylindrical";
    case ErrorKind::degenerate_splitting: return "degenerate-splitting";
    case ErrorKind::acc3_violation: return "acc3-violation";
    case ErrorKind::integration_failure: return "integration-failure";
    case ErrorKind::not_closed: return "not-closed";
    case ErrorKind::not_converged: return "not-converged";
    case ErrorKind::ill_posed_domain: return "ill-posed-domain";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::region_too_shallow: return "region-too-shallow";
    case ErrorKind::no_tail_bound: return "no-tail-bound";
    case ErrorKind::validation: return "validation";
    case ErrorKind::cannot_evaluate: return "cannot-evaluate";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

Vec to_real(const CVec& z) {
  Vec x(2 * static_cast<int>(z.size()));
  for (std::size_t k = 0; k < z.size(); ++k) {
    x[2 * k] = z[k].real();
    x[2 * k + 1] = z[k].imag();
  }
  return x;
}

CVec to_complex(const Vec& x) {
  CVec z(static_cast<std::size_t>(x.size() / 2));
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = {x[2 * k], x[2 * k + 1]};
  return z;
}

Mat complex_structure(int complex_dim) {
  Mat m = Mat::Zero(2 * complex_dim, 2 * complex_dim);
  for (int k = 0; k < complex_dim; ++k) {
    m(2 * k + 1, 2 * k) = 1.0;
    m(2 * k, 2 * k + 1) = -1.0;
  }
  return m;
}

Vec times_i(const Vec& a) {
  Vec out(a.size());
  for (int k = 0; k + 1 < a.size(); k += 2) {
    out[k] = -a[k + 1];
    out[k + 1] = a[k];
  }
  return out;
}

double omega_standard(const Vec& a, const Vec& b) {
  double acc = 0.0;
  for (int k = 0; k + 1 < a.size(); k += 2) acc += a[k] * b[k + 1] - a[k + 1] * b[k];
  return acc;
}

}  // namespace hofer
