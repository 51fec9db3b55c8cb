#pragma once

#include "hofer/types.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace hofer::numerics {

/// Seeded random stream. The engine is std::mt19937_64; the variate
/// transforms are spelled out so that samples are identical across standard
/// library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream for chunk `index` of a run seeded with `seed`.
  static Stream substream(std::uint64_t seed, std::uint64_t index);

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  Vec unit_vector(int dim);               // uniform on S^{dim-1}

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points (cached).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int order = 16);

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) with bisection; deterministic subdivision.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f,
                                  double a, double b, double abs_tol,
                                  double rel_tol, int max_depth = 30);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Root of f on [a, b] with f(a) f(b) <= 0 (Brent's method).
double find_root(const std::function<double(double)>& f, double a, double b,
                 double x_tol = 1e-14, int max_iter = 200);

/// Richardson-refined centered difference of f at x.
double derivative(const std::function<double(double)>& f, double x, double h);

/// Worker count used by parallel_for (default 1).
int default_jobs();
void set_default_jobs(int jobs);

/// Runs fn(0..count-1) on up to `jobs` threads. Each index must write only its
/// own output slot; callers merge in index order so results do not depend on
/// the worker count.
void parallel_for(int count, const std::function<void(int)>& fn, int jobs = default_jobs());

}  // namespace hofer::numerics
