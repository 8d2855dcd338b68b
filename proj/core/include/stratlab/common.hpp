#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace stratlab {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Scalar field a linear object lives over.
enum class Field { Real, Complex };

inline const char* field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

// Pinned numeric policy. Every tolerance in the library is one of these
// constants or an explicit argument of the operation that uses it; nothing is
// tuned per call site.
namespace tol {
inline constexpr double rank_rel = 1e-9;     // relative singular-value cutoff
inline constexpr double rank_gap = 1e3;      // kept/dropped ratio below this => inconclusive
inline constexpr double ortho = 1e-10;       // orthonormality slack on stored bases
inline constexpr double grass = 1e-8;        // subspace containment / distance slack
inline constexpr double fd = 1e-5;           // analytic vs central-difference Jacobian
inline constexpr double condition_a = 1e-6;  // containment slack for limit-tangent checks
inline constexpr double convergence = 1e-6;  // Cauchy slack for tangent sequences
inline constexpr double membership = 1e-9;   // scale-relative on-stratum residual
}  // namespace tol

// ---------------------------------------------------------------------------
// Errors

/// Base class for all failures raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define STRATLAB_DEFINE_ERROR(NAME)                         \
  class NAME : public Error {                               \
   public:                                                  \
    explicit NAME(const std::string& what) : Error(what) {} \
  }

STRATLAB_DEFINE_ERROR(InvalidOperands);
STRATLAB_DEFINE_ERROR(DimensionMismatch);
STRATLAB_DEFINE_ERROR(NotContained);
STRATLAB_DEFINE_ERROR(ChartMismatch);
STRATLAB_DEFINE_ERROR(DomainEscape);
STRATLAB_DEFINE_ERROR(NotOnStratum);
STRATLAB_DEFINE_ERROR(SingularPoint);
STRATLAB_DEFINE_ERROR(InfeasibleH);
STRATLAB_DEFINE_ERROR(NotAFault);
STRATLAB_DEFINE_ERROR(DimensionHypothesisViolated);
STRATLAB_DEFINE_ERROR(AlignmentFailure);
STRATLAB_DEFINE_ERROR(ConstructionContradiction);
STRATLAB_DEFINE_ERROR(SamplingFailure);
STRATLAB_DEFINE_ERROR(NonComplexSubspace);
STRATLAB_DEFINE_ERROR(NoncompactDomain);
STRATLAB_DEFINE_ERROR(MalformedInput);

#undef STRATLAB_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Boxes and sampling grids

/// Axis-aligned box. Bounds may be +-infinity on any side.
struct Box {
  Vec lo, hi;

  Box() = default;
  Box(Vec lo_, Vec hi_);

  int dim() const { return static_cast<int>(lo.size()); }
  bool bounded() const;
  /// Closed-bound membership with an additive slack per axis.
  bool contains(const Vec& z, double slack = 0.0) const;
  Vec center() const;     // requires bounded
  Vec halfwidth() const;  // requires bounded
  /// Same center, halfwidths scaled by `factor`. Requires bounded.
  Box scaled(double factor) const;
  /// Intersection with [-w, w]^dim; used to window unbounded domains.
  Box clipped(double w) const;

  static Box cube(int dim, double halfwidth);  // [-h, h]^dim
  static Box unbounded(int dim);
};

/// Tensor sampling grid over a bounded box: `points_per_axis` equally spaced
/// samples per axis, endpoints included. Enumeration is row-major with axis 0
/// outermost; grid reductions resolve ties toward the lowest linear index.
struct GridSpec {
  Box box;
  int points_per_axis = 401;

  GridSpec() = default;
  GridSpec(Box b, int pts) : box(std::move(b)), points_per_axis(pts) {}

  long total() const;
  Vec point(long index) const;
  std::vector<Vec> points() const;

  template <class F>
  void for_each(F&& f) const {
    const long n = total();
    for (long i = 0; i < n; ++i) f(point(i), i);
  }
};

// ---------------------------------------------------------------------------
// Deterministic randomness

/// 64-bit Mersenne Twister with hand-rolled variate transforms, so streams are
/// bit-identical across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }
  double uniform();  // [0, 1)
  double uniform(double a, double b);
  double normal();  // Box-Muller on the deterministic uniforms
  int uniform_int(int lo, int hi);  // inclusive bounds

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stratlab
