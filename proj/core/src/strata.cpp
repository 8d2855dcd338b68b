#include "stratlab/strata.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace stratlab {
namespace {

constexpr double kProjResidual = 1e-10;   // accepted zero-set residual scale
constexpr double kSnap = 1e-8;            // open-face exclusion band
constexpr int kMaxSamples = 500;

template <typename Scalar>
using MatT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

Vec clip_to(const Box& b, Vec p) {
  for (int i = 0; i < p.size(); ++i) p(i) = std::clamp(p(i), b.lo(i), b.hi(i));
  return p;
}

/// Newton projection onto the zero set of g; returns success of the
/// residual criterion at the final iterate.
template <typename Scalar>
bool project_zero(const PolynomialMap& g, VecT<Scalar>& p) {
  for (int iter = 0; iter < 80; ++iter) {
    const VecT<Scalar> r = g.eval(p);
    if (r.norm() <= 1e-14 * (1.0 + p.norm())) break;
    MatT<Scalar> j = g.jacobian(p);
    Eigen::JacobiSVD<MatT<Scalar>> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const VecT<Scalar> delta = svd.solve(r);
    if (!delta.allFinite()) return false;
    p -= delta;
    if (delta.norm() <= 1e-15 * (1.0 + p.norm())) break;
  }
  return g.eval(p).norm() <= kProjResidual * (1.0 + p.norm());
}

bool region_holds(const std::vector<RegionInequality>& region, const Vec& y) {
  for (const auto& ineq : region) {
    const double v = ineq.poly.eval(y)(0);
    if (ineq.kind == RegionKind::Positive ? (v <= 0.0) : (v == 0.0)) return false;
  }
  return true;
}

/// Closure of the region: Positive relaxes to >= -slack, Nonzero drops.
bool region_closure_holds(const std::vector<RegionInequality>& region, const Vec& y,
                          double slack) {
  for (const auto& ineq : region) {
    if (ineq.kind != RegionKind::Positive) continue;
    if (ineq.poly.eval(y)(0) < -slack * (1.0 + y.norm())) return false;
  }
  return true;
}

template <typename Scalar>
MatT<Scalar> kernel_of(const MatT<Scalar>& j, int expected_dim) {
  if (j.rows() == 0) {  // full-dimensional stratum: nothing is constrained
    if (expected_dim != j.cols()) throw SingularPoint("empty constraint with partial dim");
    return MatT<Scalar>::Identity(j.cols(), j.cols());
  }
  Eigen::JacobiSVD<MatT<Scalar>> svd(j, Eigen::ComputeFullV);
  const auto rd = rank_decide(svd.singularValues());
  const int n = static_cast<int>(j.cols());
  if (!rd.conclusive || n - rd.rank != expected_dim) {
    throw SingularPoint("constraint rank does not cut out the declared dimension");
  }
  return svd.matrixV().rightCols(expected_dim);
}

struct ParamFit {
  Vec param;
  double resid = std::numeric_limits<double>::infinity();
  bool stationary = false;
};

/// Damped least-squares descent of |psi(p) - y| over the closed box.
ParamFit fit_parameter(const ParametricRepr& pr, const Vec& y, const Vec& seed) {
  const Box& box = pr.param_box;
  ParamFit out;
  Vec p = clip_to(box, seed);
  auto resid_at = [&](const Vec& q) { return (pr.immersion.eval(q) - y).norm(); };
  double r = resid_at(p);
  double mu = 1e-10;
  const int d = pr.immersion.source_dim();
  for (int iter = 0; iter < 120; ++iter) {
    const Mat j = pr.immersion.jacobian(p);
    const Vec g = j.transpose() * (pr.immersion.eval(p) - y);
    bool moved = false;
    double step = 0.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
      const Mat a = j.transpose() * j + mu * Mat::Identity(d, d);
      const Vec delta = a.ldlt().solve(-g);
      const Vec cand = clip_to(box, p + delta);
      const double rc = resid_at(cand);
      if (rc < r - 1e-16) {
        step = (cand - p).norm();
        p = cand;
        r = rc;
        mu = std::max(mu * 0.25, 1e-12);
        moved = true;
        break;
      }
      mu *= 8.0;
    }
    if (!moved || step <= 1e-13 * (1.0 + p.norm())) break;
  }
  // First-order test with box faces treated as blocking constraints.
  const Mat j = pr.immersion.jacobian(p);
  Vec g = j.transpose() * (pr.immersion.eval(p) - y);
  for (int i = 0; i < d; ++i) {
    const double edge = 1e-12 * (1.0 + std::abs(p(i)));
    if (p(i) - box.lo(i) <= edge && g(i) > 0.0) g(i) = 0.0;
    if (box.hi(i) - p(i) <= edge && g(i) < 0.0) g(i) = 0.0;
  }
  out.param = p;
  out.resid = r;
  out.stationary = g.norm() <= tol::convergence * (1.0 + r);
  return out;
}

bool interior_parameter(const ParametricRepr& pr, const Vec& p) {
  for (int i = 0; i < p.size(); ++i) {
    const double snap = kSnap * (1.0 + std::abs(p(i)));
    if (pr.lo_open[static_cast<std::size_t>(i)] && p(i) <= pr.param_box.lo(i) + snap)
      return false;
    if (pr.hi_open[static_cast<std::size_t>(i)] && p(i) >= pr.param_box.hi(i) - snap)
      return false;
  }
  return true;
}

int default_axis_count(int dims, bool dense) {
  if (dims <= 1) return dense ? 33 : 21;
  if (dims == 2) return dense ? 9 : 7;
  if (dims == 3) return 5;
  return 3;
}

std::vector<Vec> parameter_seeds(const ParametricRepr& pr) {
  const int d = pr.immersion.source_dim();
  GridSpec grid{pr.param_box, default_axis_count(d, false)};
  std::vector<Vec> seeds = grid.points();
  seeds.push_back(pr.param_box.center());
  return seeds;
}

std::vector<ParamFit> fit_all(const ParametricRepr& pr, const Vec& y) {
  std::vector<ParamFit> fits;
  for (const Vec& seed : parameter_seeds(pr)) fits.push_back(fit_parameter(pr, y, seed));
  std::sort(fits.begin(), fits.end(),
            [](const ParamFit& a, const ParamFit& b) { return a.resid < b.resid; });
  return fits;
}

/// Best interior preimage with an acceptable residual, if any.
std::optional<Vec> interior_preimage(const ParametricRepr& pr, const Vec& y, double tol) {
  for (const ParamFit& fit : fit_all(pr, y)) {
    if (fit.resid > tol * (1.0 + y.norm())) break;  // sorted: none left
    if (interior_parameter(pr, fit.param)) return fit.param;
  }
  return std::nullopt;
}

template <typename Scalar>
void dedupe_and_cap(std::vector<VecT<Scalar>>& pts) {
  std::vector<VecT<Scalar>> keep;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& q : keep) {
      if ((p - q).norm() <= 1e-6 * (1.0 + q.norm())) {
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(p);
    if (static_cast<int>(keep.size()) >= kMaxSamples) break;
  }
  pts = std::move(keep);
}

std::vector<CVec> complex_sample_points(const Stratum& s, int points_per_axis) {
  const auto& ir = s.implicit_repr();
  const int n = s.ambient_dim();
  GridSpec grid{s.sample_box(), points_per_axis > 0 ? points_per_axis
                                                    : default_axis_count(n, false)};
  std::vector<CVec> out;
  grid.for_each([&](const Vec& seed, std::int64_t) {
    CVec p = seed.cast<Complex>();
    if (project_zero<Complex>(ir.constraint, p)) out.push_back(p);
  });
  dedupe_and_cap(out);
  return out;
}

}  // namespace

const char* membership_name(Membership m) {
  switch (m) {
    case Membership::Yes: return "yes";
    case Membership::No: return "no";
    default: return "inconclusive";
  }
}

Stratum::Stratum(std::string name, int ambient_dim, int dim, Field field, ImplicitRepr repr,
                 std::optional<Box> sample_box)
    : name_(std::move(name)),
      n_(ambient_dim),
      d_(dim),
      field_(field),
      repr_(std::move(repr)),
      sample_box_(sample_box ? *sample_box : Box::cube(ambient_dim, 4.0)) {
  const auto& ir = std::get<ImplicitRepr>(repr_);
  if (d_ < 0 || d_ > n_) throw InvalidOperands("stratum dimension outside [0, ambient]");
  if (ir.constraint.source_dim() != n_ || ir.constraint.target_dim() != n_ - d_) {
    throw DimensionMismatch("constraint map must send ambient to ambient - dim");
  }
  if (ir.constraint.field() != field_) throw InvalidOperands("constraint field mismatch");
  if (field_ == Field::Complex && !ir.region.empty()) {
    throw InvalidOperands("region inequalities are a real-field feature");
  }
  for (const auto& ineq : ir.region) {
    if (ineq.poly.source_dim() != n_ || ineq.poly.target_dim() != 1 ||
        ineq.poly.field() != Field::Real) {
      throw DimensionMismatch("region inequality must be scalar on the ambient space");
    }
  }
}

Stratum::Stratum(std::string name, int ambient_dim, int dim, ParametricRepr repr,
                 std::optional<Box> sample_box)
    : name_(std::move(name)),
      n_(ambient_dim),
      d_(dim),
      field_(Field::Real),
      repr_(std::move(repr)),
      sample_box_(sample_box ? *sample_box : Box::cube(ambient_dim, 4.0)) {
  const auto& pr = std::get<ParametricRepr>(repr_);
  if (d_ <= 0 || d_ > n_) throw InvalidOperands("parametric stratum dimension outside (0, ambient]");
  if (pr.immersion.source_dim() != d_ || pr.immersion.target_dim() != n_) {
    throw DimensionMismatch("immersion must send the parameter space to the ambient space");
  }
  if (pr.immersion.field() != Field::Real) throw InvalidOperands("parametric strata are real");
  if (pr.param_box.dim() != d_ || !pr.param_box.bounded()) {
    throw InvalidOperands("parameter box must be bounded with one axis per dimension");
  }
  if (static_cast<int>(pr.lo_open.size()) != d_ || static_cast<int>(pr.hi_open.size()) != d_) {
    throw DimensionMismatch("open-face flags need one entry per parameter axis");
  }
}

Stratum Stratum::linear(std::string name, const CVec& base, const Subspace& directions) {
  const int n = directions.ambient_dim();
  if (base.size() != n) throw DimensionMismatch("base point dimension mismatch");
  const Field field = directions.field();
  const Subspace normal = complement_within(directions, Subspace::full(field, n));
  const CMat rows = normal.basis().adjoint();
  const CVec offset = -(rows * base);
  ImplicitRepr repr{PolynomialMap::affine(field, rows, offset), {}};
  return Stratum(std::move(name), n, directions.dim(), field, std::move(repr));
}

const ImplicitRepr& Stratum::implicit_repr() const {
  if (!is_implicit()) throw InvalidOperands("stratum is parametric");
  return std::get<ImplicitRepr>(repr_);
}

const ParametricRepr& Stratum::parametric_repr() const {
  if (is_implicit()) throw InvalidOperands("stratum is implicit");
  return std::get<ParametricRepr>(repr_);
}

int Stratification::min_dim() const {
  if (strata.empty()) return ambient_dim;  // vacuous: codimension 0
  int r = strata.front().dim();
  for (const auto& s : strata) r = std::min(r, s.dim());
  return r;
}

Membership membership(const Stratum& s, const Vec& y, double tol) {
  if (s.field() != Field::Real) throw InvalidOperands("real query on a complex stratum");
  if (y.size() != s.ambient_dim()) throw DimensionMismatch("membership query dimension");
  if (s.is_implicit()) {
    const auto& ir = s.implicit_repr();
    if (ir.constraint.eval(y).norm() > tol * (1.0 + y.norm())) return Membership::No;
    return region_holds(ir.region, y) ? Membership::Yes : Membership::No;
  }
  const auto& pr = s.parametric_repr();
  const auto fits = fit_all(pr, y);
  const ParamFit& best = fits.front();
  if (best.resid <= tol * (1.0 + y.norm())) {
    for (const ParamFit& fit : fits) {
      if (fit.resid > tol * (1.0 + y.norm())) break;
      if (interior_parameter(pr, fit.param)) return Membership::Yes;
    }
    return Membership::No;  // reachable only through excluded faces
  }
  bool settled = false;
  for (const ParamFit& fit : fits) settled = settled || fit.stationary;
  return settled ? Membership::No : Membership::Inconclusive;
}

Membership membership(const Stratum& s, const CVec& y, double tol) {
  if (s.field() != Field::Complex) throw InvalidOperands("complex query on a real stratum");
  if (y.size() != s.ambient_dim()) throw DimensionMismatch("membership query dimension");
  const auto& ir = s.implicit_repr();
  return ir.constraint.eval(y).norm() <= tol * (1.0 + y.norm()) ? Membership::Yes
                                                                : Membership::No;
}

bool on_stratum(const Stratum& s, const Vec& y, double tol) {
  return membership(s, y, tol) == Membership::Yes;
}

Subspace tangent_at(const Stratum& s, const Vec& y) {
  if (membership(s, y) != Membership::Yes) {
    throw NotOnStratum("tangent requested off the stratum: " + s.name());
  }
  if (s.is_implicit()) {
    const Mat j = s.implicit_repr().constraint.jacobian(y);
    const Mat kernel = kernel_of<double>(j, s.dim());
    return Subspace(Field::Real, kernel.cast<Complex>());
  }
  const auto& pr = s.parametric_repr();
  const auto p = interior_preimage(pr, y, tol::membership);
  if (!p) throw NotOnStratum("no interior preimage found: " + s.name());
  const Mat j = pr.immersion.jacobian(*p);
  const auto span = Subspace::from_span_real(j);
  if (span.dim() != s.dim()) throw SingularPoint("immersion rank drop at preimage");
  return span;
}

Subspace tangent_at(const Stratum& s, const CVec& y) {
  if (membership(s, y) != Membership::Yes) {
    throw NotOnStratum("tangent requested off the stratum: " + s.name());
  }
  const CMat j = s.implicit_repr().constraint.jacobian(y);
  return Subspace(Field::Complex, kernel_of<Complex>(j, s.dim()));
}

ProjectionResult nearest_point(const Stratum& s, const Vec& y) {
  if (s.field() != Field::Real) throw InvalidOperands("real query on a complex stratum");
  ProjectionResult out;
  out.point = y;
  if (!s.is_implicit()) {
    const auto& pr = s.parametric_repr();
    const auto fits = fit_all(pr, y);
    const ParamFit& best = fits.front();
    out.point = pr.immersion.eval(best.param);
    out.distance = best.resid;
    for (const ParamFit& fit : fits) out.converged = out.converged || fit.stationary;
    out.converged = out.converged || best.resid <= kProjResidual * (1.0 + y.norm());
    return out;
  }
  const auto& ir = s.implicit_repr();
  const double slack = tol::membership;
  std::vector<Vec> candidates;
  auto try_seed = [&](Vec seed) {
    if (project_zero<double>(ir.constraint, seed) &&
        region_closure_holds(ir.region, seed, slack)) {
      candidates.push_back(seed);
    }
  };
  try_seed(y);
  GridSpec grid{s.sample_box(), default_axis_count(s.ambient_dim(), false)};
  grid.for_each([&](const Vec& seed, std::int64_t) { try_seed(seed); });
  if (candidates.empty()) return out;  // non-certificate: converged stays false
  Vec p = candidates.front();
  for (const Vec& c : candidates) {
    if ((c - y).norm() < (p - y).norm()) p = c;
  }
  // Tangential descent of the distance along the zero set.
  double best = (p - y).norm();
  for (int outer = 0; outer < 60; ++outer) {
    Mat kernel;
    try {
      kernel = kernel_of<double>(ir.constraint.jacobian(p), s.dim());
    } catch (const SingularPoint&) {
      break;
    }
    const Vec dir = kernel * (kernel.transpose() * (y - p));
    if (dir.norm() <= 1e-12 * (1.0 + y.norm())) break;
    bool improved = false;
    for (double alpha = 1.0; alpha > 1e-8; alpha *= 0.5) {
      Vec cand = p + alpha * dir;
      if (!project_zero<double>(ir.constraint, cand)) continue;
      if (!region_closure_holds(ir.region, cand, slack)) continue;
      if ((cand - y).norm() < best - 1e-16) {
        p = cand;
        best = (cand - y).norm();
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  out.point = p;
  out.distance = best;
  out.converged = true;
  return out;
}

double nearest_distance(const Stratum& s, const Vec& y) {
  return nearest_point(s, y).distance;
}

std::vector<Vec> sample_points(const Stratum& s, int points_per_axis) {
  if (s.field() != Field::Real) throw InvalidOperands("real samples of a complex stratum");
  std::vector<Vec> out;
  if (!s.is_implicit()) {
    const auto& pr = s.parametric_repr();
    GridSpec grid{pr.param_box, points_per_axis > 0 ? points_per_axis
                                                    : default_axis_count(s.dim(), true)};
    grid.for_each([&](const Vec& p, std::int64_t) {
      if (interior_parameter(pr, p)) out.push_back(pr.immersion.eval(p));
    });
    dedupe_and_cap(out);
    return out;
  }
  const auto& ir = s.implicit_repr();
  GridSpec grid{s.sample_box(), points_per_axis > 0
                                    ? points_per_axis
                                    : default_axis_count(s.ambient_dim(), false)};
  grid.for_each([&](const Vec& seed, std::int64_t) {
    Vec p = seed;
    if (project_zero<double>(ir.constraint, p) && region_holds(ir.region, p)) {
      out.push_back(p);
    }
  });
  dedupe_and_cap(out);
  return out;
}

StratificationReport validate(const Stratification& sigma, int points_per_axis) {
  StratificationReport report;
  report.min_dim = sigma.min_dim();
  const bool complex = sigma.field == Field::Complex;

  std::vector<std::vector<Vec>> samples;
  std::vector<std::vector<CVec>> csamples;
  for (const Stratum& s : sigma.strata) {
    if (complex) {
      csamples.push_back(complex_sample_points(s, points_per_axis));
    } else {
      samples.push_back(sample_points(s, points_per_axis));
    }
  }

  // Defining-rank checks at the samples.
  for (std::size_t i = 0; i < sigma.strata.size(); ++i) {
    const Stratum& s = sigma.strata[i];
    auto check_rank = [&](const Mat& j, int expected, const Vec& where) {
      const auto rd = numeric_rank(j);
      if (!rd.conclusive || rd.rank != expected) {
        if (report.rank_failures.size() < 100) report.rank_failures.push_back({s.name(), where});
      }
    };
    if (s.is_implicit()) {
      if (complex) {
        for (const CVec& p : csamples[i]) {
          const auto rd = numeric_rank(s.implicit_repr().constraint.jacobian(p).eval());
          if (!rd.conclusive || rd.rank != s.codim()) {
            if (report.rank_failures.size() < 100) {
              report.rank_failures.push_back({s.name(), p.real()});
            }
          }
        }
      } else {
        for (const Vec& p : samples[i]) {
          check_rank(s.implicit_repr().constraint.jacobian(p), s.codim(), p);
        }
      }
    } else {
      const auto& pr = s.parametric_repr();
      GridSpec grid{pr.param_box, default_axis_count(s.dim(), true)};
      grid.for_each([&](const Vec& p, std::int64_t) {
        check_rank(pr.immersion.jacobian(p), s.dim(), p);
      });
    }
  }

  // Pairwise disjointness on each stratum's own samples.
  for (std::size_t i = 0; i < sigma.strata.size(); ++i) {
    for (std::size_t j = 0; j < sigma.strata.size(); ++j) {
      if (i == j) continue;
      if (complex) {
        for (const CVec& p : csamples[i]) {
          if (membership(sigma.strata[j], p) == Membership::Yes &&
              report.overlaps.size() < 100) {
            report.overlaps.push_back({p.real(), sigma.strata[i].name(), sigma.strata[j].name()});
          }
        }
      } else {
        for (const Vec& p : samples[i]) {
          if (membership(sigma.strata[j], p) == Membership::Yes &&
              report.overlaps.size() < 100) {
            report.overlaps.push_back({p, sigma.strata[i].name(), sigma.strata[j].name()});
          }
        }
      }
    }
  }

  // Closure spot check: limits through open parameter faces must land on
  // some stratum when the union is declared closed.
  if (sigma.union_closed && !complex) {
    for (const Stratum& s : sigma.strata) {
      if (s.is_implicit()) continue;
      const auto& pr = s.parametric_repr();
      const int d = s.dim();
      auto probe_face = [&](int axis, double value) {
        GridSpec grid{pr.param_box, std::max(3, default_axis_count(d, true) / 2)};
        grid.for_each([&](const Vec& p0, std::int64_t) {
          Vec p = p0;
          p(axis) = value;
          const Vec limit = pr.immersion.eval(p);
          for (const Stratum& t : sigma.strata) {
            if (membership(t, limit) == Membership::Yes) return;
          }
          if (report.escaped_limits.size() < 50) report.escaped_limits.push_back(limit);
        });
      };
      for (int axis = 0; axis < d; ++axis) {
        if (pr.lo_open[static_cast<std::size_t>(axis)]) probe_face(axis, pr.param_box.lo(axis));
        if (pr.hi_open[static_cast<std::size_t>(axis)]) probe_face(axis, pr.param_box.hi(axis));
      }
    }
  }

  report.valid = report.overlaps.empty() && report.rank_failures.empty() &&
                 report.escaped_limits.empty();
  return report;
}

}  // namespace stratlab
