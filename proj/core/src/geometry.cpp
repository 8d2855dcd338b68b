#include "stratlab/geometry.hpp"

#include <cmath>

namespace stratlab {
namespace {

// exp(-1/t) for t > 0, extended by 0; smooth at 0 with all derivatives 0.
double sigma(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double sigma_prime(double t) {
  if (t <= 0.0) return 0.0;
  const double e = std::exp(-1.0 / t);
  return e / (t * t);
}

// Smoothstep on [0, 1]: 0 at u <= 0, 1 at u >= 1.
double smoothstep(double u) {
  const double g = sigma(u), h = sigma(1.0 - u);
  if (g == 0.0) return 0.0;
  if (h == 0.0) return 1.0;
  return g / (g + h);
}

double smoothstep_prime(double u) {
  const double g = sigma(u), h = sigma(1.0 - u);
  if (g == 0.0 || h == 0.0) return 0.0;
  const double gp = sigma_prime(u), hp = sigma_prime(1.0 - u);
  const double den = (g + h) * (g + h);
  // d/du [g/(g+h)] with h = h(1-u): quotient rule, h' = -hp.
  return (gp * h + g * hp) / den;
}

}  // namespace

DifferentiableMap::DifferentiableMap(int source_dim, int target_dim, Evaluator eval, Jacobian jac,
                                     std::string description, std::optional<Box> domain,
                                     std::optional<Box> test_box)
    : m_(source_dim),
      n_(target_dim),
      eval_(std::move(eval)),
      jac_(std::move(jac)),
      description_(std::move(description)),
      domain_(std::move(domain)),
      test_box_(std::move(test_box)) {
  if (m_ < 0 || n_ < 0) throw InvalidOperands("map with negative dimension");
  if (!eval_) throw InvalidOperands("map without an evaluator");
  if (domain_ && domain_->dim() != m_) throw InvalidOperands("map domain dimension mismatch");
}

Vec DifferentiableMap::operator()(const Vec& z) const {
  if (z.size() != m_) throw DimensionMismatch("map applied to a point of wrong dimension");
  if (domain_ && !domain_->contains(z)) {
    throw DomainEscape("evaluation outside the declared domain: " + description_);
  }
  Vec out = eval_(z);
  if (out.size() != n_) throw DimensionMismatch("evaluator returned wrong target dimension");
  return out;
}

Mat DifferentiableMap::jacobian(const Vec& z) const {
  if (z.size() != m_) throw DimensionMismatch("Jacobian requested at a point of wrong dimension");
  if (domain_ && !domain_->contains(z)) {
    throw DomainEscape("Jacobian outside the declared domain: " + description_);
  }
  if (jac_) {
    Mat out = jac_(z);
    if (out.rows() != n_ || out.cols() != m_) {
      throw DimensionMismatch("Jacobian callback returned wrong shape");
    }
    return out;
  }
  return fd_jacobian(eval_, n_, z, domain_);
}

DifferentiableMap DifferentiableMap::with_domain(Box domain) const {
  DifferentiableMap out = *this;
  if (domain.dim() != m_) throw InvalidOperands("map domain dimension mismatch");
  out.domain_ = std::move(domain);
  return out;
}

DifferentiableMap DifferentiableMap::with_test_box(Box box) const {
  DifferentiableMap out = *this;
  if (box.dim() != m_) throw InvalidOperands("test box dimension mismatch");
  out.test_box_ = std::move(box);
  return out;
}

DifferentiableMap DifferentiableMap::with_description(std::string d) const {
  DifferentiableMap out = *this;
  out.description_ = std::move(d);
  return out;
}

DifferentiableMap DifferentiableMap::linear(const Mat& a, std::string description) {
  return affine(a, Vec::Zero(a.rows()), std::move(description));
}

DifferentiableMap DifferentiableMap::affine(const Mat& a, const Vec& b, std::string description) {
  if (b.size() != a.rows()) throw InvalidOperands("affine map with mismatched offset");
  return DifferentiableMap(
      static_cast<int>(a.cols()), static_cast<int>(a.rows()),
      [a, b](const Vec& z) -> Vec { return a * z + b; }, [a](const Vec&) -> Mat { return a; },
      std::move(description));
}

DifferentiableMap sum_map(const DifferentiableMap& f, const DifferentiableMap& g) {
  if (f.source_dim() != g.source_dim() || f.target_dim() != g.target_dim()) {
    throw InvalidOperands("map sum requires identical signatures");
  }
  return DifferentiableMap(
      f.source_dim(), f.target_dim(), [f, g](const Vec& z) -> Vec { return f(z) + g(z); },
      [f, g](const Vec& z) -> Mat { return f.jacobian(z) + g.jacobian(z); },
      f.description() + " + " + g.description(), f.domain(), f.test_box());
}

PolynomialMap::PolynomialMap(int source_dim, int target_dim, Field field,
                             std::vector<std::vector<Monomial>> coords)
    : m_(source_dim), n_(target_dim), field_(field), coords_(std::move(coords)) {
  if (m_ < 0 || n_ < 0) throw InvalidOperands("polynomial map with negative dimension");
  if (static_cast<int>(coords_.size()) != n_) {
    throw InvalidOperands("polynomial map needs one term list per target coordinate");
  }
  for (const auto& coord : coords_) {
    for (const Monomial& t : coord) {
      if (static_cast<int>(t.powers.size()) != m_) {
        throw InvalidOperands("monomial exponent tuple has wrong length");
      }
      for (int p : t.powers) {
        if (p < 0) throw InvalidOperands("negative exponent in polynomial map");
      }
      if (field_ == Field::Real && t.coeff.imag() != 0.0) {
        throw InvalidOperands("real-field polynomial with complex coefficient");
      }
    }
  }
}

int PolynomialMap::degree() const {
  int deg = 0;
  for (const auto& coord : coords_) {
    for (const Monomial& t : coord) {
      int d = 0;
      for (int p : t.powers) d += p;
      deg = std::max(deg, d);
    }
  }
  return deg;
}

namespace {

template <typename VecT, typename Scalar>
VecT poly_eval(const std::vector<std::vector<Monomial>>& coords, int m, int n, const VecT& z) {
  VecT out = VecT::Zero(n);
  for (int coord = 0; coord < n; ++coord) {
    Scalar acc{};
    for (const Monomial& t : coords[static_cast<std::size_t>(coord)]) {
      Scalar term;
      if constexpr (std::is_same_v<Scalar, double>) {
        term = t.coeff.real();
      } else {
        term = t.coeff;
      }
      for (int axis = 0; axis < m; ++axis) {
        for (int e = 0; e < t.powers[static_cast<std::size_t>(axis)]; ++e) term *= z[axis];
      }
      acc += term;
    }
    out[coord] = acc;
  }
  return out;
}

template <typename MatT, typename VecT, typename Scalar>
MatT poly_jacobian(const std::vector<std::vector<Monomial>>& coords, int m, int n, const VecT& z) {
  MatT jac = MatT::Zero(n, m);
  for (int coord = 0; coord < n; ++coord) {
    for (const Monomial& t : coords[static_cast<std::size_t>(coord)]) {
      for (int axis = 0; axis < m; ++axis) {
        const int e = t.powers[static_cast<std::size_t>(axis)];
        if (e == 0) continue;
        Scalar term;
        if constexpr (std::is_same_v<Scalar, double>) {
          term = t.coeff.real() * e;
        } else {
          term = t.coeff * Scalar(static_cast<double>(e));
        }
        for (int other = 0; other < m; ++other) {
          const int pw = t.powers[static_cast<std::size_t>(other)] - (other == axis ? 1 : 0);
          for (int k = 0; k < pw; ++k) term *= z[other];
        }
        jac(coord, axis) += term;
      }
    }
  }
  return jac;
}

}  // namespace

Vec PolynomialMap::eval(const Vec& z) const {
  if (z.size() != m_) throw DimensionMismatch("polynomial evaluated at wrong dimension");
  return poly_eval<Vec, double>(coords_, m_, n_, z);
}

CVec PolynomialMap::eval(const CVec& z) const {
  if (z.size() != m_) throw DimensionMismatch("polynomial evaluated at wrong dimension");
  return poly_eval<CVec, Complex>(coords_, m_, n_, z);
}

Mat PolynomialMap::jacobian(const Vec& z) const {
  if (z.size() != m_) throw DimensionMismatch("polynomial Jacobian at wrong dimension");
  return poly_jacobian<Mat, Vec, double>(coords_, m_, n_, z);
}

CMat PolynomialMap::jacobian(const CVec& z) const {
  if (z.size() != m_) throw DimensionMismatch("polynomial Jacobian at wrong dimension");
  return poly_jacobian<CMat, CVec, Complex>(coords_, m_, n_, z);
}

DifferentiableMap PolynomialMap::as_map(std::optional<Box> domain, std::string description) const {
  if (field_ != Field::Real) throw InvalidOperands("only real polynomial maps become real maps");
  PolynomialMap self = *this;
  return DifferentiableMap(
      m_, n_, [self](const Vec& z) -> Vec { return self.eval(z); },
      [self](const Vec& z) -> Mat { return self.jacobian(z); },
      description.empty() ? "polynomial map" : std::move(description), std::move(domain));
}

PolynomialMap PolynomialMap::affine(Field field, const CMat& a, const CVec& b) {
  if (b.size() != a.rows()) throw InvalidOperands("affine polynomial with mismatched offset");
  const int m = static_cast<int>(a.cols());
  const int n = static_cast<int>(a.rows());
  std::vector<std::vector<Monomial>> coords(static_cast<std::size_t>(n));
  for (int coord = 0; coord < n; ++coord) {
    if (b[coord] != Complex(0.0)) {
      coords[static_cast<std::size_t>(coord)].push_back({std::vector<int>(m, 0), b[coord]});
    }
    for (int axis = 0; axis < m; ++axis) {
      if (a(coord, axis) == Complex(0.0)) continue;
      std::vector<int> powers(static_cast<std::size_t>(m), 0);
      powers[static_cast<std::size_t>(axis)] = 1;
      coords[static_cast<std::size_t>(coord)].push_back({std::move(powers), a(coord, axis)});
    }
  }
  return PolynomialMap(m, n, field, std::move(coords));
}

PolynomialMap PolynomialMap::random(Rng& rng, int source_dim, int target_dim, int degree,
                                    double scale) {
  // Enumerate exponent tuples of total degree <= degree in lexicographic
  // order so the draw sequence is reproducible.
  std::vector<std::vector<int>> tuples;
  std::vector<int> current(static_cast<std::size_t>(source_dim), 0);
  const std::function<void(int, int)> enumerate = [&](int axis, int remaining) {
    if (axis == source_dim) {
      tuples.push_back(current);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      current[static_cast<std::size_t>(axis)] = e;
      enumerate(axis + 1, remaining - e);
    }
    current[static_cast<std::size_t>(axis)] = 0;
  };
  enumerate(0, degree);

  std::vector<std::vector<Monomial>> coords(static_cast<std::size_t>(target_dim));
  for (auto& coord : coords) {
    for (const auto& powers : tuples) {
      coord.push_back({powers, Complex(rng.uniform(-scale, scale), 0.0)});
    }
  }
  return PolynomialMap(source_dim, target_dim, Field::Real, std::move(coords));
}

BumpFunction::BumpFunction(Box inner, Box outer)
    : inner_(std::move(inner)), outer_(std::move(outer)) {
  if (inner_.dim() != outer_.dim()) throw InvalidOperands("bump boxes differ in dimension");
  if (!inner_.bounded() || !outer_.bounded()) throw NoncompactDomain("bump boxes must be bounded");
  for (int i = 0; i < inner_.dim(); ++i) {
    if (!(outer_.lo[i] < inner_.lo[i] && inner_.hi[i] < outer_.hi[i])) {
      throw InvalidOperands("bump needs strict shoulder room on every axis");
    }
  }
}

double BumpFunction::eval(const Vec& z) const {
  if (z.size() != inner_.dim()) throw DimensionMismatch("bump evaluated at wrong dimension");
  double value = 1.0;
  for (int i = 0; i < inner_.dim(); ++i) {
    const double zi = z[i];
    double factor = 0.0;
    if (zi <= outer_.lo[i] || zi >= outer_.hi[i]) {
      factor = 0.0;
    } else if (zi < inner_.lo[i]) {
      factor = smoothstep((zi - outer_.lo[i]) / (inner_.lo[i] - outer_.lo[i]));
    } else if (zi > inner_.hi[i]) {
      factor = smoothstep((outer_.hi[i] - zi) / (outer_.hi[i] - inner_.hi[i]));
    } else {
      factor = 1.0;
    }
    value *= factor;
    if (value == 0.0) return 0.0;
  }
  return value;
}

Vec BumpFunction::grad(const Vec& z) const {
  if (z.size() != inner_.dim()) throw DimensionMismatch("bump gradient at wrong dimension");
  const int d = inner_.dim();
  Vec factors(d), primes(d);
  for (int i = 0; i < d; ++i) {
    const double zi = z[i];
    if (zi <= outer_.lo[i] || zi >= outer_.hi[i]) {
      factors[i] = 0.0;
      primes[i] = 0.0;
    } else if (zi < inner_.lo[i]) {
      const double w = inner_.lo[i] - outer_.lo[i];
      factors[i] = smoothstep((zi - outer_.lo[i]) / w);
      primes[i] = smoothstep_prime((zi - outer_.lo[i]) / w) / w;
    } else if (zi > inner_.hi[i]) {
      const double w = outer_.hi[i] - inner_.hi[i];
      factors[i] = smoothstep((outer_.hi[i] - zi) / w);
      primes[i] = -smoothstep_prime((outer_.hi[i] - zi) / w) / w;
    } else {
      factors[i] = 1.0;
      primes[i] = 0.0;
    }
  }
  Vec g = Vec::Zero(d);
  for (int i = 0; i < d; ++i) {
    if (primes[i] == 0.0) continue;
    double rest = 1.0;
    for (int j = 0; j < d; ++j) {
      if (j != i) rest *= factors[j];
    }
    g[i] = primes[i] * rest;
  }
  return g;
}

Mat fd_jacobian(const DifferentiableMap& f, const Vec& z) {
  return fd_jacobian([&f](const Vec& p) { return f(p); }, f.target_dim(), z, f.domain());
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, int target_dim, const Vec& z,
                const std::optional<Box>& domain) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double h = std::cbrt(eps) * (1.0 + z.norm());
  Mat jac(target_dim, z.size());
  for (int i = 0; i < z.size(); ++i) {
    Vec zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    if (domain && (!domain->contains(zp) || !domain->contains(zm))) {
      throw DomainEscape("finite-difference stencil leaves the domain");
    }
    jac.col(i) = (f(zp) - f(zm)) / (2.0 * h);
  }
  return jac;
}

double c1_distance(const DifferentiableMap& f, const DifferentiableMap& g, const Box& k,
                   int points_per_axis) {
  if (f.source_dim() != g.source_dim() || f.target_dim() != g.target_dim()) {
    throw InvalidOperands("order-1 distance requires identical signatures");
  }
  if (k.dim() != f.source_dim()) throw DimensionMismatch("distance box has wrong dimension");
  if (!k.bounded()) throw NoncompactDomain("order-1 distance over an unbounded box");
  const GridSpec grid(k, points_per_axis);
  double worst = 0.0;
  grid.for_each([&](const Vec& z, long) {
    const double value_gap = (f(z) - g(z)).cwiseAbs().maxCoeff();
    const double jac_gap = (f.jacobian(z) - g.jacobian(z)).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::max(value_gap, jac_gap));
  });
  return worst;
}

bool jacobian_consistent(const DifferentiableMap& f, double slack) {
  if (!f.test_box()) throw InvalidOperands("consistency check needs a test box");
  const GridSpec grid(*f.test_box(), 17);
  double worst = 0.0, scale = 1.0;
  grid.for_each([&](const Vec& z, long) {
    const Mat ana = f.jacobian(z);
    const Mat num = fd_jacobian(f, z);
    worst = std::max(worst, (ana - num).cwiseAbs().maxCoeff());
    scale = std::max(scale, ana.cwiseAbs().maxCoeff());
  });
  return worst <= slack * scale;
}

DifferentiableMap local_representative(const DifferentiableMap& f, const Chart& source,
                                       const Chart& target, const GridSpec& samples) {
  if (f.source_dim() != source.dim || f.target_dim() != target.dim) {
    throw ChartMismatch("map signature does not match the chart dimensions");
  }
  if (samples.box.dim() != source.dim) {
    throw DimensionMismatch("sample grid dimension does not match the source chart");
  }
  bool escaped = false;
  Vec witness;
  samples.for_each([&](const Vec& z, long) {
    if (escaped || !source.domain.contains(z)) return;
    const Vec image = f(z);
    if (!target.domain.contains(image)) {
      escaped = true;
      witness = z;
    }
  });
  if (escaped) {
    throw ChartMismatch("image leaves the target chart near sampled point of '" + source.name +
                        "' -> '" + target.name + "'");
  }
  return f.with_domain(source.domain)
      .with_description(f.description().empty()
                            ? ("local representative " + source.name + " -> " + target.name)
                            : f.description());
}

ComplexAffineMap::ComplexAffineMap(CMat a_, CVec b_, Subspace source_)
    : a(std::move(a_)), b(std::move(b_)), source(std::move(source_)) {
  if (source.field() != Field::Complex) throw NonComplexSubspace("affine map source");
  if (a.cols() != source.ambient_dim() || a.rows() != b.size()) {
    throw DimensionMismatch("affine map shapes disagree");
  }
}

ComplexAffineMap ComplexAffineMap::on_full_source(CMat a_, CVec b_) {
  const int p = static_cast<int>(a_.cols());
  return ComplexAffineMap(std::move(a_), std::move(b_), Subspace::full(Field::Complex, p));
}

CVec ComplexAffineMap::operator()(const CVec& z) const {
  if (z.size() != a.cols()) throw DimensionMismatch("affine map input size");
  const CMat basis = source.basis();
  const CVec residual = z - basis * (basis.adjoint() * z);
  if (residual.norm() > tol::membership * (1.0 + z.norm())) {
    throw DomainEscape("input off the source subspace of an affine map");
  }
  return a * z + b;
}

}  // namespace stratlab
