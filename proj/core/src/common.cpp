#include "stratlab/common.hpp"

#include <cmath>

namespace stratlab {

Box::Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw InvalidOperands("box bounds differ in dimension");
  for (int i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw InvalidOperands("box has lo > hi on axis " + std::to_string(i));
  }
}

bool Box::bounded() const {
  for (int i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) return false;
  }
  return true;
}

bool Box::contains(const Vec& z, double slack) const {
  if (z.size() != lo.size()) throw DimensionMismatch("point dimension does not match box");
  for (int i = 0; i < lo.size(); ++i) {
    if (z[i] < lo[i] - slack || z[i] > hi[i] + slack) return false;
  }
  return true;
}

Vec Box::center() const {
  if (!bounded()) throw NoncompactDomain("center of an unbounded box");
  return 0.5 * (lo + hi);
}

Vec Box::halfwidth() const {
  if (!bounded()) throw NoncompactDomain("halfwidth of an unbounded box");
  return 0.5 * (hi - lo);
}

Box Box::scaled(double factor) const {
  const Vec c = center(), h = halfwidth();
  return Box(c - factor * h, c + factor * h);
}

Box Box::clipped(double w) const {
  Vec l = lo, h = hi;
  for (int i = 0; i < l.size(); ++i) {
    l[i] = std::max(l[i], -w);
    h[i] = std::min(h[i], w);
    if (l[i] > h[i]) l[i] = h[i];
  }
  return Box(l, h);
}

Box Box::cube(int dim, double halfwidth) {
  return Box(Vec::Constant(dim, -halfwidth), Vec::Constant(dim, halfwidth));
}

Box Box::unbounded(int dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return Box(Vec::Constant(dim, -inf), Vec::Constant(dim, inf));
}

long GridSpec::total() const {
  if (!box.bounded()) throw NoncompactDomain("sampling grid over an unbounded box");
  if (points_per_axis < 1) throw InvalidOperands("grid needs at least one point per axis");
  long n = 1;
  for (int i = 0; i < box.dim(); ++i) {
    n *= points_per_axis;
    if (n > 50'000'000L) throw InvalidOperands("grid too large");
  }
  return n;
}

Vec GridSpec::point(long index) const {
  const int d = box.dim();
  Vec z(d);
  long rem = index;
  // Row-major: axis 0 outermost, last axis fastest.
  for (int axis = d - 1; axis >= 0; --axis) {
    const long j = rem % points_per_axis;
    rem /= points_per_axis;
    if (points_per_axis == 1) {
      z[axis] = 0.5 * (box.lo[axis] + box.hi[axis]);
    } else {
      const double t = static_cast<double>(j) / (points_per_axis - 1);
      z[axis] = box.lo[axis] + t * (box.hi[axis] - box.lo[axis]);
    }
  }
  return z;
}

std::vector<Vec> GridSpec::points() const {
  const long n = total();
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out.push_back(point(i));
  return out;
}

double Rng::uniform() {
  // 53-bit mantissa draw; avoids distribution objects on purpose.
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  do {
    u = uniform();
  } while (u <= 0.0);
  const double v = uniform();
  const double r = std::sqrt(-2.0 * std::log(u));
  const double a = 2.0 * M_PI * v;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw InvalidOperands("uniform_int with hi < lo");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(bits() % span);
}

}  // namespace stratlab
