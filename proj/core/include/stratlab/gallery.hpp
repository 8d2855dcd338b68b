#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stratlab/serialization.hpp"

namespace stratlab {

/// One expectation inside a fixture run: named, with the expected and the
/// produced value rendered for diffing.
struct FixtureCheck {
  std::string name;
  bool passed = false;
  std::string expected;
  std::string actual;
};

struct FixtureResult {
  std::string fixture;
  bool passed = true;
  double elapsed_seconds = 0.0;
  std::vector<FixtureCheck> checks;
};

/// A self-checking example: running it reproduces every expected outcome
/// within the tolerances stated inside the fixture.
struct Fixture {
  std::string name;
  std::string notes;
  std::function<FixtureResult()> run;
};

/// A map transverse to the unit circle over [0.5, 2], and the leftward slide
/// family whose members go tangent at a point below that interval: openness
/// of the transversality set fails over the whole domain while every compact
/// check stays clean.
Fixture fixture_hirsch_circle();

/// The axis pair (positive ray, vertical line): the standard failure of
/// condition (a) at the origin, the shifted-parabola tangency, and the full
/// perturbation-family construction pinned down by the exact oracle.
Fixture fixture_golubitsky_axes();

/// Two open rays plus the origin as a point stratum: every piece fails to be
/// closed while the union is the closed x-axis. The smallest stratum has
/// dimension zero, which trips the construction's dimension guards.
Fixture fixture_nonclosed_union();

/// A curve oscillating into the origin: the limit tangent depends on the
/// approach sequence, so condition (a) is refuted along one schedule and
/// certified along another.
Fixture fixture_oscillation();

/// The complex-affine analog of the axis fixture in two complex dimensions.
Fixture fixture_complex_axes();

/// All fixtures, ordered by name.
std::vector<Fixture> gallery();

/// Fixture lookup; unknown names raise MalformedInput.
Fixture fixture_by_name(const std::string& name);

/// Runs the named fixtures (all when empty) concurrently; results come back
/// ordered by fixture name regardless of completion order.
std::vector<FixtureResult> run_gallery(const std::vector<std::string>& names = {});

Json to_json(const FixtureResult& r);

/// Pass/fail lines, one per check; failing checks show expected vs actual.
std::string render_text(const FixtureResult& r);

}  // namespace stratlab
