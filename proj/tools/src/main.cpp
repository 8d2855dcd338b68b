// Command-line surface for the transversality laboratory.
//
// Exit codes: 0 success, 1 expectation miss (a failed gallery fixture or an
// oracle disagreement), 2 malformed or unusable input (message names the
// file and, for parse errors, the byte offset).

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stratlab/exact.hpp"
#include "stratlab/gallery.hpp"
#include "stratlab/neighborhoods.hpp"
#include "stratlab/regularity.hpp"
#include "stratlab/serialization.hpp"
#include "stratlab/transversality.hpp"
#include "stratlab/witness.hpp"

namespace fs = std::filesystem;
using namespace stratlab;

namespace {

struct GlobalOpts {
  double tol_rank = tol::rank_rel;
  double tol_a = tol::condition_a;
  int grid = 401;
  std::uint64_t seed = 2024;
  std::string out = "json";
};

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

bool looks_inline(const std::string& s) {
  const auto pos = s.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && (s[pos] == '{' || s[pos] == '[');
}

/// Accepts either inline JSON or a path to a JSON file.
Json load_arg(const std::string& arg) {
  if (looks_inline(arg)) return parse_json(arg);
  return load_json_file(arg);
}

/// A node that is either inline JSON or a string naming a file next to the
/// spec that referenced it.
Json resolve_ref(const Json& node, const fs::path& base_dir, const char* what) {
  if (node.is_string()) {
    const fs::path ref = node.get<std::string>();
    const fs::path full = ref.is_absolute() ? ref : base_dir / ref;
    return load_json_file(full.string());
  }
  if (node.is_object()) return node;
  throw MalformedInput(std::string(what) + " must be an object or a file name");
}

std::vector<double> split_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw MalformedInput(std::string(what) + ": cannot read '" + token + "' as a number");
    }
  }
  if (out.empty()) throw MalformedInput(std::string(what) + ": empty value");
  return out;
}

Vec parse_point(const std::string& text) {
  const std::vector<double> nums = split_numbers(text, "--point");
  Vec x(static_cast<int>(nums.size()));
  for (std::size_t i = 0; i < nums.size(); ++i) x(static_cast<int>(i)) = nums[i];
  return x;
}

/// Complex points are flat re,im pairs: "1,0,0,0" is (1+0i, 0+0i).
CVec parse_complex_point(const std::string& text) {
  const std::vector<double> nums = split_numbers(text, "--point");
  if (nums.size() % 2 != 0) {
    throw MalformedInput("--point: a complex point needs re,im pairs (even count)");
  }
  CVec z(static_cast<int>(nums.size() / 2));
  for (int i = 0; i < z.size(); ++i) z(i) = Complex(nums[2 * i], nums[2 * i + 1]);
  return z;
}

/// Degree <= 1 complex polynomials become matrix-plus-offset form; anything
/// else has no affine model and is refused.
ComplexAffineMap as_affine(const PolynomialMap& p) {
  if (p.field() != Field::Complex) throw InvalidOperands("affine conversion expects a complex map");
  if (p.degree() > 1) {
    throw MalformedInput("complex checks need an affine map (degree <= 1), got degree " +
                         std::to_string(p.degree()));
  }
  CMat a = CMat::Zero(p.target_dim(), p.source_dim());
  CVec b = CVec::Zero(p.target_dim());
  const auto& table = p.terms();
  for (int row = 0; row < p.target_dim(); ++row) {
    for (const Monomial& t : table[static_cast<std::size_t>(row)]) {
      int total = 0, var = -1;
      for (std::size_t v = 0; v < t.powers.size(); ++v) {
        total += t.powers[v];
        if (t.powers[v] > 0) var = static_cast<int>(v);
      }
      if (total == 0) {
        b(row) += t.coeff;
      } else {
        a(row, var) += t.coeff;
      }
    }
  }
  return ComplexAffineMap::on_full_source(std::move(a), std::move(b));
}

void require_compact(const Box& k) {
  if (!k.bounded()) {
    throw InvalidOperands(
        "control box must be compact: only bounded boxes are finitely checkable, "
        "give every coordinate a finite lo and hi");
  }
}

std::string verdict_csv(const TransversalityVerdict& v) {
  std::ostringstream out;
  out << "transverse,conclusive,reason,margin\n"
      << (v.transverse ? 1 : 0) << ',' << (v.conclusive ? 1 : 0) << ','
      << verdict_reason_name(v.reason) << ','
      << (v.margin ? csv_number(*v.margin) : std::string()) << '\n';
  return out.str();
}

// --- check ----------------------------------------------------------------

struct CheckArgs {
  std::string map_file, stratum_file, sigma_file, point;
};

int run_check(const GlobalOpts& g, const CheckArgs& a) {
  const PolynomialMap p = polynomial_from_json(load_arg(a.map_file));
  if (!a.stratum_file.empty() == !a.sigma_file.empty()) {
    throw MalformedInput("check needs exactly one of --stratum / --stratification");
  }

  if (p.field() == Field::Complex) {
    const ComplexAffineMap f = as_affine(p);
    const CVec z = parse_complex_point(a.point);
    TransversalityVerdict v;
    Json j;
    if (!a.stratum_file.empty()) {
      v = is_transverse_at(f, z, stratum_from_json(load_arg(a.stratum_file)));
      j = to_json(v);
    } else {
      const StratificationVerdict sv =
          is_transverse_to_stratification(f, z, stratification_from_json(load_arg(a.sigma_file)));
      if (g.out == "csv") {
        std::cout << "transverse,conclusive\n" << sv.transverse << ',' << sv.conclusive << '\n';
        return 0;
      }
      emit(to_json(sv));
      return 0;
    }
    if (g.out == "csv") {
      std::cout << verdict_csv(v);
    } else {
      emit(j);
    }
    return 0;
  }

  const DifferentiableMap f = p.as_map();
  const Vec x = parse_point(a.point);
  if (!a.stratum_file.empty()) {
    const TransversalityVerdict v =
        is_transverse_at(f, x, stratum_from_json(load_arg(a.stratum_file)));
    if (g.out == "csv") {
      std::cout << verdict_csv(v);
    } else {
      emit(to_json(v));
    }
    return 0;
  }
  const StratificationVerdict sv =
      is_transverse_to_stratification(f, x, stratification_from_json(load_arg(a.sigma_file)));
  if (g.out == "csv") {
    std::cout << "transverse,conclusive\n" << sv.transverse << ',' << sv.conclusive << '\n';
  } else {
    emit(to_json(sv));
  }
  return 0;
}

// --- check-compact --------------------------------------------------------

struct CompactArgs {
  std::string map_file, sigma_file, k;
};

int run_check_compact(const GlobalOpts& g, const CompactArgs& a) {
  const PolynomialMap p = polynomial_from_json(load_arg(a.map_file));
  if (p.field() != Field::Real) {
    throw MalformedInput("check-compact grids a real box; the map must be real");
  }
  const Stratification sigma = stratification_from_json(load_arg(a.sigma_file));
  const Box k = box_from_json(load_arg(a.k));
  require_compact(k);
  const CompactReport report = transverse_on_compact(p.as_map(), k, sigma, g.grid);
  if (g.out == "csv") {
    std::cout << to_csv(report);
  } else {
    emit(to_json(report));
  }
  return 0;
}

// --- condition-a ----------------------------------------------------------

struct ConditionAArgs {
  std::string lower_file, upper_file, curve_file, point, schedule, times;
  bool velocities = false;
};

int run_condition_a(const GlobalOpts& g, const ConditionAArgs& a) {
  const Stratum lower = stratum_from_json(load_arg(a.lower_file));
  const PolynomialMap curve_poly = polynomial_from_json(load_arg(a.curve_file));
  const DifferentiableMap curve = curve_poly.as_map();
  const Vec x = parse_point(a.point);

  Schedule sched;
  if (!a.times.empty()) {
    sched = Schedule::explicit_times(split_numbers(a.times, "--times"));
  } else if (!a.schedule.empty()) {
    sched = schedule_from_json(load_arg(a.schedule));
  } else {
    throw MalformedInput("condition-a needs --schedule or --times");
  }

  TangentSequence seq = [&] {
    if (a.velocities) return sequence_from_velocities(curve, x, sched);
    if (a.upper_file.empty()) {
      throw MalformedInput("condition-a needs --upper (or --velocities for curve-traced tangents)");
    }
    return sequence_from_curve(stratum_from_json(load_arg(a.upper_file)), curve, x, sched);
  }();

  const ConditionAReport report = check_condition_a(lower, x, seq, g.tol_a);
  if (g.out == "csv") {
    std::cout << to_csv(report);
  } else {
    emit(to_json(report));
  }
  return 0;
}

// --- witness --------------------------------------------------------------

Vec vec_from_json_node(const Json& node, const char* what) {
  if (!node.is_array()) throw MalformedInput(std::string(what) + " must be an array of numbers");
  Vec x(static_cast<int>(node.size()));
  for (int i = 0; i < x.size(); ++i) {
    if (!node[static_cast<std::size_t>(i)].is_number()) {
      throw MalformedInput(std::string(what) + " must be an array of numbers");
    }
    x(i) = node[static_cast<std::size_t>(i)].get<double>();
  }
  return x;
}

CVec cvec_from_json_node(const Json& node, const char* what) {
  if (!node.is_array()) throw MalformedInput(std::string(what) + " must be an array");
  CVec z(static_cast<int>(node.size()));
  for (int i = 0; i < z.size(); ++i) {
    const Json& e = node[static_cast<std::size_t>(i)];
    if (e.is_number()) {
      z(i) = Complex(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      z(i) = Complex(e[0].get<double>(), e[1].get<double>());
    } else {
      throw MalformedInput(std::string(what) + " entries must be numbers or [re, im]");
    }
  }
  return z;
}

/// A fault request names the stratum pair, the frontier point, the approach
/// sequence (a curve plus a schedule, or explicit points and tangents), the
/// smallest stratum dimension, and the source model.
int run_witness(const GlobalOpts& g, const std::string& in_file) {
  const Json j = load_json_file(in_file);
  const fs::path base_dir = fs::path(in_file).parent_path();
  const char* ctx = "witness request";
  if (!j.is_object()) throw MalformedInput(std::string(ctx) + " must be a JSON object");
  for (const char* key : {"field", "lower", "upper", "x", "min_dim", "sequence"}) {
    if (!j.contains(key)) throw MalformedInput(std::string(ctx) + ": missing '" + key + "'");
  }

  const Field field = field_from_name(j["field"].get<std::string>());
  const Stratum lower = stratum_from_json(resolve_ref(j["lower"], base_dir, "'lower'"));
  const Stratum upper = stratum_from_json(resolve_ref(j["upper"], base_dir, "'upper'"));
  const int min_dim = j["min_dim"].get<int>();
  const Json& seq_node = j["sequence"];

  WitnessFamily family = [&] {
    if (field == Field::Real) {
      if (!j.contains("source_dim")) {
        throw MalformedInput(std::string(ctx) + ": real requests need 'source_dim'");
      }
      const Vec x = vec_from_json_node(j["x"], "'x'");
      TangentSequence seq = [&] {
        if (seq_node.contains("curve")) {
          const PolynomialMap curve =
              polynomial_from_json(resolve_ref(seq_node["curve"], base_dir, "'curve'"));
          const Schedule sched = schedule_from_json(seq_node.at("schedule"));
          return sequence_from_curve(upper, curve.as_map(), x, sched);
        }
        throw MalformedInput(std::string(ctx) + ": real requests need sequence.curve");
      }();
      const FaultInstance fault =
          make_fault(lower, upper, x, seq, min_dim, j["source_dim"].get<int>());
      return build_witness(fault);
    }
    // Complex requests carry explicit sequence data and a source subspace.
    const CVec x = cvec_from_json_node(j["x"], "'x'");
    if (!j.contains("source")) {
      throw MalformedInput(std::string(ctx) + ": complex requests need 'source'");
    }
    const Subspace source = subspace_from_json(resolve_ref(j["source"], base_dir, "'source'"));
    if (!seq_node.contains("points") || !seq_node.contains("tangents")) {
      throw MalformedInput(std::string(ctx) + ": complex requests need sequence.points/.tangents");
    }
    std::vector<CVec> points;
    for (const Json& pnode : seq_node["points"]) {
      points.push_back(cvec_from_json_node(pnode, "sequence point"));
    }
    std::vector<Subspace> tangents;
    for (const Json& tnode : seq_node["tangents"]) {
      tangents.push_back(subspace_from_json(tnode));
    }
    TangentSequence seq = TangentSequence::from_data(Field::Complex, std::move(points),
                                                     std::move(tangents), x, "witness request");
    const FaultInstance fault = make_complex_fault(lower, upper, x, seq, min_dim, source);
    return complex_witness(fault);
  }();

  if (g.out == "csv") {
    std::cout << to_csv(family);
  } else {
    emit(to_json(family));
  }
  return 0;
}

// --- probe ----------------------------------------------------------------

/// The two built-in one-parameter families. Random draws almost never land
/// on a tangency, so counterexample hunting needs a direction to push in.
DirectedFamily builtin_family(const std::string& name, double c_max) {
  DirectedFamily fam;
  fam.name = name;
  fam.c_max = c_max;
  if (name == "slide") {
    // x -> (x - c, (x - c)^2 + 1): vertex meets the unit circle at (0, 1).
    fam.member = [](double c) {
      return DifferentiableMap(
          1, 2,
          [c](const Vec& z) {
            Vec y(2);
            y << z(0) - c, (z(0) - c) * (z(0) - c) + 1.0;
            return y;
          },
          [c](const Vec& z) {
            Mat dj(2, 1);
            dj << 1.0, 2.0 * (z(0) - c);
            return dj;
          },
          "slide");
    };
    fam.failure_hint = [](double c) {
      Vec x(1);
      x << c;
      return x;
    };
    return fam;
  }
  if (name == "shift") {
    // x -> (x + c, x^2): vertex slides along the horizontal axis.
    fam.member = [](double c) {
      return DifferentiableMap(
          1, 2,
          [c](const Vec& z) {
            Vec y(2);
            y << z(0) + c, z(0) * z(0);
            return y;
          },
          [](const Vec& z) {
            Mat dj(2, 1);
            dj << 1.0, 2.0 * z(0);
            return dj;
          },
          "shift");
    };
    fam.failure_hint = [](double) { return Vec::Zero(1); };
    return fam;
  }
  throw MalformedInput("unknown directed family '" + name + "' (built-ins: slide, shift)");
}

int run_probe(const GlobalOpts& g, const std::string& spec_file, int samples_override) {
  const Json j = load_json_file(spec_file);
  const fs::path base_dir = fs::path(spec_file).parent_path();
  const char* ctx = "probe spec";
  if (!j.is_object()) throw MalformedInput(std::string(ctx) + " must be a JSON object");
  for (const char* key : {"map", "k", "epsilon", "stratification"}) {
    if (!j.contains(key)) throw MalformedInput(std::string(ctx) + ": missing '" + key + "'");
  }

  const PolynomialMap p = polynomial_from_json(resolve_ref(j["map"], base_dir, "'map'"));
  if (p.field() != Field::Real) {
    throw MalformedInput("probe grids a real box; the map must be real");
  }
  const Box k = box_from_json(j["k"]);
  require_compact(k);
  const double epsilon = j["epsilon"].get<double>();
  const int jet_order = j.contains("jet_order") ? j["jet_order"].get<int>() : 1;
  const Stratification sigma =
      stratification_from_json(resolve_ref(j["stratification"], base_dir, "'stratification'"));

  const Box source_domain = j.contains("source_domain") ? box_from_json(j["source_domain"])
                                                        : Box::unbounded(p.source_dim());
  const Box target_box = j.contains("target_box") ? box_from_json(j["target_box"])
                                                  : Box::unbounded(p.target_dim());
  const Chart src{"source", p.source_dim(), source_domain};
  const Chart tgt{"target", p.target_dim(), target_box};
  const WeakNeighborhoodSpec spec(p.as_map(), src, tgt, k, epsilon, jet_order);

  int samples = j.contains("samples") ? j["samples"].get<int>() : 50;
  if (samples_override >= 0) samples = samples_override;

  std::optional<DirectedFamily> family;
  if (j.contains("family") && !j["family"].is_null()) {
    const Json& f = j["family"];
    if (!f.is_object() || !f.contains("name")) {
      throw MalformedInput(std::string(ctx) + ": 'family' needs a 'name'");
    }
    family = builtin_family(f["name"].get<std::string>(),
                            f.contains("c_max") ? f["c_max"].get<double>() : 1.0);
  }

  const ProbeReport report =
      probe_openness(spec, sigma, samples, g.seed, family ? &*family : nullptr, g.grid);
  if (g.out == "csv") {
    std::cout << to_csv(report);
  } else {
    emit(to_json(report));
  }
  return 0;
}

// --- gallery --------------------------------------------------------------

int run_gallery_cmd(const GlobalOpts& g, const std::vector<std::string>& names, bool all) {
  if (!all && names.empty()) {
    throw MalformedInput("gallery needs --all or at least one --name");
  }
  const std::vector<FixtureResult> results = run_gallery(all ? std::vector<std::string>{} : names);
  bool ok = true;
  if (g.out == "json") {
    Json arr = Json::array();
    for (const FixtureResult& r : results) {
      ok = ok && r.passed;
      arr.push_back(to_json(r));
    }
    emit(arr);
  } else {
    for (const FixtureResult& r : results) {
      ok = ok && r.passed;
      std::cout << render_text(r);
    }
  }
  return ok ? 0 : 1;
}

// --- oracle ---------------------------------------------------------------

struct ExactCheck {
  bool on_stratum = false;
  bool transverse = false;
};

/// Same meet-or-span decision over exact rationals. Doubles convert exactly,
/// so the floating instance and the rational instance are the same instance.
ExactCheck exact_check(const PolynomialMap& p, const Stratum& s, const CVec& z) {
  std::vector<exact::Scalar> ze;
  ze.reserve(static_cast<std::size_t>(z.size()));
  for (int i = 0; i < z.size(); ++i) {
    ze.push_back(exact::Scalar::from_double(z(i).real(), z(i).imag()));
  }
  const std::vector<exact::Scalar> y = exact::eval_polynomial(p, ze);

  const ImplicitRepr& repr = s.implicit_repr();
  ExactCheck result;
  result.on_stratum = true;
  for (const exact::Scalar& value : exact::eval_polynomial(repr.constraint, y)) {
    if (value.re != 0 || value.im != 0) result.on_stratum = false;
  }
  for (const RegionInequality& q : repr.region) {
    const std::vector<exact::Scalar> qv = exact::eval_polynomial(q.poly, y);
    for (const exact::Scalar& value : qv) {
      const bool pass = q.kind == RegionKind::Positive ? (value.im == 0 && value.re > 0)
                                                       : (value.re != 0 || value.im != 0);
      if (!pass) result.on_stratum = false;
    }
  }
  if (!result.on_stratum) {
    result.transverse = true;  // the image point misses the stratum
    return result;
  }

  const exact::RMat dj = exact::polynomial_jacobian(p, ze);
  const exact::RMat tangent = exact::nullspace(exact::polynomial_jacobian(repr.constraint, y));
  result.transverse = exact::surjective_with(dj, tangent, s.ambient_dim());
  return result;
}

int run_oracle(const GlobalOpts& g, const CheckArgs& a) {
  const PolynomialMap p = polynomial_from_json(load_arg(a.map_file));
  if (a.stratum_file.empty()) throw MalformedInput("oracle needs --stratum");
  const Stratum s = stratum_from_json(load_arg(a.stratum_file));
  if (!s.is_implicit()) {
    throw MalformedInput("oracle needs an implicit stratum: parametric data has no rational model");
  }

  TransversalityVerdict floating;
  CVec z;
  if (p.field() == Field::Complex) {
    z = parse_complex_point(a.point);
    floating = is_transverse_at(as_affine(p), z, s);
  } else {
    const Vec x = parse_point(a.point);
    floating = is_transverse_at(p.as_map(), x, s);
    z = x.cast<Complex>();
  }
  const ExactCheck exact_verdict = exact_check(p, s, z);

  const bool compared = floating.conclusive;
  const bool agree = !compared || floating.transverse == exact_verdict.transverse;

  // Independent rank recomputation of the stacked block at the user's
  // cutoff; is_transverse_at itself always runs the pinned policy.
  Json stacked_rank = Json(nullptr);
  if (exact_verdict.on_stratum) {
    if (p.field() == Field::Complex) {
      const Subspace tangent = tangent_at(s, CVec(p.eval(z)));
      const CMat dj = p.jacobian(z);
      CMat block(dj.rows(), dj.cols() + tangent.dim());
      block << dj, tangent.basis();
      stacked_rank = to_json(numeric_rank(block, g.tol_rank));
    } else {
      const Vec x = z.real();
      const Subspace tangent = tangent_at(s, Vec(p.eval(x)));
      const Mat dj = p.jacobian(x);
      Mat block(dj.rows(), dj.cols() + tangent.dim());
      block << dj, tangent.real_basis();
      stacked_rank = to_json(numeric_rank(block, g.tol_rank));
    }
  }

  Json j;
  j["floating"] = to_json(floating);
  j["stacked_rank"] = std::move(stacked_rank);
  Json e;
  e["on_stratum"] = exact_verdict.on_stratum;
  e["transverse"] = exact_verdict.transverse;
  j["exact"] = std::move(e);
  j["compared"] = compared;
  j["agree"] = agree;
  if (g.out == "csv") {
    std::cout << "floating_transverse,floating_conclusive,exact_transverse,compared,agree\n"
              << floating.transverse << ',' << floating.conclusive << ','
              << exact_verdict.transverse << ',' << compared << ',' << agree << '\n';
  } else {
    emit(j);
  }
  return agree ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stratlab: chart-local transversality checks against stratified sets.\n"
      "Verdicts, margins, compact-box certificates, condition-(a) probes,\n"
      "witness families, weak-neighborhood sampling, and an exact-arithmetic\n"
      "cross-check, with a built-in fixture gallery."};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--tol-rank", g.tol_rank,
                 "relative singular-value cutoff for the oracle's rank comparisons")
      ->capture_default_str();
  app.add_option("--tol-a", g.tol_a, "containment slack for condition-(a) verdicts")
      ->capture_default_str();
  app.add_option("--grid", g.grid, "grid points per axis for compact-box sweeps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", g.seed, "seed for perturbation sampling")->capture_default_str();
  app.add_option("--out", g.out, "output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand(
      "check", "verdict and margin for one map at one point against a stratum or stratification");
  check->fallthrough();
  check->add_option("--map", check_args.map_file, "polynomial map JSON (file or inline)")
      ->required();
  check->add_option("--stratum", check_args.stratum_file, "stratum JSON");
  check->add_option("--stratification", check_args.sigma_file, "stratification JSON");
  check->add_option("--point", check_args.point,
                    "source point, comma-separated (complex: re,im pairs)")
      ->required();

  CompactArgs compact_args;
  CLI::App* compact = app.add_subcommand(
      "check-compact", "grid certificate over a compact box: verdicts, margins, clearance");
  compact->fallthrough();
  compact->add_option("--map", compact_args.map_file, "polynomial map JSON")->required();
  compact->add_option("--stratification", compact_args.sigma_file, "stratification JSON")
      ->required();
  compact->add_option("--k", compact_args.k, "compact box JSON (file or inline)")->required();

  ConditionAArgs cond_args;
  CLI::App* cond = app.add_subcommand(
      "condition-a", "limit-tangent containment along an approach curve into a frontier point");
  cond->fallthrough();
  cond->add_option("--lower", cond_args.lower_file, "frontier stratum JSON")->required();
  cond->add_option("--upper", cond_args.upper_file, "approach stratum JSON");
  cond->add_option("--curve", cond_args.curve_file, "curve as a polynomial map JSON")->required();
  cond->add_option("--point", cond_args.point, "frontier point, comma-separated")->required();
  cond->add_option("--schedule", cond_args.schedule, "schedule JSON (file or inline)");
  cond->add_option("--times", cond_args.times, "explicit times, comma-separated");
  cond->add_flag("--velocities", cond_args.velocities,
                 "take tangents from the curve's own velocity instead of --upper");

  std::string witness_in;
  CLI::App* witness = app.add_subcommand(
      "witness", "build the perturbation family certifying a non-removable transversality fault");
  witness->fallthrough();
  witness->add_option("--in", witness_in, "fault request JSON file")->required();

  std::string probe_spec;
  int probe_samples = -1;
  CLI::App* probe = app.add_subcommand(
      "probe", "sample a weak C1 neighborhood for transversality survival over a compact box");
  probe->fallthrough();
  probe->add_option("--spec", probe_spec, "neighborhood spec JSON file")->required();
  probe->add_option("--samples", probe_samples, "override the spec's sample count");

  std::vector<std::string> gallery_names;
  bool gallery_all = false;
  CLI::App* gallery_cmd =
      app.add_subcommand("gallery", "run built-in fixtures and compare every expected outcome");
  gallery_cmd->fallthrough();
  gallery_cmd->add_option("--name", gallery_names, "fixture to run (repeatable)");
  gallery_cmd->add_flag("--all", gallery_all, "run every fixture");

  CheckArgs oracle_args;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "rerun a pointwise check in exact rational arithmetic and compare");
  oracle->fallthrough();
  oracle->add_option("--map", oracle_args.map_file, "polynomial map JSON")->required();
  oracle->add_option("--stratum", oracle_args.stratum_file, "implicit stratum JSON")->required();
  oracle->add_option("--point", oracle_args.point, "source point, comma-separated")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*check) return run_check(g, check_args);
    if (*compact) return run_check_compact(g, compact_args);
    if (*cond) return run_condition_a(g, cond_args);
    if (*witness) return run_witness(g, witness_in);
    if (*probe) return run_probe(g, probe_spec, probe_samples);
    if (*gallery_cmd) return run_gallery_cmd(g, gallery_names, gallery_all);
    if (*oracle) return run_oracle(g, oracle_args);
  } catch (const MalformedInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
