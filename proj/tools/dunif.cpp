// Command-line front end. Standard output carries JSON, CSV or TML only;
// messages go to standard error.
//
// Exit codes:
//   0  success
//   1  I/O, parse or invalid-input error
//   2  solver error (WrongGenus, divergence, lost regularity, geodesic failure)
//   3  a verification suite failed (verify) or the study threshold was missed (study)

#include "dunif/error.hpp"
#include "dunif/mesh_io.hpp"
#include "dunif/surface_sampling.hpp"
#include "dunif/uniformize.hpp"
#include "dunif/verification.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace dunif;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitSolver = 2;
constexpr int kExitCheck = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidInput:
  case ErrorCode::ParseError:
  case ErrorCode::NonManifoldEdge:
  case ErrorCode::NonManifoldVertex:
  case ErrorCode::NonOrientable:
  case ErrorCode::Disconnected:
  case ErrorCode::DuplicateFace:
  case ErrorCode::TriangleInequalityViolated:
  case ErrorCode::DegenerateTriangle:
    return kExitInput;
  default:
    return kExitSolver;
  }
}

struct Config {
  std::string in;
  std::string out;
  std::string tml_out;
  std::string geometry = "auto";
  std::string mode = "newton";
  double tol = 1e-10;
  int max_iter = 100;
  std::uint64_t seed = kDefaultSeed;
  std::string fault = "none";
  std::string surface;
  std::string res;
  double threshold = 0.9;
};

SolveOptions solve_options(const Config& c) {
  SolveOptions o;
  o.tol_curvature = c.tol;
  o.max_iterations = c.max_iter;
  if (c.mode == "newton")
    o.mode = SolveMode::Newton;
  else if (c.mode == "flow")
    o.mode = SolveMode::Flow;
  else
    throw Error(ErrorCode::InvalidInput, "--mode must be newton or flow");
  o.validate();
  return o;
}

// Writes to `path`, or standard output when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::ParseError, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorCode::ParseError, "cannot write " + path);
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Geometry choose_geometry(const Config& c, const Triangulation& t) {
  if (c.geometry == "euclidean") return Geometry::Euclidean;
  if (c.geometry == "hyperbolic") return Geometry::Hyperbolic;
  if (c.geometry != "auto") throw Error(ErrorCode::InvalidInput, "--geometry must be auto, euclidean or hyperbolic");
  return t.genus() > 1 ? Geometry::Hyperbolic : Geometry::Euclidean;
}

json report_json(const SolveReport& r) {
  json j;
  j["status"] = std::string(to_string(r.status));
  j["mode"] = std::string(to_string(r.mode));
  j["geometry"] = std::string(to_string(r.geometry));
  j["iterations"] = r.iterations;
  j["residual"] = r.residual_history.empty() ? 0.0 : r.residual_history.back();
  j["residual_history"] = r.residual_history;
  j["u"] = to_vector(r.u);
  if (r.geometry == Geometry::Euclidean) {
    j["u_mean_zero"] = to_vector(r.u_mean_zero);
    j["area_before_normalization"] = r.area_before_normalization;
  }
  j["area"] = r.area;
  j["regularity"] = {{"min_angle", r.regularity.min_angle},
                     {"max_opposite_angle_sum", r.regularity.max_opposite_angle_sum}};
  if (r.mode == SolveMode::Flow) {
    j["max_flow_speed"] = r.max_flow_speed;
    j["flow_invariant_history"] = r.flow_invariant_history;
  }
  return j;
}

std::string default_tml_out(const std::string& out) {
  if (out.empty()) return {};
  std::filesystem::path p(out);
  p.replace_extension(".scaled.tml");
  return p.string();
}

int cmd_uniformize(const Config& c) {
  if (c.in.empty()) throw Error(ErrorCode::InvalidInput, "--in is required");
  MeshData data = read_mesh_file(c.in);
  Geometry geometry = choose_geometry(c, *data.triangulation);
  std::cerr << "genus " << data.triangulation->genus() << ", geometry " << to_string(geometry) << "\n";
  MeshMetric m(data.triangulation, std::move(data.lengths), geometry);
  SolveReport r = uniformize(m, solve_options(c));
  emit(c.out, report_json(r).dump(2) + "\n");
  if (!r.converged()) {
    std::cerr << "error: solver stopped with status " << to_string(r.status) << "\n";
    return kExitSolver;
  }
  std::string tml = c.tml_out.empty() ? default_tml_out(c.out) : c.tml_out;
  if (!tml.empty()) {
    std::vector<double> scaled = scaled_lengths(m, r.u);
    write_tml_file(tml, m.triangulation(), scaled);
    std::cerr << "scaled lengths written to " << tml << "\n";
  }
  std::cerr << "converged in " << r.iterations << " iterations, |K|_inf = " << r.residual_history.back() << "\n";
  return kExitOk;
}

int cmd_verify(const Config& c) {
  VerifyOptions o;
  o.seed = c.seed;
  o.fault = parse_fault(c.fault);
  std::cerr << "seed " << o.seed << "\n";
  std::vector<SuiteResult> results = run_all_suites(o);
  json suites = json::array();
  bool all = true;
  for (const auto& s : results) {
    all = all && s.passed;
    std::cerr << (s.passed ? "PASS " : "FAIL ") << s.name << " (" << s.instances << " instances)";
    if (!s.passed) std::cerr << ": " << s.detail;
    std::cerr << "\n";
    suites.push_back({{"name", s.name},
                      {"passed", s.passed},
                      {"instances", s.instances},
                      {"worst", s.worst},
                      {"tolerance", s.tolerance},
                      {"detail", s.detail}});
  }
  json j{{"seed", o.seed}, {"fault", std::string(to_string(o.fault))}, {"suites", suites}, {"passed", all}};
  std::cout << j.dump(2) << "\n";
  return all ? kExitOk : kExitCheck;
}

// Parses "8,16,32" and "k0,k0+1"; k0 stands for the smallest admissible
// octagon level.
std::vector<int> parse_resolutions(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string_view v(item);
    int base = 0;
    if (v.starts_with("k0")) {
      base = kOctagonMinLevel;
      v.remove_prefix(2);
      if (v.empty()) {
        out.push_back(base);
        continue;
      }
      if (v.front() != '+') throw Error(ErrorCode::InvalidInput, "bad resolution '" + item + "'");
      v.remove_prefix(1);
    }
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(std::string(v), &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "bad resolution '" + item + "'");
    }
    if (used != v.size()) throw Error(ErrorCode::InvalidInput, "bad resolution '" + item + "'");
    out.push_back(base + n);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidInput, "empty resolution list");
  return out;
}

// "genus2" or "genus2:amp=0.05"; returns the synthetic amplitude.
std::optional<double> parse_genus2(const std::string& spec) {
  if (spec == "genus2") return 0.1;
  constexpr std::string_view prefix = "genus2:amp=";
  if (!std::string_view(spec).starts_with(prefix)) return std::nullopt;
  try {
    std::size_t used = 0;
    std::string rest = spec.substr(prefix.size());
    double a = std::stod(rest, &used);
    if (used != rest.size() || !(std::abs(a) <= 0.1)) throw std::invalid_argument("amp");
    return a;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, "bad genus2 amplitude in '" + spec + "'");
  }
}

std::string format_csv(const StudyResult& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "resolution,h,error,residual,runtime_ms\n";
  for (const auto& row : r.rows)
    os << row.resolution << ',' << row.h << ',' << row.error << ',' << row.residual << ',' << row.runtime_ms << '\n';
  return os.str();
}

int cmd_study(const Config& c) {
  if (c.surface.empty()) throw Error(ErrorCode::InvalidInput, "--surface is required");
  SolveOptions solve = solve_options(c);
  if (auto amp = parse_genus2(c.surface)) {
    std::vector<int> levels = parse_resolutions(c.res.empty() ? "k0,k0+1" : c.res);
    StudyResult r = genus2_recovery_study(levels, *amp, solve);
    emit(c.out, format_csv(r));
    double worst = 0.0;
    for (const auto& row : r.rows) worst = std::max(worst, row.error);
    std::cerr << "max recovery error " << worst << "\n";
    return worst <= 1e-8 ? kExitOk : kExitCheck;
  }
  ConformalTorus t = ConformalTorus::parse(c.surface);
  std::vector<int> res = parse_resolutions(c.res.empty() ? "8,16,32,64" : c.res);
  StudyResult r = torus_convergence_study(t, res, solve);
  emit(c.out, format_csv(r));
  if (!r.slope) {
    std::cerr << "slope: not applicable (errors at round-off level)\n";
    return kExitOk;
  }
  std::cerr << std::setprecision(6) << "slope: " << *r.slope << " (threshold " << c.threshold << ")\n";
  return *r.slope >= c.threshold ? kExitOk : kExitCheck;
}

int cmd_mesh_gen(const Config& c) {
  if (c.surface.empty()) throw Error(ErrorCode::InvalidInput, "--surface is required");
  std::ostringstream os;
  if (parse_genus2(c.surface)) {
    std::vector<int> levels = parse_resolutions(c.res.empty() ? "k0" : c.res);
    if (levels.size() != 1) throw Error(ErrorCode::InvalidInput, "mesh-gen takes a single --res value");
    Genus2Sample s = sample_genus2_mesh(levels[0]);
    write_tml(os, s.metric.triangulation(), s.metric.lengths());
  } else {
    ConformalTorus t = ConformalTorus::parse(c.surface);
    std::vector<int> res = parse_resolutions(c.res.empty() ? "8" : c.res);
    if (res.size() != 1) throw Error(ErrorCode::InvalidInput, "mesh-gen takes a single --res value");
    TorusSample s = sample_torus_mesh(t, res[0]);
    write_tml(os, s.metric.triangulation(), s.metric.lengths());
  }
  emit(c.out, os.str());
  return kExitOk;
}

int cmd_isoperimetric(const Config& c) {
  if (c.in.empty()) throw Error(ErrorCode::InvalidInput, "--in is required");
  MeshData data = read_mesh_file(c.in);
  Graph g(*data.triangulation);
  EdgeWeight l = Eigen::Map<const Eigen::VectorXd>(data.lengths.data(), static_cast<Eigen::Index>(data.lengths.size()));
  IsoperimetricResult r = brute_force_isoperimetric_constant(g, l);
  std::vector<int> subset;
  for (int v = 0; v < g.vertex_count(); ++v)
    if ((r.extremal_subset >> v) & 1u) subset.push_back(v);
  json j{{"constant", r.constant}, {"extremal_subset", subset}, {"vertices", g.vertex_count()}};
  emit(c.out, j.dump(2) + "\n");
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete uniformization of closed triangle meshes"};
  app.require_subcommand(1);
  Config c;

  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--mode", c.mode, "newton or flow")->check(CLI::IsMember({"newton", "flow"}));
    sub->add_option("--tol", c.tol, "tolerance on |K|_inf");
    sub->add_option("--max-iter", c.max_iter, "iteration limit");
  };

  auto* uni = app.add_subcommand("uniformize", "solve for the uniformizing conformal factor");
  uni->add_option("--in", c.in, "input mesh (.tml or .off)")->required();
  uni->add_option("--out", c.out, "report JSON (standard output when omitted)");
  uni->add_option("--tml-out", c.tml_out, "scaled-lengths TML (default: <out>.scaled.tml)");
  uni->add_option("--geometry", c.geometry, "auto, euclidean or hyperbolic")
      ->check(CLI::IsMember({"auto", "euclidean", "hyperbolic"}));
  add_solver_flags(uni);

  auto* ver = app.add_subcommand("verify", "run the randomized invariant suites");
  ver->add_option("--seed", c.seed, "random seed");
#ifdef DUNIF_TEST_HOOKS
  ver->add_option("--fault", c.fault, "inject a fault (test builds)")->check(CLI::IsMember({"none", "jacobian-sign"}));
#endif

  auto* study = app.add_subcommand("study", "convergence study on a preset surface");
  study->add_option("--surface", c.surface, "torus[:amp=..,beta=..,const=..] or genus2[:amp=..]")->required();
  study->add_option("--res", c.res, "comma-separated resolutions (k0, k0+1, ... for genus2)");
  study->add_option("--out", c.out, "CSV file (standard output when omitted)");
  study->add_option("--threshold", c.threshold, "minimum torus slope");
  add_solver_flags(study);

  auto* gen = app.add_subcommand("mesh-gen", "write a sampled preset surface as TML");
  gen->add_option("--surface", c.surface, "torus[:...] or genus2")->required();
  gen->add_option("--res", c.res, "lattice size n (torus) or subdivision level (genus2)");
  gen->add_option("--out", c.out, "TML file (standard output when omitted)");

  auto* iso = app.add_subcommand("isoperimetric", "brute-force isoperimetric constant of a small mesh");
  iso->add_option("--in", c.in, "input mesh")->required();
  iso->add_option("--out", c.out, "JSON file (standard output when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, std::cerr, std::cerr);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*uni) return cmd_uniformize(c);
    if (*ver) return cmd_verify(c);
    if (*study) return cmd_study(c);
    if (*gen) return cmd_mesh_gen(c);
    if (*iso) return cmd_isoperimetric(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
