#include "vvl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "vvl/error.hpp"

namespace vvl {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  require(obj.is_object(), ErrorCode::kConfig, "section '" + section + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    require(ok.count(key) > 0, ErrorCode::kConfig, "unknown key '" + key + "' in section '" + section + "'");
}

template <class T>
T value_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kConfig, std::string("bad value for '") + key + "'");
  }
}

Vec2 vec_or(const json& obj, const char* key, Vec2 fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = value_or<std::vector<double>>(obj, key, {});
  require(v.size() == 2, ErrorCode::kConfig, std::string("'") + key + "' must have two entries");
  return {v[0], v[1]};
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

const json& section(const json& root, const char* name) {
  static const json empty = json::object();
  return root.contains(name) ? root.at(name) : empty;
}

}  // namespace

double EpsilonSchedule::at(int n) const {
  require(n >= 1, ErrorCode::kInvalidArgument, "epsilon index starts at 1");
  return kind == Kind::kHarmonic ? eps0 / n : eps0 * std::pow(ratio, n);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::next() { return splitmix64(seed_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

TimeWeight default_time_weight(const std::vector<double>& times) {
  require(!times.empty(), ErrorCode::kConfig, "no snapshot times");
  const double t0 = times.front(), t1 = times.back();
  const double span = t1 - t0;
  TimeWeight w;
  w.begin = t0 + 0.05 * span;
  w.end = t1 - 0.05 * span;
  w.ramp = 0.25 * (w.end - w.begin);
  return w;
}

void finalize_config(ExperimentConfig& cfg, int snapshot_count) {
  const Grid grid(cfg.grid);  // validates the grid section
  validate(cfg.law);
  validate(cfg.far);
  validate(cfg.visc);
  require(cfg.members >= 1, ErrorCode::kConfig, "ensemble needs at least one member");
  require(cfg.epsilon.eps0 >= 0.0, ErrorCode::kConfig, "eps0 must be >= 0");
  if (cfg.epsilon.kind == EpsilonSchedule::Kind::kGeometric)
    require(cfg.epsilon.ratio > 0.0 && cfg.epsilon.ratio < 1.0, ErrorCode::kConfig, "geometric ratio must lie in (0, 1)");
  require(cfg.initial.width > 0.0, ErrorCode::kConfig, "initial width must be > 0");
  require(cfg.initial.amplitude > -0.5, ErrorCode::kConfig, "initial amplitude must exceed -0.5");

  if (cfg.solver.snapshots.empty()) {
    require(snapshot_count >= 1, ErrorCode::kConfig, "snapshot_count must be >= 1");
    for (int k = 0; k < snapshot_count; ++k)
      cfg.solver.snapshots.push_back(snapshot_count == 1 ? cfg.solver.t_end
                                                         : cfg.solver.t_end * k / (snapshot_count - 1));
  }
  SolverConfig sc;
  sc.cfl = cfg.solver.cfl;
  sc.t_end = cfg.solver.t_end;
  sc.snapshot_times = cfg.solver.snapshots;
  validate(sc);

  auto& obs = cfg.observables;
  require(obs.scalars >= 1 && obs.vectors >= 1 && obs.composites >= 1, ErrorCode::kConfig,
          "observable counts must be >= 1");
  if (obs.psi.end <= obs.psi.begin || obs.psi.ramp <= 0.0) obs.psi = default_time_weight(cfg.solver.snapshots);

  auto& d = cfg.diagnostics;
  const double lx = cfg.grid.x_max - cfg.grid.x_min, ly = cfg.grid.y_max - cfg.grid.y_min;
  if (d.region[1] <= d.region[0] || d.region[3] <= d.region[2])
    d.region = {cfg.grid.x_min + 0.1 * lx, cfg.grid.x_min + 0.35 * lx, cfg.grid.y_min + 0.1 * ly,
                cfg.grid.y_min + 0.35 * ly};
  const Vec2 center = cfg.grid.obstacle.center();
  if (d.profile_radius <= 0.0 && !cfg.grid.obstacle.empty())
    d.profile_radius = cfg.grid.obstacle.enclosing_radius(center);
  const double small = std::min(lx, ly);
  if (d.decay_L.empty()) d.decay_L = {0.0625 * small, 0.125 * small, 0.25 * small};
  if (d.pairing_L.empty()) {
    const double base = std::max(d.profile_radius, 0.125 * small);
    d.pairing_L = {base, 2.0 * base};
  }
  require(d.threshold >= 0.0, ErrorCode::kConfig, "threshold must be >= 0");
  require(d.profile_plateau > 0.0, ErrorCode::kConfig, "profile plateau must be > 0");
  for (std::size_t n : d.schedule) require(n >= 1, ErrorCode::kConfig, "schedule entries must be >= 1");
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "root", {"grid", "gas", "far_field", "viscosity", "epsilon", "ensemble", "initial", "solver",
                            "observables", "diagnostics", "output"});
  ExperimentConfig cfg;

  const json& g = section(root, "grid");
  check_keys(g, "grid", {"nx", "ny", "x_min", "x_max", "y_min", "y_max", "boundary", "obstacle"});
  cfg.grid.nx = value_or(g, "nx", cfg.grid.nx);
  cfg.grid.ny = value_or(g, "ny", cfg.grid.ny);
  cfg.grid.x_min = value_or(g, "x_min", cfg.grid.x_min);
  cfg.grid.x_max = value_or(g, "x_max", cfg.grid.x_max);
  cfg.grid.y_min = value_or(g, "y_min", cfg.grid.y_min);
  cfg.grid.y_max = value_or(g, "y_max", cfg.grid.y_max);
  const auto boundary = value_or<std::string>(g, "boundary", "far_field");
  require(boundary == "far_field" || boundary == "periodic", ErrorCode::kConfig, "boundary: far_field | periodic");
  cfg.grid.boundary = boundary == "periodic" ? BoundaryKind::kPeriodic : BoundaryKind::kFarField;
  if (g.contains("obstacle")) {
    const json& o = g.at("obstacle");
    check_keys(o, "grid.obstacle", {"kind", "center", "radius", "vertices"});
    const auto kind = value_or<std::string>(o, "kind", "none");
    if (kind == "disc") {
      cfg.grid.obstacle.shape = Disc{vec_or(o, "center", {}), value_or(o, "radius", 0.25)};
    } else if (kind == "polygon") {
      const auto verts = value_or<std::vector<std::vector<double>>>(o, "vertices", {});
      ConvexPolygon poly;
      for (const auto& v : verts) {
        require(v.size() == 2, ErrorCode::kConfig, "polygon vertices need two coordinates");
        poly.vertices.push_back({v[0], v[1]});
      }
      cfg.grid.obstacle.shape = poly;
    } else {
      require(kind == "none", ErrorCode::kConfig, "obstacle kind: none | disc | polygon");
    }
  }

  const json& gas = section(root, "gas");
  check_keys(gas, "gas", {"a", "gamma"});
  cfg.law.a = value_or(gas, "a", cfg.law.a);
  cfg.law.gamma = value_or(gas, "gamma", cfg.law.gamma);

  const json& far = section(root, "far_field");
  check_keys(far, "far_field", {"rho", "u"});
  cfg.far.rho = value_or(far, "rho", cfg.far.rho);
  cfg.far.u = vec_or(far, "u", cfg.far.u);

  const json& visc = section(root, "viscosity");
  check_keys(visc, "viscosity", {"mu", "lambda"});
  cfg.visc.mu = value_or(visc, "mu", cfg.visc.mu);
  cfg.visc.lambda = value_or(visc, "lambda", cfg.visc.lambda);

  const json& eps = section(root, "epsilon");
  check_keys(eps, "epsilon", {"schedule", "eps0", "ratio"});
  const auto sched = value_or<std::string>(eps, "schedule", "harmonic");
  require(sched == "harmonic" || sched == "geometric", ErrorCode::kConfig, "epsilon schedule: harmonic | geometric");
  cfg.epsilon.kind = sched == "geometric" ? EpsilonSchedule::Kind::kGeometric : EpsilonSchedule::Kind::kHarmonic;
  cfg.epsilon.eps0 = value_or(eps, "eps0", cfg.epsilon.eps0);
  cfg.epsilon.ratio = value_or(eps, "ratio", cfg.epsilon.ratio);

  const json& ens = section(root, "ensemble");
  check_keys(ens, "ensemble", {"members", "seed", "dirac"});
  cfg.members = value_or(ens, "members", cfg.members);
  cfg.seed = value_or(ens, "seed", cfg.seed);
  cfg.dirac = value_or(ens, "dirac", cfg.dirac);

  const json& ini = section(root, "initial");
  check_keys(ini, "initial", {"family", "amplitude", "width", "center", "mode"});
  const auto fam = value_or<std::string>(ini, "family", "far_field");
  if (fam == "gaussian_bump") cfg.initial.family = InitialFamily::kGaussianBump;
  else if (fam == "shear_inflow") cfg.initial.family = InitialFamily::kShearInflow;
  else require(fam == "far_field", ErrorCode::kConfig, "initial family: far_field | gaussian_bump | shear_inflow");
  cfg.initial.amplitude = value_or(ini, "amplitude", cfg.initial.amplitude);
  cfg.initial.width = value_or(ini, "width", cfg.initial.width);
  cfg.initial.center = vec_or(ini, "center", cfg.initial.center);
  cfg.initial.mode = value_or(ini, "mode", cfg.initial.mode);

  const json& sol = section(root, "solver");
  check_keys(sol, "solver", {"cfl", "t_end", "snapshots", "snapshot_count", "flux", "integrator",
                                 "reconstruction"});
  cfg.solver.cfl = value_or(sol, "cfl", cfg.solver.cfl);
  cfg.solver.t_end = value_or(sol, "t_end", cfg.solver.t_end);
  cfg.solver.snapshots = value_or(sol, "snapshots", std::vector<double>{});
  const int snapshot_count = value_or(sol, "snapshot_count", 5);
  const auto flux = value_or<std::string>(sol, "flux", "rusanov");
  require(flux == "rusanov" || flux == "hll", ErrorCode::kConfig, "flux: rusanov | hll");
  cfg.solver.flux = flux == "hll" ? FluxKind::kHll : FluxKind::kRusanov;
  const auto integ = value_or<std::string>(sol, "integrator", "ssp2");
  require(integ == "ssp2" || integ == "euler", ErrorCode::kConfig, "integrator: ssp2 | euler");
  cfg.solver.integrator = integ == "euler" ? TimeIntegrator::kForwardEuler : TimeIntegrator::kSsp2;
  const auto rec = value_or<std::string>(sol, "reconstruction", "first_order");
  require(rec == "first_order" || rec == "muscl", ErrorCode::kConfig, "reconstruction: first_order | muscl");
  cfg.solver.reconstruction = rec == "muscl" ? Reconstruction::kMuscl : Reconstruction::kFirstOrder;

  const json& obs = section(root, "observables");
  check_keys(obs, "observables", {"scalars", "vectors", "composites", "psi"});
  cfg.observables.scalars = value_or(obs, "scalars", cfg.observables.scalars);
  cfg.observables.vectors = value_or(obs, "vectors", cfg.observables.vectors);
  cfg.observables.composites = value_or(obs, "composites", cfg.observables.composites);
  cfg.observables.psi = {0.0, 0.0, 0.0};
  if (obs.contains("psi")) {
    const json& p = obs.at("psi");
    check_keys(p, "observables.psi", {"begin", "end", "ramp"});
    cfg.observables.psi = {value_or(p, "begin", 0.0), value_or(p, "end", 0.0), value_or(p, "ramp", 0.0)};
  }

  const json& dg = section(root, "diagnostics");
  check_keys(dg, "diagnostics", {"budget", "schedule", "region", "threshold", "decay_L", "pairing_L", "profile_radius",
                                 "profile_plateau", "library_checks"});
  auto& d = cfg.diagnostics;
  d.budget = value_or(dg, "budget", d.budget);
  d.schedule = value_or(dg, "schedule", std::vector<std::size_t>{});
  if (dg.contains("region")) {
    const auto r = value_or<std::vector<double>>(dg, "region", {});
    require(r.size() == 4, ErrorCode::kConfig, "region must be [x0, x1, y0, y1]");
    d.region = {r[0], r[1], r[2], r[3]};
    require(r[1] > r[0] && r[3] > r[2], ErrorCode::kConfig, "region bounds must be ordered");
  }
  d.threshold = value_or(dg, "threshold", d.threshold);
  d.decay_L = value_or(dg, "decay_L", std::vector<double>{});
  d.pairing_L = value_or(dg, "pairing_L", std::vector<double>{});
  d.profile_radius = value_or(dg, "profile_radius", d.profile_radius);
  d.profile_plateau = value_or(dg, "profile_plateau", d.profile_plateau);
  d.library_checks = value_or(dg, "library_checks", d.library_checks);

  const json& out = section(root, "output");
  check_keys(out, "output", {"dir"});
  cfg.output_dir = value_or<std::string>(out, "dir", cfg.output_dir);

  finalize_config(cfg, snapshot_count);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::kIo, "cannot open config: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string normalized_config(const ExperimentConfig& cfg, bool include_output) {
  json root;
  json obstacle = {{"kind", "none"}};
  if (const auto* disc = std::get_if<Disc>(&cfg.grid.obstacle.shape)) {
    obstacle = {{"kind", "disc"}, {"center", vec_json(disc->center)}, {"radius", disc->radius}};
  } else if (const auto* poly = std::get_if<ConvexPolygon>(&cfg.grid.obstacle.shape)) {
    json verts = json::array();
    for (const auto& v : poly->vertices) verts.push_back(vec_json(v));
    obstacle = {{"kind", "polygon"}, {"vertices", verts}};
  }
  root["grid"] = {{"nx", cfg.grid.nx},
                  {"ny", cfg.grid.ny},
                  {"x_min", cfg.grid.x_min},
                  {"x_max", cfg.grid.x_max},
                  {"y_min", cfg.grid.y_min},
                  {"y_max", cfg.grid.y_max},
                  {"boundary", cfg.grid.boundary == BoundaryKind::kPeriodic ? "periodic" : "far_field"},
                  {"obstacle", obstacle}};
  root["gas"] = {{"a", cfg.law.a}, {"gamma", cfg.law.gamma}};
  root["far_field"] = {{"rho", cfg.far.rho}, {"u", vec_json(cfg.far.u)}};
  root["viscosity"] = {{"mu", cfg.visc.mu}, {"lambda", cfg.visc.lambda}};
  root["epsilon"] = {{"schedule", cfg.epsilon.kind == EpsilonSchedule::Kind::kGeometric ? "geometric" : "harmonic"},
                     {"eps0", cfg.epsilon.eps0},
                     {"ratio", cfg.epsilon.ratio}};
  root["ensemble"] = {{"members", cfg.members}, {"seed", cfg.seed}, {"dirac", cfg.dirac}};
  const char* fam = cfg.initial.family == InitialFamily::kGaussianBump ? "gaussian_bump"
                    : cfg.initial.family == InitialFamily::kShearInflow ? "shear_inflow"
                                                                        : "far_field";
  root["initial"] = {{"family", fam},
                     {"amplitude", cfg.initial.amplitude},
                     {"width", cfg.initial.width},
                     {"center", vec_json(cfg.initial.center)},
                     {"mode", cfg.initial.mode}};
  root["solver"] = {{"cfl", cfg.solver.cfl},
                    {"t_end", cfg.solver.t_end},
                    {"snapshots", cfg.solver.snapshots},
                    {"flux", cfg.solver.flux == FluxKind::kHll ? "hll" : "rusanov"},
                    {"integrator", cfg.solver.integrator == TimeIntegrator::kForwardEuler ? "euler" : "ssp2"},
                    {"reconstruction", cfg.solver.reconstruction == Reconstruction::kMuscl ? "muscl" : "first_order"}};
  root["observables"] = {
      {"scalars", cfg.observables.scalars},
      {"vectors", cfg.observables.vectors},
      {"composites", cfg.observables.composites},
      {"psi", {{"begin", cfg.observables.psi.begin}, {"end", cfg.observables.psi.end}, {"ramp", cfg.observables.psi.ramp}}}};
  const auto& d = cfg.diagnostics;
  root["diagnostics"] = {{"budget", d.budget},
                         {"schedule", d.schedule},
                         {"region", {d.region[0], d.region[1], d.region[2], d.region[3]}},
                         {"threshold", d.threshold},
                         {"decay_L", d.decay_L},
                         {"pairing_L", d.pairing_L},
                         {"profile_radius", d.profile_radius},
                         {"profile_plateau", d.profile_plateau},
                         {"library_checks", d.library_checks}};
  if (include_output) root["output"] = {{"dir", cfg.output_dir}};
  return root.dump();
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(normalized_config(cfg, false))));
  return buf;
}

std::uint64_t member_seed(const ExperimentConfig& cfg, int member) {
  return cfg.dirac ? cfg.seed : cfg.seed ^ static_cast<std::uint64_t>(member);
}

double member_epsilon(const ExperimentConfig& cfg, int member) { return cfg.epsilon.at(cfg.dirac ? 1 : member); }

FluidState make_initial_state(const ExperimentConfig& cfg, const Grid& grid, int member) {
  FluidState s = uniform_state(grid, cfg.far);
  const InitialSpec& ini = cfg.initial;
  if (ini.family == InitialFamily::kFarField) return s;
  CounterRng rng(member_seed(cfg, member));
  if (ini.family == InitialFamily::kGaussianBump) {
    const double amp = ini.amplitude * (0.5 + rng.uniform());
    const Vec2 c = ini.center + (0.5 * ini.width) * Vec2{rng.uniform() - 0.5, rng.uniform() - 0.5};
    for (std::size_t k : grid.fluid_cells()) {
      const double r2 = norm2(grid.center(k) - c) / (ini.width * ini.width);
      const double rho = cfg.far.rho * (1.0 + amp * std::exp(-r2));
      s.rho[k] = rho;
      s.mx[k] = rho * cfg.far.u.x;
      s.my[k] = rho * cfg.far.u.y;
    }
  } else {
    const double phase = 2.0 * M_PI * rng.uniform();
    const double ly = grid.y_max() - grid.y_min();
    const double speed = std::max(norm(cfg.far.u), 1.0);
    for (std::size_t k : grid.fluid_cells()) {
      const Vec2 x = grid.center(k);
      const double du = ini.amplitude * speed * std::sin(2.0 * M_PI * ini.mode * (x.y - grid.y_min()) / ly + phase);
      s.mx[k] = cfg.far.rho * (cfg.far.u.x + du);
      s.my[k] = cfg.far.rho * cfg.far.u.y;
    }
  }
  return s;
}

SolverConfig make_solver_config(const ExperimentConfig& cfg, int member) {
  SolverConfig sc;
  sc.cfl = cfg.solver.cfl;
  sc.t_end = cfg.solver.t_end;
  sc.snapshot_times = cfg.solver.snapshots;
  sc.flux = cfg.solver.flux;
  sc.integrator = cfg.solver.integrator;
  sc.reconstruction = cfg.solver.reconstruction;
  sc.epsilon = member_epsilon(cfg, member);
  return sc;
}

}  // namespace vvl
