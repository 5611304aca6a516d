#include "vvl/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "vvl/defect.hpp"
#include "vvl/error.hpp"
#include "vvl/snapshot_io.hpp"

namespace vvl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";

std::string member_dir_name(int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "member_%04d", n);
  return buf;
}

std::string snapshot_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snap_%04d.vvl", k);
  return buf;
}

void make_dirs(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  require(!ec, ErrorCode::kIo, "cannot create directory " + p.string() + ": " + ec.message());
}

std::string read_text(const fs::path& p) {
  std::ifstream is(p);
  require(static_cast<bool>(is), ErrorCode::kIo, "cannot open " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text_atomic(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    require(static_cast<bool>(os), ErrorCode::kIo, "cannot open for writing: " + tmp.string());
    os << text;
    os.flush();
    require(static_cast<bool>(os), ErrorCode::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  require(!ec, ErrorCode::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::pair<int, int> resolve_range(MemberRange r, int members) {
  const int first = r.first == 0 ? 1 : r.first;
  const int last = r.last == 0 ? members : r.last;
  require(first >= 1 && first <= last && last <= members, ErrorCode::kConfig,
          "member range outside 1.." + std::to_string(members));
  return {first, last};
}

bool files_readable(const fs::path& dir, const MemberRecord& rec, std::size_t expected) {
  if (rec.files.size() != expected) return false;
  try {
    for (const auto& f : rec.files) read_planes((dir / f).string(), 3);
  } catch (const Error&) {
    return false;
  }
  return true;
}

MemberRecord solve_member(const ExperimentConfig& cfg, const Grid& grid, int n, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  MemberRecord rec;
  rec.index = n;
  rec.epsilon = member_epsilon(cfg, n);
  rec.seed = member_seed(cfg, n);
  const FluidState init = make_initial_state(cfg, grid, n);
  const Trajectory traj = solve(init, make_solver_config(cfg, n), grid, cfg.law, cfg.visc, cfg.far);
  const fs::path dir = out / member_dir_name(n);
  std::error_code ec;
  fs::remove_all(dir, ec);
  make_dirs(dir);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const std::string rel = member_dir_name(n) + "/" + snapshot_name(static_cast<int>(k));
    write_snapshot((out / rel).string(), traj.states[k], grid, traj.epsilon);
    rec.files.push_back(rel);
    rec.times.push_back(traj.states[k].time);
  }
  rec.dissipation = traj.dissipation;
  rec.floor_hits = traj.floor_hits;
  rec.status = traj.status == TrajectoryStatus::kComplete ? "complete" : "blowup";
  rec.message = traj.message;
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::string window_label(double a, double b) { return format_double(a) + ":" + format_double(b); }

std::vector<std::size_t> resolve_schedule(const std::vector<std::size_t>& configured, std::size_t n_max) {
  std::vector<std::size_t> s;
  if (configured.empty()) {
    for (std::size_t n = 1; n < n_max; n *= 2) s.push_back(n);
    s.push_back(n_max);
  } else {
    for (std::size_t n : configured)
      if (n <= n_max) s.push_back(n);
    if (s.empty()) s.push_back(n_max);
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::vector<CompositeBump> make_composites(const ExperimentConfig& cfg) {
  std::vector<CompositeBump> out;
  const Vec2 m_inf = cfg.far.momentum();
  const double scale = std::max({cfg.far.rho, norm(m_inf), 1e-12});
  for (int j = 0; j < cfg.observables.composites; ++j) {
    const double rho0 = cfg.far.rho * (0.8 + 0.4 * (j % 4) / 3.0);
    const Vec2 m0 = m_inf + (0.2 * scale) * Vec2{((j / 4) % 2) - 0.5, ((j / 8) % 2) - 0.5};
    out.push_back({{rho0, m0.x, m0.y}, 0.5 * scale, 1.0});
  }
  return out;
}

}  // namespace

MemberRange parse_member_range(const std::string& text) {
  MemberRange r;
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      r.first = r.last = std::stoi(text, &used);
      require(used == text.size(), ErrorCode::kConfig, "bad member range: " + text);
    } else {
      const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
      r.first = std::stoi(a, &used);
      require(used == a.size(), ErrorCode::kConfig, "bad member range: " + text);
      r.last = std::stoi(b, &used);
      require(used == b.size(), ErrorCode::kConfig, "bad member range: " + text);
    }
  } catch (const std::logic_error&) {
    fail(ErrorCode::kConfig, "bad member range: " + text);
  }
  require(r.first >= 1 && r.last >= r.first, ErrorCode::kConfig, "bad member range: " + text);
  return r;
}

RunManifest read_manifest(const std::string& run_dir) {
  const fs::path p = fs::path(run_dir) / kManifestName;
  RunManifest m;
  try {
    const json j = json::parse(read_text(p));
    m.config_hash = j.at("config_hash").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.config_json = j.at("config").dump();
    for (const auto& e : j.at("members")) {
      MemberRecord r;
      r.index = e.at("index").get<int>();
      r.epsilon = e.at("epsilon").get<double>();
      r.seed = e.at("seed").get<std::uint64_t>();
      r.status = e.at("status").get<std::string>();
      r.message = e.at("message").get<std::string>();
      r.files = e.at("files").get<std::vector<std::string>>();
      r.times = e.at("times").get<std::vector<double>>();
      r.dissipation = e.at("dissipation").get<std::vector<double>>();
      r.floor_hits = e.at("floor_hits").get<std::size_t>();
      r.wall_seconds = e.at("wall_seconds").get<double>();
      m.members.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kIo, "malformed manifest " + p.string() + ": " + e.what());
  }
  std::sort(m.members.begin(), m.members.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  return m;
}

void write_manifest(const std::string& run_dir, const RunManifest& m) {
  json j;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["config"] = json::parse(m.config_json);
  json members = json::array();
  for (const auto& r : m.members)
    members.push_back({{"index", r.index},
                       {"epsilon", r.epsilon},
                       {"seed", r.seed},
                       {"status", r.status},
                       {"message", r.message},
                       {"files", r.files},
                       {"times", r.times},
                       {"dissipation", r.dissipation},
                       {"floor_hits", r.floor_hits},
                       {"wall_seconds", r.wall_seconds}});
  j["members"] = members;
  write_text_atomic(fs::path(run_dir) / kManifestName, j.dump(2) + "\n");
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  const fs::path out = opt.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(opt.out_dir);
  make_dirs(out);
  const std::string hash = config_hash(cfg);
  const Grid grid(cfg.grid);
  const auto [first, last] = resolve_range(opt.members, cfg.members);

  std::map<int, MemberRecord> records;
  if (fs::exists(out / kManifestName)) {
    const RunManifest old = read_manifest(out.string());
    require(old.config_hash == hash, ErrorCode::kConfig,
            "output directory holds a run with a different config hash (" + old.config_hash + ")");
    for (const auto& r : old.members) records[r.index] = r;
  }

  RunResult result;
  std::vector<int> todo;
  for (int n = first; n <= last; ++n) {
    const auto it = records.find(n);
    if (it != records.end() && it->second.status == "complete" &&
        files_readable(out, it->second, cfg.solver.snapshots.size()))
      result.skipped.push_back(n);
    else
      todo.push_back(n);
  }

  std::vector<MemberRecord> fresh(todo.size());
  std::vector<std::exception_ptr> errors(todo.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      try {
        fresh[i] = solve_member(cfg, grid, todo[i], out);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (errors[i]) continue;
    records[todo[i]] = fresh[i];
    result.recomputed.push_back(todo[i]);
    if (fresh[i].status != "complete") result.blown_up.push_back(todo[i]);
  }

  RunManifest m;
  m.config_hash = hash;
  m.version = VVL_VERSION;
  m.config_json = normalized_config(cfg);
  for (auto& [n, r] : records) m.members.push_back(r);
  write_manifest(out.string(), m);

  std::vector<IndexEntry> index;
  for (const auto& r : m.members)
    for (std::size_t k = 0; k < r.files.size(); ++k) index.push_back({r.index, r.epsilon, r.times[k], r.files[k]});
  write_index((out / "index.csv").string(), index);

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  result.manifest = std::move(m);
  return result;
}

LoadedRun load_run(const std::string& run_dir, MemberRange range) {
  LoadedRun run{.config = {}, .manifest = read_manifest(run_dir), .ensemble = {}, .excluded = {}};
  run.config = parse_config(run.manifest.config_json);
  require(config_hash(run.config) == run.manifest.config_hash, ErrorCode::kConfig,
          "manifest config does not match its hash");
  const auto grid = std::make_shared<const Grid>(run.config.grid);
  run.ensemble.grid = grid;
  run.ensemble.law = run.config.law;
  run.ensemble.far = run.config.far;
  run.ensemble.visc = run.config.visc;
  const auto [first, last] = resolve_range(range, run.config.members);
  std::map<int, const MemberRecord*> by_index;
  for (const auto& r : run.manifest.members) by_index[r.index] = &r;
  for (int n = first; n <= last; ++n) {
    const auto it = by_index.find(n);
    if (it == by_index.end() || it->second->status != "complete") {
      run.excluded.push_back(n);
      continue;
    }
    const MemberRecord& rec = *it->second;
    require(rec.files.size() == run.config.solver.snapshots.size() && rec.dissipation.size() == rec.files.size(),
            ErrorCode::kIo, "manifest entry for member " + std::to_string(n) + " is incomplete");
    Trajectory tr;
    tr.epsilon = rec.epsilon;
    tr.dissipation = rec.dissipation;
    tr.floor_hits = rec.floor_hits;
    for (const auto& f : rec.files) tr.states.push_back(read_snapshot((fs::path(run_dir) / f).string(), *grid));
    run.ensemble.members.push_back(std::move(tr));
  }
  return run;
}

ReportResult run_report(const ReportOptions& opt) {
  const LoadedRun run = load_run(opt.run_dir, opt.members);
  const ExperimentConfig& cfg = run.config;
  const Ensemble& ens = run.ensemble;
  require(ens.size() >= 1, ErrorCode::kIo, "no complete members to report on");
  validate(ens);
  const Grid& grid = *ens.grid;
  const fs::path out = opt.out_dir.empty() ? fs::path(opt.run_dir) / "report" : fs::path(opt.out_dir);
  make_dirs(out);

  const std::size_t n_max = ens.size();
  const auto schedule = resolve_schedule(cfg.diagnostics.schedule, n_max);
  const auto times = ens.times();
  const bool timed = times.size() >= 2;
  const TimeWeight psi = cfg.observables.psi;
  const std::string all_window = window_label(times.front(), times.back());
  const std::string psi_window = window_label(psi.begin, psi.end);
  const double psd_tol = opt.strict ? 1e-12 : 1e-10;

  const auto& d = cfg.diagnostics;
  CompactRegion region;
  try {
    region = rectangle_cells(grid, d.region[0], d.region[1], d.region[2], d.region[3]);
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, std::string("diagnostics.region: ") + e.what());
  }
  const SpaceTimeSet set = full_window(ens, region);
  const auto composites = make_composites(cfg);
  std::vector<CompositeTable> reference;
  for (const auto& b : composites) reference.push_back(composite_average(ens, n_max, b, region));
  const auto bary_full = barycenter(ens, n_max);
  const Coercivity coer = calibrate_coercivity(cfg.law, cfg.far);

  ObservableLibrary lib;
  if (timed) lib = make_library(grid, psi, cfg.observables.scalars, cfg.observables.vectors);
  const std::size_t checks = std::min<std::size_t>(std::max(d.library_checks, 0), lib.vectors.size());

  const Vec2 x0 = cfg.grid.obstacle.center();
  const ConvexProfile profile{d.profile_radius, d.profile_plateau};

  // Expectation composites centered at the full-ensemble functional means.
  std::vector<FunctionalObservable> functionals;
  if (timed) {
    for (std::size_t i = 0; i < std::min<std::size_t>(lib.scalars.size(), checks); ++i) {
      FunctionalObservable fo;
      fo.scalars = {lib.scalars[i]};
      fo.psi = psi;
      double mean = 0.0;
      for (std::size_t n = 0; n < n_max; ++n)
        mean += (observable_arguments(ens.members[n], grid, fo)[0] - mean) / static_cast<double>(n + 1);
      fo.b = {{mean}, 0.5 * std::max(std::abs(mean), 1e-3), 1.0};
      functionals.push_back(fo);
    }
  }

  std::vector<DiagnosticRow> rows;
  auto add = [&](std::size_t n, const std::string& diag, const std::string& obs, const std::string& win, double v) {
    rows.push_back({n, diag, obs, win, v});
  };

  const auto s_rows = s_convergence_metric(ens, schedule, composites, reference, set);
  const auto f_rows = statistical_convergence_fraction(ens, bary_full, d.threshold, set, schedule);

  CesaroAccumulator acc(ens.grid, ens.law, ens.far);
  std::size_t next = 0;
  for (std::size_t n = 1; n <= n_max && next < schedule.size(); ++n) {
    acc.add(ens.members[n - 1]);
    if (schedule[next] != n) continue;
    ++next;
    const CesaroField& field = acc.field();

    const double budget = energy_budget(ens, n);
    add(n, "energy_budget", "-", all_window, budget);
    if (d.budget > 0.0) add(n, "budget_exceeded", "-", all_window, budget > d.budget ? 1.0 : 0.0);
    add(n, "infeasible_samples", "-", all_window, static_cast<double>(field.infeasible_cells));

    const DefectField defect = reynolds_defect(field, grid, ens.law);
    const auto w = timed ? trapezoid_weights(times, times.front(), times.back()) : std::vector<double>{1.0};
    const double span = timed ? times.back() - times.front() : 1.0;
    double trace_avg = 0.0, trace_max = 0.0;
    for (std::size_t k = 0; k < defect.snapshots.size(); ++k) {
      double integral = 0.0;
      for (std::size_t c : grid.fluid_cells()) {
        const double tr = defect.snapshots[k].R[c].trace();
        integral += tr;
        trace_max = std::max(trace_max, tr);
      }
      trace_avg += w[k] * integral * grid.cell_area() / span;
    }
    add(n, "defect_trace_integral", "-", all_window, trace_avg);
    add(n, "defect_max_trace", "-", all_window, trace_max);
    const PsdReport psd = psd_check(defect, grid, psd_tol);
    add(n, "psd_min_scaled_eigenvalue", "-", all_window, psd.min_scaled_eigenvalue);
    add(n, "psd_pass", "-", all_window, psd.pass ? 1.0 : 0.0);
    const SandwichReport sw = trace_energy_sandwich(field, grid, ens.law);
    add(n, "sandwich_min_slack", "-", all_window, sw.min_slack);

    if (timed) {
      const auto bary = barycenter(field);
      for (std::size_t j = 0; j < checks; ++j) {
        const std::string id = std::to_string(j);
        const EulerResidual er = euler_residual(bary, grid, ens.law, lib.scalars[std::min(j, lib.scalars.size() - 1)],
                                                lib.vectors[j], psi);
        add(n, "euler_continuity_barycenter", id, psi_window, er.continuity);
        add(n, "euler_momentum_barycenter", id, psi_window, er.momentum);
        const DefectResidualReport dr = defect_momentum_residual(ens, n, defect, lib.vectors[j], psi);
        add(n, "defect_momentum_residual", id, psi_window, dr.residual);
        add(n, "defect_identity_gap", id, psi_window, dr.identity_gap);
        add(n, "viscous_remainder", id, psi_window, dr.viscous_remainder);
        add(n, "viscous_remainder_bound", id, psi_window, dr.remainder_bound);
      }
      if (!lib.scalars.empty() && !lib.vectors.empty()) {
        const ModulusReport mr = modulus_of_continuity(ens, n, lib.scalars[0], lib.vectors[0], coer.constant);
        add(n, "lipschitz_stat", "0", all_window, mr.lipschitz_stat);
        add(n, "lipschitz_bound", "0", all_window, mr.lipschitz_bound);
        add(n, "holder_half_stat", "0", all_window, mr.holder_half_stat);
        add(n, "holder_half_bound", "0", all_window, mr.holder_half_bound);
      }
      for (std::size_t i = 0; i < functionals.size(); ++i)
        add(n, "expectation", std::to_string(i), psi_window, expectation(ens, n, functionals[i]));
      for (double L : d.pairing_L) {
        if (L < profile.radius) continue;
        const PairingReport pr = convex_pairing(defect, grid, profile, x0, L, psi);
        const std::string id = "L=" + format_double(L);
        add(n, "pairing", id, psi_window, pr.pairing);
        add(n, "pairing_hessian", id, psi_window, pr.hessian_term);
        add(n, "pairing_cutoff", id, psi_window, pr.cutoff_term);
        add(n, "pairing_trace_lower_bound", id, psi_window, pr.trace_lower_bound);
        add(n, "pairing_truncated", id, psi_window, pr.truncated ? 1.0 : 0.0);
      }
    }
    for (const auto& r : s_rows)
      if (r.n == n) add(n, "s_distance", std::to_string(r.composite), all_window, r.distance);
    for (const auto& r : f_rows)
      if (r.n == n) add(n, "i8_fraction", "threshold=" + format_double(d.threshold), all_window, r.fraction);
    for (const auto& r : far_field_decay(ens, n, x0, d.decay_L)) {
      const std::string id = "L=" + format_double(r.L);
      add(n, "far_field_decay", id, all_window, r.value);
      add(n, "far_field_split_inside", id, all_window, r.split_inside);
      add(n, "far_field_split_outside", id, all_window, r.split_outside);
      add(n, "far_field_bound_inside", id, all_window, r.bound_inside);
      add(n, "far_field_bound_outside", id, all_window, r.bound_outside);
      add(n, "far_field_truncated", id, all_window, r.truncated ? 1.0 : 0.0);
    }

    if (n == n_max) {
      make_dirs(out / "defect");
      const auto bary = barycenter(field);
      for (std::size_t k = 0; k < defect.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "defect_%04zu.vvl", k);
        write_defect((out / "defect" / name).string(), defect.snapshots[k], bary[k], grid, 0.0);
      }
    }
  }

  ReportResult res;
  res.rows = std::move(rows);
  std::size_t floor_hits = 0;
  for (const auto& m : ens.members) floor_hits += m.floor_hits;
  auto& h = res.header;
  h.emplace_back("version", VVL_VERSION);
  h.emplace_back("config_hash", run.manifest.config_hash);
  h.emplace_back("grid", std::to_string(grid.nx()) + "x" + std::to_string(grid.ny()));
  h.emplace_back("box", window_label(grid.x_min(), grid.x_max()) + " x " + window_label(grid.y_min(), grid.y_max()));
  h.emplace_back("boundary", grid.boundary() == BoundaryKind::kPeriodic ? "periodic" : "far_field");
  h.emplace_back("solid_cells", std::to_string(grid.count(CellKind::kSolid)));
  h.emplace_back("law_a", format_double(cfg.law.a));
  h.emplace_back("law_gamma", format_double(cfg.law.gamma));
  h.emplace_back("far_rho", format_double(cfg.far.rho));
  h.emplace_back("far_u", format_double(cfg.far.u.x) + " " + format_double(cfg.far.u.y));
  h.emplace_back("viscosity", format_double(cfg.visc.mu) + " " + format_double(cfg.visc.lambda));
  h.emplace_back("epsilon_schedule",
                 cfg.epsilon.kind == EpsilonSchedule::Kind::kHarmonic ? "harmonic" : "geometric");
  h.emplace_back("epsilon_eps0", format_double(cfg.epsilon.eps0));
  h.emplace_back("epsilon_ratio", format_double(cfg.epsilon.ratio));
  h.emplace_back("dirac", cfg.dirac ? "1" : "0");
  h.emplace_back("members_used", std::to_string(n_max));
  std::string excluded;
  for (int e : run.excluded) excluded += (excluded.empty() ? "" : " ") + std::to_string(e);
  h.emplace_back("members_excluded", excluded.empty() ? "-" : excluded);
  h.emplace_back("budget_configured", format_double(d.budget));
  h.emplace_back("budget_measured", format_double(energy_budget(ens, n_max)));
  h.emplace_back("coercivity_constant", format_double(coer.constant));
  h.emplace_back("coercivity_inequality",
                 "phi_q(|m - m_inf|) + phi_gamma(|rho - rho_inf|) <= c E_rel; phi_s(t) = t^2 for t <= 1 and t^s beyond");
  h.emplace_back("coercivity_q", format_double(coer.exponent_momentum));
  h.emplace_back("coercivity_sample", std::to_string(coer.samples_per_axis) + "^3 on [0, " +
                                          format_double(coer.sample_range) + "], margin " + format_double(coer.margin));
  h.emplace_back("region_K", format_double(d.region[0]) + " " + format_double(d.region[1]) + " " +
                                 format_double(d.region[2]) + " " + format_double(d.region[3]));
  h.emplace_back("density_floor_hits", std::to_string(floor_hits));
  h.emplace_back("tolerance_profile", opt.strict ? "strict" : "default");

  {
    std::ofstream os(out / "header.csv", std::ios::trunc);
    require(static_cast<bool>(os), ErrorCode::kIo, "cannot write header.csv");
    os << "key,value\n";
    for (const auto& [k, v] : h) os << k << ',' << v << '\n';
    require(static_cast<bool>(os), ErrorCode::kIo, "write failed: header.csv");
  }
  {
    std::ofstream os(out / "diagnostics.csv", std::ios::trunc);
    require(static_cast<bool>(os), ErrorCode::kIo, "cannot write diagnostics.csv");
    os << "N,diagnostic,observable,window,value\n";
    for (const auto& r : res.rows)
      os << r.n << ',' << r.diagnostic << ',' << r.observable << ',' << r.window << ',' << format_double(r.value)
         << '\n';
    require(static_cast<bool>(os), ErrorCode::kIo, "write failed: diagnostics.csv");
  }

  auto series = [&](const std::string& diag, const std::string& obs) {
    std::string s;
    for (const auto& r : res.rows)
      if (r.diagnostic == diag && (obs.empty() || r.observable == obs))
        s += "  N=" + std::to_string(r.n) + ": " + format_double(r.value) + "\n";
    return s.empty() ? std::string("  (not computed)\n") : s;
  };
  std::ostringstream sum;
  sum << "run directory: " << opt.run_dir << "\n";
  sum << "config hash: " << run.manifest.config_hash << "\n";
  sum << "members used: " << n_max << ", excluded: " << (excluded.empty() ? "-" : excluded) << "\n\n";
  sum << "Reynolds defect, time-averaged integral of trace R:\n" << series("defect_trace_integral", "-");
  sum << "defect PSD (1 = pass):\n" << series("psd_pass", "-");
  sum << "Euler momentum residual of the barycenter (observable 0):\n" << series("euler_momentum_barycenter", "0");
  sum << "S-convergence L1 distance (composite 0):\n" << series("s_distance", "0");
  sum << "i8 fraction (threshold " << format_double(d.threshold) << "):\n" << series("i8_fraction", "");
  sum << "energy budget:\n" << series("energy_budget", "-");
  res.summary = sum.str();
  {
    std::ofstream os(out / "summary.txt", std::ios::trunc);
    require(static_cast<bool>(os), ErrorCode::kIo, "cannot write summary.txt");
    os << res.summary;
  }
  return res;
}

std::vector<EquivalenceRow> run_equivalence(const std::string& run_a, const std::string& run_b,
                                            const std::string& out_dir) {
  const LoadedRun a = load_run(run_a);
  const LoadedRun b = load_run(run_b);
  require(a.ensemble.size() >= 1 && b.ensemble.size() >= 1, ErrorCode::kIo, "both runs need complete members");
  const ObservableLibrary lib = make_library(*a.ensemble.grid, a.config.observables.psi, a.config.observables.scalars,
                                             a.config.observables.vectors);
  const auto rows = statistical_equivalence_report(a.ensemble, b.ensemble, lib);
  make_dirs(out_dir);
  write_equivalence_csv((fs::path(out_dir) / "equivalence.csv").string(), rows);
  return rows;
}

}  // namespace vvl
