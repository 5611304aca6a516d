#include "vvl/vvl.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <new>
#include <string>

#include "vvl/config.hpp"
#include "vvl/error.hpp"
#include "vvl/orchestrator.hpp"
#include "vvl/snapshot_io.hpp"
#include "vvl/thermo.hpp"
#include "vvl/validate.hpp"

struct vvl_config {
  vvl::ExperimentConfig cfg;
  std::string json;
};

struct vvl_report {
  vvl::ReportResult result;
};

struct vvl_validation {
  std::vector<vvl::ValidationCheck> checks;
};

struct vvl_snapshot {
  vvl::PlaneFile file;
};

namespace {

thread_local std::string g_last_error;

vvl_status set_error(vvl_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <class F>
vvl_status guard(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const vvl::Error& e) {
    return set_error(static_cast<vvl_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(VVL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(VVL_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(VVL_ERR_INTERNAL, "unknown error");
  }
}

void need(bool cond, const char* what) { vvl::require(cond, vvl::ErrorCode::kInvalidArgument, what); }

vvl::MemberRange range(int first, int last) { return {first, last}; }

}  // namespace

extern "C" {

const char* vvl_version(void) { return VVL_VERSION; }

const char* vvl_last_error(void) { return g_last_error.c_str(); }

vvl_status vvl_config_load(const char* path, vvl_config** out) {
  return guard([&] {
    need(path && out, "null argument");
    auto* h = new vvl_config{vvl::load_config(path), {}};
    h->json = vvl::normalized_config(h->cfg);
    *out = h;
    return VVL_OK;
  });
}

vvl_status vvl_config_parse(const char* json_text, vvl_config** out) {
  return guard([&] {
    need(json_text && out, "null argument");
    auto* h = new vvl_config{vvl::parse_config(json_text), {}};
    h->json = vvl::normalized_config(h->cfg);
    *out = h;
    return VVL_OK;
  });
}

void vvl_config_free(vvl_config* cfg) { delete cfg; }

vvl_status vvl_config_hash(const vvl_config* cfg, char* buf, size_t len) {
  return guard([&] {
    need(cfg && buf, "null argument");
    need(len >= 17, "hash buffer shorter than 17 bytes");
    const std::string h = vvl::config_hash(cfg->cfg);
    std::memcpy(buf, h.c_str(), h.size() + 1);
    return VVL_OK;
  });
}

vvl_status vvl_config_members(const vvl_config* cfg, int* out) {
  return guard([&] {
    need(cfg && out, "null argument");
    *out = cfg->cfg.members;
    return VVL_OK;
  });
}

const char* vvl_config_json(const vvl_config* cfg) { return cfg ? cfg->json.c_str() : ""; }

const char* vvl_config_output_dir(const vvl_config* cfg) { return cfg ? cfg->cfg.output_dir.c_str() : ""; }

vvl_status vvl_parse_member_range(const char* text, int* first, int* last) {
  return guard([&] {
    need(text && first && last, "null argument");
    const vvl::MemberRange r = vvl::parse_member_range(text);
    *first = r.first;
    *last = r.last;
    return VVL_OK;
  });
}

vvl_status vvl_run(const vvl_config* cfg, const vvl_run_options* options, vvl_run_summary* summary) {
  return guard([&] {
    need(cfg != nullptr, "null config");
    vvl::RunOptions opt;
    if (options) {
      if (options->out_dir) opt.out_dir = options->out_dir;
      opt.members = range(options->first_member, options->last_member);
      opt.threads = std::max(1, options->threads);
    }
    const vvl::RunResult r = vvl::run_experiment(cfg->cfg, opt);
    if (summary) {
      summary->recomputed = static_cast<int>(r.recomputed.size());
      summary->skipped = static_cast<int>(r.skipped.size());
      summary->blown_up = static_cast<int>(r.blown_up.size());
    }
    if (!r.blown_up.empty()) {
      std::string msg = "solver blow-up in member(s):";
      for (int n : r.blown_up) msg += " " + std::to_string(n);
      return set_error(VVL_ERR_BLOWUP, msg.c_str());
    }
    return VVL_OK;
  });
}

vvl_status vvl_report_run(const vvl_report_options* options, vvl_report** out) {
  return guard([&] {
    need(options && options->run_dir && out, "null argument");
    vvl::ReportOptions opt;
    opt.run_dir = options->run_dir;
    if (options->out_dir) opt.out_dir = options->out_dir;
    opt.members = range(options->first_member, options->last_member);
    opt.strict = options->strict != 0;
    opt.threads = std::max(1, options->threads);
    *out = new vvl_report{vvl::run_report(opt)};
    return VVL_OK;
  });
}

size_t vvl_report_row_count(const vvl_report* report) { return report ? report->result.rows.size() : 0; }

vvl_status vvl_report_get_row(const vvl_report* report, size_t i, vvl_report_row* row) {
  return guard([&] {
    need(report && row, "null argument");
    need(i < report->result.rows.size(), "row index out of range");
    const auto& r = report->result.rows[i];
    *row = {r.n, r.diagnostic.c_str(), r.observable.c_str(), r.window.c_str(), r.value};
    return VVL_OK;
  });
}

const char* vvl_report_summary(const vvl_report* report) { return report ? report->result.summary.c_str() : ""; }

void vvl_report_free(vvl_report* report) { delete report; }

vvl_status vvl_equiv(const char* run_a, const char* run_b, const char* out_dir, size_t* rows, double* max_abs_diff) {
  return guard([&] {
    need(run_a && run_b && out_dir, "null argument");
    const auto r = vvl::run_equivalence(run_a, run_b, out_dir);
    double worst = 0.0;
    for (const auto& row : r) worst = std::max(worst, row.abs_diff);
    if (rows) *rows = r.size();
    if (max_abs_diff) *max_abs_diff = worst;
    return VVL_OK;
  });
}

vvl_status vvl_validate(int strict, vvl_validation** out) {
  return guard([&] {
    need(out != nullptr, "null argument");
    *out = new vvl_validation{vvl::run_validation(strict != 0)};
    return VVL_OK;
  });
}

size_t vvl_validation_count(const vvl_validation* v) { return v ? v->checks.size() : 0; }

vvl_status vvl_validation_get(const vvl_validation* v, size_t i, vvl_check* check) {
  return guard([&] {
    need(v && check, "null argument");
    need(i < v->checks.size(), "check index out of range");
    const auto& c = v->checks[i];
    *check = {c.name.c_str(), c.value, c.tolerance, c.pass ? 1 : 0};
    return VVL_OK;
  });
}

void vvl_validation_free(vvl_validation* v) { delete v; }

vvl_status vvl_pressure(double a, double gamma, double rho, double* out) {
  return guard([&] {
    need(out != nullptr, "null argument");
    const vvl::GasLaw law{a, gamma};
    vvl::validate(law);
    need(std::isfinite(rho) && rho >= 0.0, "density must be finite and non-negative");
    *out = vvl::pressure(law, rho);
    return VVL_OK;
  });
}

vvl_status vvl_relative_energy(double a, double gamma, double rho_inf, double ux_inf, double uy_inf, double rho,
                               double mx, double my, double* out) {
  return guard([&] {
    need(out != nullptr, "null argument");
    const vvl::GasLaw law{a, gamma};
    const vvl::FarField far{rho_inf, {ux_inf, uy_inf}};
    vvl::validate(law);
    vvl::validate(far);
    *out = vvl::relative_energy(law, rho, {mx, my}, far);
    return VVL_OK;
  });
}

vvl_status vvl_snapshot_read(const char* path, vvl_snapshot** out) {
  return guard([&] {
    need(path && out, "null argument");
    *out = new vvl_snapshot{vvl::read_planes(path, 3)};
    return VVL_OK;
  });
}

vvl_status vvl_snapshot_info(const vvl_snapshot* s, int* nx, int* ny, double* time, double* epsilon) {
  return guard([&] {
    need(s != nullptr, "null snapshot");
    if (nx) *nx = static_cast<int>(s->file.nx);
    if (ny) *ny = static_cast<int>(s->file.ny);
    if (time) *time = s->file.time;
    if (epsilon) *epsilon = s->file.epsilon;
    return VVL_OK;
  });
}

vvl_status vvl_snapshot_plane(const vvl_snapshot* s, int plane, const double** data) {
  return guard([&] {
    need(s && data, "null argument");
    need(plane >= 0 && plane < static_cast<int>(s->file.planes.size()), "plane index out of range");
    *data = s->file.planes[static_cast<std::size_t>(plane)].data();
    return VVL_OK;
  });
}

void vvl_snapshot_free(vvl_snapshot* s) { delete s; }

}  // extern "C"
