// vvlab command line: run, report, equiv, validate.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "vvl/vvl.h"

namespace {

int exit_code(vvl_status s) {
  switch (s) {
    case VVL_OK:
      return 0;
    case VVL_ERR_CONFIG:
    case VVL_ERR_INVALID_ARGUMENT:
    case VVL_ERR_GEOMETRY:
    case VVL_ERR_SUPPORT:
    case VVL_ERR_MISMATCH:
      return 2;
    case VVL_ERR_BLOWUP:
    case VVL_ERR_CFL:
    case VVL_ERR_NON_FINITE:
    case VVL_ERR_NEGATIVE_DENSITY:
      return 3;
    case VVL_ERR_IO:
      return 4;
    default:
      return 1;
  }
}

int report_failure(vvl_status s) {
  std::fprintf(stderr, "vvlab: %s\n", vvl_last_error());
  return exit_code(s);
}

struct Common {
  std::string config;
  std::string members;
  std::string out;
  int threads = 1;
  std::string profile = "default";
};

bool members_of(const Common& c, int& first, int& last, int& code) {
  first = last = 0;
  if (c.members.empty()) return true;
  const vvl_status s = vvl_parse_member_range(c.members.c_str(), &first, &last);
  if (s != VVL_OK) {
    code = report_failure(s);
    return false;
  }
  return true;
}

int cmd_run(const Common& c) {
  vvl_config* cfg = nullptr;
  vvl_status s = vvl_config_load(c.config.c_str(), &cfg);
  if (s != VVL_OK) return report_failure(s);
  int first = 0, last = 0, code = 0;
  if (!members_of(c, first, last, code)) {
    vvl_config_free(cfg);
    return code;
  }
  char hash[17];
  vvl_config_hash(cfg, hash, sizeof hash);
  vvl_run_options opt{c.out.empty() ? nullptr : c.out.c_str(), first, last, c.threads};
  vvl_run_summary sum{};
  s = vvl_run(cfg, &opt, &sum);
  vvl_config_free(cfg);
  if (s != VVL_OK && s != VVL_ERR_BLOWUP) return report_failure(s);
  std::printf("config %s: %d computed, %d skipped, %d blown up\n", hash, sum.recomputed, sum.skipped, sum.blown_up);
  return s == VVL_OK ? 0 : report_failure(s);
}

int cmd_report(const Common& c, const std::string& run_dir_arg) {
  std::string run_dir = run_dir_arg;
  if (run_dir.empty()) {
    if (c.config.empty()) {
      std::fprintf(stderr, "vvlab: report needs a run directory or --config\n");
      return 2;
    }
    vvl_config* cfg = nullptr;
    const vvl_status s = vvl_config_load(c.config.c_str(), &cfg);
    if (s != VVL_OK) return report_failure(s);
    run_dir = vvl_config_output_dir(cfg);
    vvl_config_free(cfg);
  }
  int first = 0, last = 0, code = 0;
  if (!members_of(c, first, last, code)) return code;
  vvl_report_options opt{run_dir.c_str(), c.out.empty() ? nullptr : c.out.c_str(), first, last,
                         c.profile == "strict" ? 1 : 0, c.threads};
  vvl_report* rep = nullptr;
  const vvl_status s = vvl_report_run(&opt, &rep);
  if (s != VVL_OK) return report_failure(s);
  std::fputs(vvl_report_summary(rep), stdout);
  vvl_report_free(rep);
  return 0;
}

int cmd_equiv(const Common& c, const std::string& a, const std::string& b) {
  const std::string out = c.out.empty() ? std::string("equiv_out") : c.out;
  size_t rows = 0;
  double worst = 0.0;
  const vvl_status s = vvl_equiv(a.c_str(), b.c_str(), out.c_str(), &rows, &worst);
  if (s != VVL_OK) return report_failure(s);
  std::printf("%zu rows written to %s/equivalence.csv, max abs diff %.17g\n", rows, out.c_str(), worst);
  return 0;
}

int cmd_validate(const Common& c) {
  vvl_validation* v = nullptr;
  const vvl_status s = vvl_validate(c.profile == "strict" ? 1 : 0, &v);
  if (s != VVL_OK) return report_failure(s);
  int failed = 0;
  for (size_t i = 0; i < vvl_validation_count(v); ++i) {
    vvl_check chk{};
    vvl_validation_get(v, i, &chk);
    std::printf("%s %s value=%.17g tolerance=%.17g\n", chk.pass ? "PASS" : "FAIL", chk.name, chk.value,
                chk.tolerance);
    failed += chk.pass ? 0 : 1;
  }
  vvl_validation_free(v);
  std::printf("%d check(s) failed\n", failed);
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vanishing-viscosity ensemble lab"};
  app.set_version_flag("--version", std::string(vvl_version()));
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--members", c.members, "member range A..B (1-based)");
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance-profile", c.profile, "strict or default")
        ->check(CLI::IsMember({"strict", "default"}));
  };

  auto* run = app.add_subcommand("run", "solve the ensemble and write snapshots");
  run->add_option("--config", c.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  add_common(run);

  std::string run_dir;
  auto* report = app.add_subcommand("report", "compute diagnostics for a finished run");
  report->add_option("run_dir", run_dir, "run directory (default: the config's output dir)");
  report->add_option("--config", c.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  add_common(report);

  std::string run_a, run_b;
  auto* equiv = app.add_subcommand("equiv", "compare two runs by statistical equivalence");
  equiv->add_option("run_a", run_a)->required();
  equiv->add_option("run_b", run_b)->required();
  add_common(equiv);

  auto* validate = app.add_subcommand("validate", "run the built-in oracle and property checks");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*run) return cmd_run(c);
  if (*report) return cmd_report(c, run_dir);
  if (*equiv) return cmd_equiv(c, run_a, run_b);
  return cmd_validate(c);
}
