// Command-line surface: binds JSON run configs to the library modules and
// writes CSV/SVG artifacts plus a manifest echoing the resolved config.
// Exit codes: 0 success, 2 configuration error, 3 numerical or IO failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "helmcont/helmcont.hpp"

namespace fs = std::filesystem;
using namespace helmcont;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--set", args.overrides, "override, KEY=VALUE with dotted keys");
  cmd->add_option("--out", args.out_dir, "output directory (overrides output.dir)");
  cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

RunConfig resolve(const CommonArgs& args) {
  json cfg = args.config_path.empty() ? default_config()
                                      : load_config_file(args.config_path);
  for (const std::string& setting : args.overrides) apply_override(cfg, setting);
  if (!args.out_dir.empty()) cfg["output"]["dir"] = args.out_dir;
  return resolve_config(cfg);
}

void say(const CommonArgs& args, const std::string& line) {
  if (!args.quiet) std::cout << line << "\n";
}

void prepare_out(const RunConfig& run, const std::string& command) {
  std::error_code ec;
  fs::create_directories(run.out_dir, ec);
  write_manifest(run.out_dir, command, run.resolved);
}

int cmd_continue(const CommonArgs& args) {
  const RunConfig run = resolve(args);
  prepare_out(run, "continue");
  const double k = run.k_values.front();

  ContinuationResult res;
  Manufactured man;
  if (run.kind == GeometryKind::strip) {
    man = manufacture_solution(run.experiment.solution_id, k, run.strip, run.model);
    const CauchyData noisy =
        add_noise(man.data, run.experiment.delta, run.experiment.seed);
    const SpectralCutoff cut = make_cutoff(k, run.model.E, run.eps, man.u.grid);
    res = continue_strip(noisy, run.strip, cut, &man.f, run.experiment.policy);
  } else {
    man = manufacture_solution(run.experiment.solution_id, k, run.annulus, run.model);
    const CauchyData noisy =
        add_noise(man.data, run.experiment.delta, run.experiment.seed);
    const SpectralCutoff cut = make_cutoff(k, run.model.E, run.eps, man.u.grid);
    res = continue_annulus(noisy, run.annulus, run.model, cut, nullptr,
                           run.experiment.policy);
  }

  write_field_csv((fs::path(run.out_dir) / "field.csv").string(), res.field);
  write_diagnostics_csv((fs::path(run.out_dir) / "diagnostics.csv").string(), res);
  write_trace_csv((fs::path(run.out_dir) / "trace.csv").string(), res);
  say(args, "wrote field.csv, diagnostics.csv, trace.csv to " + run.out_dir);
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const RunConfig run = resolve(args);
  if (run.k_values.size() < 2)
    throw ConfigError("cutoff.k_values", "sweep needs at least two k values");
  prepare_out(run, "sweep");

  const SweepReport rep = run.kind == GeometryKind::strip
                              ? sweep_k(run.experiment, run.strip, run.model)
                              : sweep_k(run.experiment, run.annulus, run.model);
  emit_report(rep.records, run.out_dir, run.svg);

  std::ofstream summary(fs::path(run.out_dir) / "sweep_summary.txt",
                        std::ios::binary);
  if (!summary) throw NumericalError("io", "cannot write sweep_summary.txt");
  summary << "records=" << rep.records.size() << "\n";
  summary << "max_ratio=" << detail::fmt_double(rep.max_ratio) << "\n";
  summary << "trend_slope=" << detail::fmt_double(rep.trend_slope) << "\n";
  say(args, "wrote stability.csv and sweep_summary.txt to " + run.out_dir);
  return 0;
}

int cmd_svd(const CommonArgs& args) {
  const RunConfig run = resolve(args);
  if (run.kind != GeometryKind::annulus)
    throw ConfigError("geometry.kind", "svd needs geometry.kind = annulus");
  prepare_out(run, "svd");

  std::vector<SingularSpectrum> spectra, usable;
  for (double k : run.k_values) {
    const int m_max = run.m_max > 0
                          ? run.m_max
                          : static_cast<int>(std::ceil(2.0 * k * run.annulus.R));
    spectra.push_back(operator_b_spectrum(k, run.model, run.annulus, m_max));
    bool any_clean = false;
    for (const ModeSigma& e : spectra.back().entries)
      if (!e.resonant) any_clean = true;
    if (any_clean) {
      usable.push_back(spectra.back());
    } else {
      std::cerr << "warning: all modes resonant at k=" << detail::fmt_double(k)
                << ", dropped from the conjecture fit\n";
    }
  }

  emit_report(spectra, run.out_dir, run.svg);
  if (usable.size() >= 3) {
    const ConjectureMetrics met = conjecture_metrics(usable, run.theta_plateau);
    write_conjecture_report((fs::path(run.out_dir) / "conjecture.txt").string(), met);
    say(args, "wrote spectrum.csv and conjecture.txt to " + run.out_dir);
  } else {
    say(args, "wrote spectrum.csv to " + run.out_dir +
                  " (conjecture fit needs at least 3 usable k values)");
  }
  return 0;
}

int cmd_demo_john(const CommonArgs& args) {
  const RunConfig run = resolve(args);
  prepare_out(run, "demo-john");

  const std::vector<JohnRow> rows = john_blowup_demo(run.k_values, run.mu_values,
                                                     run.strip);
  std::ofstream out(fs::path(run.out_dir) / "john.csv", std::ios::binary);
  if (!out) throw NumericalError("io", "cannot write john.csv");
  out << "k,mu,mode,omega2,amplification,regime\n";
  for (const JohnRow& r : rows)
    out << detail::fmt_double(r.k) << ',' << detail::fmt_double(r.mu) << ',' << r.mode
        << ',' << detail::fmt_double(r.omega2) << ','
        << detail::fmt_double(r.amplification) << ',' << r.regime << "\n";
  say(args, "wrote john.csv to " + run.out_dir);
  return 0;
}

int cmd_norms(const CommonArgs& args) {
  const RunConfig run = resolve(args);
  if (run.field_path.empty())
    throw ConfigError("norms.field_path", "norms needs norms.field_path");
  prepare_out(run, "norms");

  const Field field = read_field_csv(run.field_path);
  const double k = run.k_values.front();
  const SpectralCutoff cut = make_cutoff(k, run.model.E, run.eps, field.grid);
  const ModeSpectrum spec = forward_transform(field);

  std::cout << "l2=" << detail::fmt_double(sobolev_norm(field, 0)) << "\n";
  std::cout << "h1=" << detail::fmt_double(sobolev_norm(field, 1)) << "\n";
  std::cout << "h2=" << detail::fmt_double(sobolev_norm(field, 2)) << "\n";
  std::cout << "hf_seminorm_1k=" << detail::fmt_double(hf_seminorm(spec, 1, cut)) << "\n";
  std::cout << "hf_seminorm_2k=" << detail::fmt_double(hf_seminorm(spec, 2, cut)) << "\n";
  std::cout << "hf_h2=" << detail::fmt_double(hf_h2_norm(spec, cut)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mode-wise Cauchy continuation laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  int (*handler)(const CommonArgs&) = nullptr;

  auto* c_continue = app.add_subcommand("continue", "continue Cauchy data once");
  auto* c_sweep = app.add_subcommand("sweep", "stability ratio sweep over k");
  auto* c_svd = app.add_subcommand("svd", "singular spectrum of the Neumann operator");
  auto* c_demo = app.add_subcommand("demo-john", "high-mode blowup demo table");
  auto* c_norms = app.add_subcommand("norms", "norms of a field dump");
  for (auto* cmd : {c_continue, c_sweep, c_svd, c_demo, c_norms}) add_common(cmd, args);

  c_continue->callback([&] { handler = cmd_continue; });
  c_sweep->callback([&] { handler = cmd_sweep; });
  c_svd->callback([&] { handler = cmd_svd; });
  c_demo->callback([&] { handler = cmd_demo_john; });
  c_norms->callback([&] { handler = cmd_norms; });

  CLI11_PARSE(app, argc, argv);

  try {
    return handler(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.key() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical: " << e.kind() << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
}
