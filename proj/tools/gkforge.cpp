#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "gkforge/errors.hpp"
#include "gkforge/pipeline.hpp"

namespace {

namespace pl = gkforge::pipeline;

enum Exit : int { kPass = 0, kFail = 1, kError = 2 };

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> fd_order;
  std::optional<double> fd_step;
  bool allow_incomplete = false;
  int grid = 16;
  double pole_margin = 0.2;
  std::string example;
};

void add_common(CLI::App& cmd, Options& o, bool needs_config) {
  auto* cfg = cmd.add_option("--config", o.config_path, "construction config (JSON)")
                  ->check(CLI::ExistingFile);
  if (needs_config) cfg->required();
  cmd.add_option("--out", o.out_path, "write the report or lattice here instead of stdout");
  cmd.add_option("--samples", o.samples, "override the number of samples")->check(CLI::PositiveNumber);
  cmd.add_option("--seed", o.seed, "override the sampling seed");
  cmd.add_option("--fd-order", o.fd_order, "finite-difference order")->check(CLI::IsMember({2, 4}));
  cmd.add_option("--fd-step", o.fd_step, "finite-difference step")->check(CLI::PositiveNumber);
  cmd.add_flag("--allow-incomplete", o.allow_incomplete,
               "accept lambda = 0 with a_- != 0 (the metric is then incomplete)");
  cmd.add_option("--pole-margin", o.pole_margin, "h-distance of samples from every pole")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

pl::Config load(const Options& o) {
  pl::Config c = pl::Config::load(o.config_path);
  if (o.samples) c.samples = *o.samples;
  if (o.seed) c.seed = *o.seed;
  if (o.fd_order) c.fd.order = *o.fd_order;
  if (o.fd_step) c.fd.step = *o.fd_step;
  c.fd.validate();
  return c;
}

pl::RunOptions run_options(const Options& o) {
  pl::RunOptions r;
  r.allow_incomplete = o.allow_incomplete;
  r.pole_margin = o.pole_margin;
  return r;
}

template <class Writer>
void emit(const Options& o, Writer&& write) {
  if (o.out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(o.out_path);
  if (!out) throw gkforge::ConfigError("cannot open output file " + o.out_path);
  write(out);
}

int finish(const Options& o, const pl::Report& report) {
  emit(o, [&](std::ostream& out) { out << report.to_json().dump(2) << '\n'; });
  std::cerr << report.command << ": " << (report.pass() ? "PASS" : "FAIL");
  for (const auto& s : report.stages)
    if (!s.pass) std::cerr << ' ' << s.name;
  std::cerr << " (" << report.wall_time << " s)\n";
  return report.pass() ? kPass : kFail;
}

int export_command(const Options& o) {
  if (o.grid < 1) throw gkforge::ConfigError("--grid must be positive");
  const pl::Construction c = pl::construct(load(o), run_options(o));
  pl::ExportOptions ex;
  ex.nodes = o.grid;
  ex.format = o.format == "csv" ? pl::ExportFormat::Csv : pl::ExportFormat::Json;
  emit(o, [&](std::ostream& out) { pl::export_lattice(c, ex, out); });
  if (ex.format == pl::ExportFormat::Csv && !o.out_path.empty()) {
    std::ofstream meta(o.out_path + ".meta.json");
    meta << pl::export_metadata(c, ex).dump(2) << '\n';
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Kaehler solitons from a Gibbons-Hawking type ansatz", "gkforge"};
  app.set_version_flag("--version", std::string(pl::tool_version()));
  app.require_subcommand(1);
  Options o;

  auto* construct = app.add_subcommand("construct", "build the solution and print a summary");
  add_common(*construct, o, true);
  auto* verify = app.add_subcommand("verify", "run the full residual suite");
  add_common(*verify, o, true);
  auto* flux = app.add_subcommand("flux", "flux around each pole and the integrality verdict");
  add_common(*flux, o, true);
  auto* exporter = app.add_subcommand("export", "dump a lattice of fields");
  add_common(*exporter, o, true);
  exporter->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  exporter->add_option("--grid", o.grid, "nodes per axis")->capture_default_str();
  auto* example = app.add_subcommand("example", "verify a named oracle");
  add_common(*example, o, false);
  example->add_option("name", o.example, "hopf, diagonal-hopf, taub-nut, eguchi-hanson or lebrun")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (construct->parsed()) {
      const pl::Construction c = pl::construct(load(o), run_options(o));
      return finish(o, pl::construct_report(c, run_options(o)));
    }
    if (verify->parsed()) {
      const pl::Construction c = pl::construct(load(o), run_options(o));
      return finish(o, pl::verify(c, run_options(o)));
    }
    if (flux->parsed()) return finish(o, pl::flux_report(pl::construct(load(o), run_options(o))));
    if (exporter->parsed()) return export_command(o);
    if (example->parsed())
      return finish(o, pl::run_example(o.example, o.samples.value_or(24), o.seed.value_or(1)));
  } catch (const gkforge::CompletenessError& e) {
    std::cerr << "error: " << e.what() << " (pass --allow-incomplete to accept it)\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
