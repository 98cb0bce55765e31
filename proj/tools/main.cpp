#include <cstdio>
#include <fstream>

#include <CLI11.hpp>

#include "cli.hpp"

using namespace loopharm::cli;

int main(int argc, char** argv) {
  CLI::App app{"Harmonic maps into G(mu1, mu2) by the loop group method"};
  app.require_subcommand(1);

  std::string config_path, fixture;
  Overrides ov;
  int band = 0, grid = 0;
  unsigned threads = 0;
  double tol = 0;
  std::string lambdas, out_dir, name;

  auto common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--band", band, "Laurent band N")->check(CLI::Range(2, 1 << 16));
    sub->add_option("--grid", grid, "samples per axis")->check(CLI::Range(5, 1 << 14));
    sub->add_option("--lambdas", lambdas, "'re,im;re,im;...' or 'roots:N'");
    sub->add_option("--tol", tol, "residual tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--name", name, "artifact file prefix");
    sub->add_option("--threads", threads, "worker threads (0: all cores)");
  };
  CLI::App* synth = app.add_subcommand("synth", "potential -> harmonic map mesh, CSV and report");
  CLI::App* verify = app.add_subcommand("verify", "residual report for a sampled map (CSV)");
  CLI::App* split = app.add_subcommand("split", "Birkhoff and Iwasawa factors of a loop element");
  CLI::App* oracle = app.add_subcommand("oracle", "frames vs RK4 and closed form vs frames");
  CLI::App* gallery = app.add_subcommand("gallery", "closed-form example maps");
  for (CLI::App* sub : {synth, verify, split, oracle}) common(sub);
  gallery->add_option("fixture", fixture, "fixture name")->required();
  common(gallery);
  std::string known;
  for (const auto& n : gallery_names()) known += (known.empty() ? "" : ", ") + n;
  gallery->footer("Fixtures: " + known);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--band")) ov.band = band;
  if (sub->count("--grid")) ov.grid = grid;
  if (sub->count("--lambdas")) ov.lambdas = lambdas;
  if (sub->count("--tol")) ov.tol = tol;
  if (sub->count("--out")) ov.out_dir = out_dir;
  if (sub->count("--name")) ov.name = name;
  if (sub->count("--threads")) ov.threads = threads;

  try {
    Json doc = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      try {
        doc = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
    }
    if (sub == gallery) {
      doc["gallery"] = fixture;
      if (!ov.name) ov.name = fixture;
    }
    const RunConfig cfg = parse_config(doc, sub->get_name(), ov);
    return run(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }
}
