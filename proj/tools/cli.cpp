#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "loopharm/gallery.hpp"
#include "loopharm/loopfactor.hpp"
#include "loopharm/verify.hpp"

namespace loopharm::cli {

namespace {

using OJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config parsing

Complex parse_complex(const Json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(where + ": expected a number or [re, im]");
}

HoloPoly parse_poly(const Json& v, const std::string& where) {
  if (v.is_null()) return {};
  if (!v.is_array()) throw ConfigError(where + ": expected a list of [re, im] coefficients, lowest degree first");
  if (v.size() > HoloPoly::kMaxInputDegree + 1) throw ConfigError(where + ": polynomial degree too large");
  if (v.empty()) return {};
  HoloPoly::Coeffs c(static_cast<Eigen::Index>(v.size()));
  for (std::size_t m = 0; m < v.size(); ++m) c[m] = parse_complex(v[m], where + "[" + std::to_string(m) + "]");
  return HoloPoly(c);
}

SolvParams parse_mu(const Json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(where + ": expected [mu1, mu2]");
  return {v[0].get<double>(), v[1].get<double>()};
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

PotentialSpec parse_potential(const Json& v) {
  if (!v.is_object()) throw ConfigError("potential: expected an object");
  PotentialSpec p;
  p.xi1 = parse_poly(v.value("xi1", Json()), "potential.xi1");
  p.xi2 = parse_poly(v.value("xi2", Json()), "potential.xi2");
  p.xi3 = parse_poly(v.value("xi3", Json()), "potential.xi3");
  p.params = v.contains("mu") ? parse_mu(v["mu"], "potential.mu") : SolvParams{1, 1};
  if (v.contains("base_point")) p.base_point = parse_complex(v["base_point"], "potential.base_point");
  p.band = get_or<int>(v, "band", 12, "potential");
  return p;
}

GridSpec parse_grid(const Json& v) {
  if (!v.is_object()) throw ConfigError("grid: expected an object");
  GridSpec g;
  auto range = [&](const char* key, double& lo, double& hi) {
    if (!v.contains(key)) return;
    const Json& r = v[key];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
      throw ConfigError(std::string("grid.") + key + ": expected [min, max]");
    lo = r[0].get<double>();
    hi = r[1].get<double>();
  };
  range("x", g.x_min, g.x_max);
  range("y", g.y_min, g.y_max);
  const int n = get_or<int>(v, "n", 33, "grid");
  g.nx = get_or<int>(v, "nx", n, "grid");
  g.ny = get_or<int>(v, "ny", n, "grid");
  return g;
}

GroupDescriptor parse_group(const Json& v) {
  if (!v.is_object()) throw ConfigError("group: expected an object");
  const std::string kind = get_or<std::string>(v, "kind", "solv", "group");
  if (kind == "solv") return solv_group(v.contains("mu") ? parse_mu(v["mu"], "group.mu") : SolvParams{1, 1});
  if (kind == "nil") {
    const int n = get_or<int>(v, "n", 1, "group");
    if (n < 1) throw ConfigError("group.n must be at least 1");
    return nil_group(n);
  }
  if (kind == "se2") return se2_group();
  throw ConfigError("group.kind must be one of solv, nil, se2");
}

Loop parse_loop(const Json& v, int band, const std::string& where) {
  Loop f(band);
  if (v.is_null()) return f;
  if (!v.is_array()) throw ConfigError(where + ": expected a list of [power, re, im]");
  for (const Json& t : v) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number() || !t[2].is_number())
      throw ConfigError(where + ": entries are [power, re, im]");
    const int j = t[0].get<int>();
    if (std::abs(j) > band) throw ConfigError(where + ": power " + std::to_string(j) + " outside element band");
    f(j) = Complex(t[1].get<double>(), t[2].get<double>());
  }
  return f;
}

SolvLoopElement parse_element(const Json& v) {
  if (!v.is_object()) throw ConfigError("element: expected an object");
  const SolvParams p = v.contains("mu") ? parse_mu(v["mu"], "element.mu") : SolvParams{1, 1};
  int band = 0;
  for (const char* key : {"x1", "x2", "x3"})
    if (v.contains(key) && v[key].is_array())
      for (const Json& t : v[key])
        if (t.is_array() && !t.empty() && t[0].is_number_integer()) band = std::max(band, std::abs(t[0].get<int>()));
  band = std::max(band, 1);
  return {parse_loop(v.value("x1", Json()), band, "element.x1"), parse_loop(v.value("x2", Json()), band, "element.x2"),
          parse_loop(v.value("x3", Json()), band, "element.x3"), p};
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

std::string lambda_label(Complex l) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "lambda_%.6g_%.6g", l.real(), l.imag());
  return buf;
}

// ---------------------------------------------------------------------------
// Reports

struct Report {
  OJson doc;
  bool all_pass = true;

  void check(const std::string& name, double value, double tolerance) {
    const bool ok = std::isfinite(value) && value <= tolerance;
    doc["checks"].push_back({{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", ok}});
    all_pass = all_pass && ok;
  }
  void check_above(const std::string& name, double value, double floor) {
    const bool ok = std::isfinite(value) && value > floor;
    doc["checks"].push_back({{"name", name}, {"value", value}, {"minimum", floor}, {"pass", ok}});
    all_pass = all_pass && ok;
  }
  void residual(const ResidualReport& r) {
    OJson e{{"name", r.name}, {"max_norm", r.max_norm}, {"l2_norm", r.l2_norm}, {"grid_h", r.grid_h},
            {"points", r.points}};
    if (!r.per_lambda.empty()) {
      e["per_lambda"] = OJson::array();
      for (const auto& [l, v] : r.per_lambda) e["per_lambda"].push_back({{"lambda", {l.real(), l.imag()}}, {"max_norm", v}});
    }
    doc["residuals"].push_back(e);
  }
};

Report new_report(const RunConfig& cfg) {
  Report r;
  r.doc["command"] = cfg.command;
  r.doc["config_hash"] = config_hash(cfg);
  r.doc["config"] = cfg.canonical;
  r.doc["band"] = nullptr;
  r.doc["grid_h"] = cfg.grid.hx();
  r.doc["discarded_mass"] = 0.0;
  r.doc["checks"] = OJson::array();
  r.doc["residuals"] = OJson::array();
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

std::string artifact(const RunConfig& cfg, const std::string& suffix) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / (cfg.name + suffix)).string();
}

int finish(const RunConfig& cfg, Report& r) {
  r.doc["status"] = r.all_pass ? "pass" : "fail";
  write_text(artifact(cfg, ".report.json"), r.doc.dump(2) + "\n");
  std::printf("%s: %s (%s)\n", cfg.command.c_str(), r.all_pass ? "all checks passed" : "checks failed",
              artifact(cfg, ".report.json").c_str());
  return r.all_pass ? kOk : kNumericalFailure;
}

double form_scale(const FormGrid& f) {
  double s = 0;
  for (Eigen::Index c = 0; c < f.A.cols(); ++c)
    if (f.valid[c]) s = std::max(s, f.A.col(c).norm());
  return std::max(1.0, s * s);
}

double residual_tol(const RunConfig& cfg, double h, double scale) {
  return cfg.tol.residual ? *cfg.tol.residual : 10 * h * h * scale;
}

// ---------------------------------------------------------------------------
// Commands

int run_synth(const RunConfig& cfg) {
  if (!cfg.potential) throw ConfigError("synth needs a potential");
  const PotentialSpec& pot = *cfg.potential;
  SynthOptions opt;
  opt.lambdas = cfg.lambdas ? *cfg.lambdas : default_lambdas();
  opt.threads = cfg.threads;
  opt.split.band = pot.band;
  Report rep = new_report(cfg);
  const SynthResult res = synthesize(pot, cfg.grid, opt);
  const int cells = cfg.grid.nx * cfg.grid.ny, masked = res.grid.masked_count();
  rep.doc["band"] = pot.band;
  rep.doc["max_working_band"] = res.max_band;
  rep.doc["grid_h"] = cfg.grid.hx();
  rep.doc["discarded_mass"] = res.discarded_mass;
  rep.doc["masked_points"] = masked;
  rep.doc["failures"] = res.failures;
  if (masked * 100 >= cells) {
    rep.doc["status"] = "error";
    rep.doc["error"] = "more than 1% of the grid is masked; first diagnostic: " +
                       (res.failures.empty() ? std::string("none") : res.failures.front());
    write_text(artifact(cfg, ".report.json"), rep.doc.dump(2) + "\n");
    std::fprintf(stderr, "synth: %d of %d points masked\n", masked, cells);
    return kNumericalFailure;
  }

  std::vector<std::string> names{"phi"};
  MapGrid out = res.grid;
  out.slices().clear();
  for (const auto& s : res.grid.slices())
    if (s.lambda != Complex(1)) {
      out.slices().push_back(s);
      names.push_back(lambda_label(s.lambda));
    }
  write_obj(artifact(cfg, ".obj"), out, names);
  write_csv(artifact(cfg, ".csv"), out);

  const GroupDescriptor g = solv_group(pot.params);
  const FormGrid form = numeric_mc_form(res.grid, g);
  const double h = cfg.grid.hx(), tol = residual_tol(cfg, h, form_scale(form));
  const ResidualReport neutral = neutral_harmonicity_residual(res.grid, g);
  const ResidualReport flat = flatness_residual(form, opt.lambdas, FlatFamily::Neutral);
  rep.residual(neutral);
  rep.residual(flat);
  rep.check("neutral_harmonicity", neutral.max_norm, tol);
  rep.check("flatness_neutral", flat.max_norm, tol);
  rep.check("normalization", res.max_normalization_error, 1e-10);
  for (std::size_t s = 0; s < res.grid.slices().size(); ++s) {
    ResidualReport sr = neutral_harmonicity_residual(res.grid.slice_grid(s), g);
    sr.name = "neutral_harmonicity_" + lambda_label(res.grid.slices()[s].lambda);
    rep.residual(sr);
    rep.check(sr.name, sr.max_norm, tol);
  }
  return finish(cfg, rep);
}

void add_group_residuals(const RunConfig& cfg, Report& rep, const MapGrid& grid, const GroupDescriptor& g) {
  const FormGrid form = numeric_mc_form(grid, g);
  const double tol = residual_tol(cfg, grid.h(), form_scale(form));
  const ResidualReport neutral = neutral_harmonicity_residual(grid, g);
  rep.residual(neutral);
  rep.check("neutral_harmonicity", neutral.max_norm, tol);
  const ResidualReport mc = summarize("maurer_cartan", mc_field(form));
  rep.residual(mc);
  rep.check("maurer_cartan", mc.max_norm, tol);
  std::vector<Complex> lambdas = cfg.lambdas ? *cfg.lambdas : default_lambdas();
  const ResidualReport flat = flatness_residual(form, lambdas, FlatFamily::Neutral);
  rep.residual(flat);
  rep.check("flatness_neutral", flat.max_norm, tol);
  rep.residual(torsion_free_residual(form));
  rep.residual(general_harmonicity_residual(form, family_mu(form.algebra, 0)));
  if (g.kind == GroupKind::Solv) {
    rep.residual(metric_harmonicity_residual(grid, g.params));
    rep.residual(admissibility_residual(form, levi_civita(form.algebra, MetricTensor::identity(3))));
  }
  rep.doc["form_reality_defect"] = form_reality_defect(form);
}

int run_verify(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("verify needs an input CSV");
  const GroupDescriptor g = cfg.group ? *cfg.group : solv_group({1, 1});
  const MapGrid grid = read_csv(cfg.input);
  if (grid.dim() != g.dim())
    throw ConfigError("input has " + std::to_string(grid.dim()) + " coordinates but " + g.name() + " needs " +
                      std::to_string(g.dim()));
  Report rep = new_report(cfg);
  rep.doc["group"] = g.name();
  rep.doc["grid_h"] = grid.h();
  add_group_residuals(cfg, rep, grid, g);
  for (std::size_t s = 0; s < grid.slices().size(); ++s) {
    ResidualReport sr = neutral_harmonicity_residual(grid.slice_grid(s), g);
    sr.name = "neutral_harmonicity_" + lambda_label(grid.slices()[s].lambda);
    rep.residual(sr);
  }
  return finish(cfg, rep);
}

OJson loop_json(const Loop& f) {
  OJson out = OJson::array();
  for (int j = -f.band(); j <= f.band(); ++j)
    if (f[j] != Complex(0)) out.push_back({j, f[j].real(), f[j].imag()});
  return out;
}

OJson element_json(const SolvLoopElement& e) {
  return {{"band", e.band()}, {"x1", loop_json(e.x1)}, {"x2", loop_json(e.x2)}, {"x3", loop_json(e.x3)}};
}

OJson split_report_json(const SplitReport& r) {
  return {{"band", r.band},
          {"discarded_mass", r.discarded_mass},
          {"edge_mass", r.edge_mass},
          {"reconstruction_error", r.reconstruction_error}};
}

int run_split(const RunConfig& cfg) {
  if (!cfg.element) throw ConfigError("split needs an element");
  SplitOptions opt;
  if (cfg.potential) opt.band = cfg.potential->band;
  if (cfg.canonical.contains("band")) opt.band = cfg.canonical["band"].get<int>();
  Report rep = new_report(cfg);
  const BirkhoffFactors b = birkhoff_split(*cfg.element, opt);
  const IwasawaFactors w = iwasawa_split(*cfg.element, opt);
  rep.doc["birkhoff"] = {{"minus", element_json(b.minus)}, {"plus", element_json(b.plus)},
                         {"report", split_report_json(b.report)}};
  const RealityCheck rc = check_reality(w.real);
  rep.doc["iwasawa"] = {{"real", element_json(w.real)},
                        {"plus", element_json(w.plus)},
                        {"report", split_report_json(w.report)},
                        {"reality_residual", rc.residual}};
  rep.check("birkhoff_reconstruction", b.report.reconstruction_error, cfg.tol.split);
  rep.check("iwasawa_reconstruction", w.report.reconstruction_error, cfg.tol.split);
  rep.check("iwasawa_reality", rc.residual, 1e-10);
  return finish(cfg, rep);
}

int run_oracle(const RunConfig& cfg) {
  if (!cfg.potential) throw ConfigError("oracle needs a potential");
  const PotentialSpec& pot = *cfg.potential;
  const std::vector<Complex> lambdas =
      cfg.lambdas ? *cfg.lambdas : std::vector<Complex>{Complex(1), Complex(-1), Complex(0, 1), Complex(0, -1)};
  Report rep = new_report(cfg);
  rep.doc["band"] = pot.band;
  rep.doc["grid_h"] = cfg.grid.hx();
  const Step1Table table(pot);
  OJson per = OJson::array();
  double worst = 0;
  for (const Complex& lam : lambdas) {
    double dev = 0;
    for (int j = 0; j < cfg.grid.ny; ++j)
      for (int i = 0; i < cfg.grid.nx; ++i) {
        const Complex z(cfg.grid.x_min + i * cfg.grid.hx(), cfg.grid.y_min + j * cfg.grid.hy());
        const Eigen::Matrix3cd a = solv_matrix(table.frame(z).eval(lam), pot.params);
        const Eigen::Matrix3cd b = ode_oracle(pot, z, lam, 512);
        dev = std::max(dev, (a - b).norm() / b.norm());
      }
    per.push_back({{"lambda", {lam.real(), lam.imag()}}, {"max_relative_deviation", dev}});
    worst = std::max(worst, dev);
  }
  rep.doc["step1_vs_rk4"] = per;
  rep.check("step1_vs_rk4", worst, cfg.tol.oracle);

  SynthOptions opt;
  opt.lambdas = {};
  opt.threads = cfg.threads;
  const SynthResult res = synthesize(pot, cfg.grid, opt);
  double route = 0;
  for (int j = 0; j < cfg.grid.ny; ++j)
    for (int i = 0; i < cfg.grid.nx; ++i) {
      if (!res.grid.valid(i, j)) continue;
      const SolvPoint c = closed_form_map(pot, res.grid.z(i, j));
      route = std::max(route, (res.grid.point(i, j) - Eigen::Vector3d(c.x1, c.x2, c.x3)).cwiseAbs().maxCoeff());
    }
  rep.doc["masked_points"] = res.grid.masked_count();
  rep.check("closed_form_vs_frames", route, cfg.tol.oracle);
  return finish(cfg, rep);
}

int run_gallery(const RunConfig& cfg) {
  const std::string& name = cfg.gallery;
  const GridSpec& spec = cfg.grid;
  Report rep = new_report(cfg);
  rep.doc["fixture"] = name;
  rep.doc["grid_h"] = spec.hx();
  MapGrid grid;
  GroupDescriptor g = solv_group({1, 1});
  if (name == "horosphere" || name == "horosphere-reparam") {
    grid = horosphere(spec, name == "horosphere-reparam");
    const ResidualReport m = metric_harmonicity_residual(grid, {1, 1});
    rep.residual(m);
    rep.check_above("metric_harmonicity_nonzero", m.max_norm, 0.1);
  } else if (name == "hyperbolic-paraboloid") {
    grid = hyperbolic_paraboloid(spec);
    g = nil_group(1);
  } else if (name == "vertical-plane") {
    g = nil_group(1);
    const std::vector<HoloPoly> phi{HoloPoly{Complex(0.5)}, HoloPoly{}, HoloPoly{Complex(0, -0.5)}};
    grid = MapGrid(spec, 3);
    for (int j = 0; j < spec.ny; ++j)
      for (int i = 0; i < spec.nx; ++i)
        grid.point(i, j) = g.coords_from_matrix(torsion_free_map(phi, nil_algebra(1), Complex(0), grid.z(i, j), Complex(1)));
    const ResidualReport t = torsion_free_residual(numeric_mc_form(grid, g));
    rep.check("torsion_free", t.max_norm, 1e-10);
  } else if (name == "sol3-primitive") {
    g = solv_group({1, -1});
    grid = sol3_primitive(HoloPoly{Complex(0), Complex(1), Complex(0.25, 0.1)}, 0.2, spec);
    const FormGrid f = numeric_mc_form(grid, g);
    const double tol = residual_tol(cfg, spec.hx(), form_scale(f));
    const ResidualReport a = admissibility_residual(f, sol3_levi_civita());
    const ResidualReport m = metric_harmonicity_residual(grid, {1, -1});
    rep.check("admissibility", a.max_norm, tol);
    rep.check("metric_harmonicity", m.max_norm, tol);
  } else if (name == "vacuum") {
    g = solv_group({1, -1});
    grid = vacuum_map(Eigen::Vector3d(0.3, -0.5, 0.8), Eigen::Vector3d(1, 0.2, -0.4), g, spec);
  } else if (name == "se2-vacuum") {
    g = se2_group();
    grid = vacuum_map(Eigen::Vector3d(0.4, 0.1, 0.7), Eigen::Vector3d(-0.2, 0.5, 0.3), g, spec);
    const SE2CheckReport pair = se2_check_pair(grid);
    rep.residual(pair.direct);
    rep.residual(pair.transformed);
    rep.check("se2_formulation_discrepancy", pair.discrepancy, 1e-12);
  } else {
    std::string known;
    for (const auto& n : gallery_names()) known += " " + n;
    throw ConfigError("unknown gallery fixture '" + name + "'; known:" + known);
  }
  rep.doc["group"] = g.name();
  add_group_residuals(cfg, rep, grid, g);
  write_obj(artifact(cfg, ".obj"), grid, {name});
  write_csv(artifact(cfg, ".csv"), grid);
  return finish(cfg, rep);
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"horosphere",     "horosphere-reparam", "hyperbolic-paraboloid",
                                              "vertical-plane", "sol3-primitive",     "vacuum",
                                              "se2-vacuum"};
  return names;
}

std::vector<Complex> parse_lambda_list(const std::string& text) {
  std::vector<Complex> out;
  if (text.rfind("roots:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(text.substr(6));
    } catch (const std::exception&) {
      throw ConfigError("--lambdas roots:N needs an integer N");
    }
    if (n < 1) throw ConfigError("--lambdas roots:N needs N >= 1");
    for (int s = 0; s < n; ++s) out.push_back(std::polar(1.0, 2 * M_PI * s / n));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    double re = 0, im = 0;
    char comma = 0;
    std::stringstream is(item);
    if (!(is >> re >> comma >> im) || comma != ',') throw ConfigError("--lambdas entries are re,im separated by ';'");
    out.emplace_back(re, im);
  }
  if (out.empty()) throw ConfigError("--lambdas is empty");
  return out;
}

RunConfig parse_config(const Json& doc_in, const std::string& command, const Overrides& ov) {
  static const std::set<std::string> commands{"synth", "verify", "split", "gallery", "oracle"};
  if (!commands.count(command)) throw ConfigError("unknown command '" + command + "'");
  if (!doc_in.is_object() && !doc_in.is_null()) throw ConfigError("config must be a JSON object");
  Json doc = doc_in.is_null() ? Json::object() : doc_in;
  if (doc.contains("command") && doc["command"] != command)
    throw ConfigError("config is for '" + doc["command"].get<std::string>() + "', not '" + command + "'");

  // apply overrides to the document so the hash covers them
  if (ov.band) {
    if (doc.contains("potential")) doc["potential"]["band"] = *ov.band;
    doc["band"] = *ov.band;
  }
  if (ov.grid) {
    doc["grid"]["nx"] = *ov.grid;
    doc["grid"]["ny"] = *ov.grid;
  }
  if (ov.lambdas) {
    doc["lambdas"] = Json::array();
    for (const Complex& l : parse_lambda_list(*ov.lambdas)) doc["lambdas"].push_back(complex_json(l));
  }
  if (ov.tol) doc["tolerances"]["residual"] = *ov.tol;
  if (ov.out_dir) doc["output"]["dir"] = *ov.out_dir;
  if (ov.name) doc["output"]["name"] = *ov.name;
  if (ov.threads) doc["threads"] = *ov.threads;
  doc["command"] = command;

  RunConfig cfg;
  cfg.command = command;
  try {
    if (doc.contains("potential")) {
      cfg.potential = parse_potential(doc["potential"]);
      cfg.potential->validate();
    }
    if (doc.contains("grid")) cfg.grid = parse_grid(doc["grid"]);
    cfg.grid.validate();
    if (doc.contains("lambdas")) {
      if (!doc["lambdas"].is_array()) throw ConfigError("lambdas: expected a list of [re, im]");
      std::vector<Complex> ls;
      for (const Json& l : doc["lambdas"]) ls.push_back(parse_complex(l, "lambdas"));
      for (const Complex& l : ls)
        if (std::abs(std::abs(l) - 1.0) > 1e-12) throw ConfigError("lambdas must lie on the unit circle");
      cfg.lambdas = ls;
    }
    if (doc.contains("output")) {
      cfg.out_dir = get_or<std::string>(doc["output"], "dir", cfg.out_dir, "output");
      cfg.name = get_or<std::string>(doc["output"], "name", cfg.name, "output");
    }
    cfg.input = get_or<std::string>(doc, "input", "", "config");
    if (doc.contains("group")) cfg.group = parse_group(doc["group"]);
    cfg.gallery = get_or<std::string>(doc, "gallery", "", "config");
    if (doc.contains("element")) cfg.element = parse_element(doc["element"]);
    if (doc.contains("band") && (!doc["band"].is_number_integer() || doc["band"].get<int>() < 2))
      throw ConfigError("band must be an integer >= 2");
    if (doc.contains("tolerances")) {
      const Json& t = doc["tolerances"];
      if (t.contains("residual")) cfg.tol.residual = get_or<double>(t, "residual", 0, "tolerances");
      cfg.tol.oracle = get_or<double>(t, "oracle", cfg.tol.oracle, "tolerances");
      cfg.tol.split = get_or<double>(t, "split", cfg.tol.split, "tolerances");
    }
    cfg.threads = get_or<unsigned>(doc, "threads", 0, "config");
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (command == "gallery" && cfg.gallery.empty()) throw ConfigError("gallery needs a fixture name");
  if (command == "synth" && !cfg.potential) throw ConfigError("synth needs a potential");
  if (command == "oracle" && !cfg.potential) throw ConfigError("oracle needs a potential");
  if (command == "split" && !cfg.element) throw ConfigError("split needs an element");
  if (command == "verify" && cfg.input.empty()) throw ConfigError("verify needs an input CSV");
  cfg.canonical = doc;
  return cfg;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(cfg.canonical.dump())));
  return buf;
}

void write_obj(const std::string& path, const MapGrid& grid, const std::vector<std::string>& object_names) {
  std::ostringstream out;
  out << "# loopharm surface, " << grid.nx() << " x " << grid.ny() << " samples\n";
  std::vector<const Eigen::MatrixXd*> surfaces{&grid.points()};
  for (const auto& s : grid.slices()) surfaces.push_back(&s.points);
  char buf[128];
  long base = 1;
  for (std::size_t s = 0; s < surfaces.size(); ++s) {
    out << "o " << (s < object_names.size() ? object_names[s] : "surface_" + std::to_string(s)) << "\n";
    const Eigen::MatrixXd& p = *surfaces[s];
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      const double v0 = p(0, c), v1 = p.rows() > 1 ? p(1, c) : 0, v2 = p.rows() > 2 ? p(p.rows() - 1, c) : 0;
      std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v0, v1, v2);
      out << buf;
    }
    for (int j = 0; j + 1 < grid.ny(); ++j)
      for (int i = 0; i + 1 < grid.nx(); ++i) {
        if (!grid.valid(i, j) || !grid.valid(i + 1, j) || !grid.valid(i + 1, j + 1) || !grid.valid(i, j + 1)) continue;
        out << "f " << base + grid.index(i, j) << " " << base + grid.index(i + 1, j) << " "
            << base + grid.index(i + 1, j + 1) << " " << base + grid.index(i, j + 1) << "\n";
      }
    base += p.cols();
  }
  write_text(path, out.str());
}

void write_csv(const std::string& path, const MapGrid& grid) {
  std::ostringstream out;
  out << "x,y,lambda_re,lambda_im";
  for (int k = 0; k < grid.dim(); ++k) out << ",phi" << k + 1;
  out << "\n";
  char buf[128];
  auto block = [&](Complex lam, const Eigen::MatrixXd& p) {
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        if (!grid.valid(i, j)) continue;
        const Complex z = grid.z(i, j);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", z.real(), z.imag(), lam.real(), lam.imag());
        out << buf;
        for (int k = 0; k < grid.dim(); ++k) {
          std::snprintf(buf, sizeof buf, ",%.17g", p(k, grid.index(i, j)));
          out << buf;
        }
        out << "\n";
      }
  };
  block(Complex(1), grid.points());
  for (const auto& s : grid.slices()) block(s.lambda, s.points);
  write_text(path, out.str());
}

MapGrid read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
  int cols = 1;
  for (char c : line) cols += c == ',';
  const int dim = cols - 4;
  if (dim < 1 || line.rfind("x,y,lambda_re,lambda_im", 0) != 0)
    throw ConfigError(path + ": expected header x,y,lambda_re,lambda_im,phi1,...");
  std::map<std::pair<double, double>, std::vector<std::vector<double>>> rows;  // by lambda
  std::vector<std::pair<double, double>> order;
  std::set<double> xs, ys;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number");
      }
    }
    if (static_cast<int>(v.size()) != cols) throw ConfigError(path + ":" + std::to_string(lineno) + ": wrong column count");
    const std::pair<double, double> key{v[2], v[3]};
    if (!rows.count(key)) order.push_back(key);
    rows[key].push_back(v);
    xs.insert(v[0]);
    ys.insert(v[1]);
  }
  if (rows.empty()) throw ConfigError(path + ": no samples");
  GridSpec spec{*xs.begin(), *xs.rbegin(), *ys.begin(), *ys.rbegin(), static_cast<int>(xs.size()),
                static_cast<int>(ys.size())};
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  auto fill = [&](const std::vector<std::vector<double>>& rs, Eigen::MatrixXd& pts, std::vector<std::uint8_t>& mask) {
    std::fill(mask.begin(), mask.end(), std::uint8_t{0});
    for (const auto& r : rs) {
      const int i = static_cast<int>(std::lround((r[0] - spec.x_min) / spec.hx()));
      const int j = static_cast<int>(std::lround((r[1] - spec.y_min) / spec.hy()));
      if (std::abs(spec.x_min + i * spec.hx() - r[0]) > 1e-9 * spec.hx() ||
          std::abs(spec.y_min + j * spec.hy() - r[1]) > 1e-9 * spec.hy())
        throw ConfigError(path + ": samples are not on a uniform grid");
      const int c = j * spec.nx + i;
      for (int k = 0; k < dim; ++k) pts(k, c) = r[4 + k];
      mask[c] = 1;
    }
  };
  std::pair<double, double> main = order.front();
  if (rows.count({1.0, 0.0})) main = {1.0, 0.0};
  MapGrid grid(spec, dim);
  fill(rows[main], grid.points(), grid.mask());
  for (const auto& key : order) {
    if (key == main) continue;
    MapGrid::Slice s{Complex(key.first, key.second), Eigen::MatrixXd::Zero(dim, spec.nx * spec.ny)};
    std::vector<std::uint8_t> m(grid.mask().size());
    fill(rows[key], s.points, m);
    grid.slices().push_back(std::move(s));
  }
  return grid;
}

int run(const RunConfig& cfg) {
  try {
    if (cfg.command == "synth") return run_synth(cfg);
    if (cfg.command == "verify") return run_verify(cfg);
    if (cfg.command == "split") return run_split(cfg);
    if (cfg.command == "oracle") return run_oracle(cfg);
    if (cfg.command == "gallery") return run_gallery(cfg);
    throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    const bool numerical = e.is_numerical() || e.kind() == ErrorKind::NonCommuting;
    OJson doc{{"command", cfg.command}, {"config_hash", config_hash(cfg)}, {"config", cfg.canonical},
              {"status", "error"},     {"error_kind", to_string(e.kind())}, {"error", e.what()}};
    try {
      write_text(artifact(cfg, ".report.json"), doc.dump(2) + "\n");
    } catch (const std::exception&) {
    }
    std::fprintf(stderr, "%s: %s\n", numerical ? "numerical failure" : "invalid input", e.what());
    return numerical ? kNumericalFailure : kConfigError;
  }
}

}  // namespace loopharm::cli
