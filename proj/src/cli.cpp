#include "gbclab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gbclab/error.hpp"
#include "gbclab/sampling.hpp"

namespace gbclab {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::CheckIdentity: return "check-identity";
    case Mode::Mass: return "mass";
    case Mode::Balance: return "balance";
    case Mode::Horizon: return "horizon";
    case Mode::Penrose: return "penrose";
    case Mode::Egb: return "egb";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::CheckIdentity, Mode::Mass, Mode::Balance, Mode::Horizon, Mode::Penrose, Mode::Egb})
    if (to_string(m) == s) return m;
  throw ConfigError("mode", "unknown mode '" + s + "'");
}

namespace {

// ---- config access --------------------------------------------------------

const Json* find(const Json& doc, const std::string& dotted) {
  const Json* cur = &doc;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    const std::size_t dot = dotted.find('.', pos);
    const std::string key = dotted.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (!cur->is_object()) return nullptr;
    const auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return cur;
}

double get_number(const Json& doc, const std::string& path, double fallback) {
  const Json* v = find(doc, path);
  if (!v) return fallback;
  if (!v->is_number()) throw ConfigError(path, "expected a number");
  const double d = v->get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
  return d;
}

int get_int(const Json& doc, const std::string& path, int fallback) {
  const Json* v = find(doc, path);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError(path, "expected an integer");
  return v->get<int>();
}

bool get_bool(const Json& doc, const std::string& path, bool fallback) {
  const Json* v = find(doc, path);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(path, "expected true or false");
  return v->get<bool>();
}

std::optional<std::string> get_string(const Json& doc, const std::string& path) {
  const Json* v = find(doc, path);
  if (!v) return std::nullopt;
  if (!v->is_string()) throw ConfigError(path, "expected a string");
  return v->get<std::string>();
}

std::vector<double> get_numbers(const Json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

MassKind parse_mass(const std::string& s) {
  if (s == "ADM_raw") return MassKind::AdmRaw;
  if (s == "P1" || s == "ADM") return MassKind::P1;
  if (s == "P2" || s == "GBC") return MassKind::P2;
  if (s == "EGB") return MassKind::Egb;
  throw ConfigError("mass", "expected one of ADM_raw, P1, P2, EGB");
}

IdentityKind parse_identity(const std::string& s) {
  if (s == "P1") return IdentityKind::P1;
  if (s == "P2") return IdentityKind::P2;
  if (s == "EGB") return IdentityKind::Egb;
  throw ConfigError("identity", "expected one of P1, P2, EGB");
}

void require_map(const RunConfig& c, const Json& doc) {
  if (!find(doc, "map")) throw ConfigError("map.source", "a map is required for mode " + to_string(c.mode));
  if (!c.map) throw ConfigError("map.source", "a map is required for mode " + to_string(c.mode));
}

void validate_radii(const std::vector<double>& r, std::size_t minimum) {
  if (r.size() < minimum)
    throw ConfigError("schedule.radii", "at least " + std::to_string(minimum) + " radii are required");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0)) throw ConfigError("schedule.radii", "radii must be positive");
    if (i > 0 && !(r[i] > r[i - 1])) throw ConfigError("schedule.radii", "radii must increase");
  }
}

}  // namespace

RunConfig parse_config(const Json& doc, const Overrides& ov) {
  if (!doc.is_object()) throw ConfigError("(root)", "configuration must be a JSON object");
  RunConfig c;

  std::optional<std::string> mode = ov.mode ? ov.mode : get_string(doc, "mode");
  if (!mode) throw ConfigError("mode", "missing run mode");
  c.mode = parse_mode(*mode);

  if (const Json* m = find(doc, "map")) {
    if (!m->is_object()) throw ConfigError("map", "expected an object with n, m and source");
    MapConfig mc;
    const auto src = get_string(doc, "map.source");
    if (!src) throw ConfigError("map.source", "missing map expression text");
    mc.source = *src;
    if (!find(doc, "map.n")) throw ConfigError("map.n", "missing domain dimension");
    mc.n = get_int(doc, "map.n", 0);
    mc.m = get_int(doc, "map.m", 1);
    if (mc.n < 2 || mc.n > kMaxDim) throw ConfigError("map.n", "domain dimension must lie in [2, 10]");
    if (mc.m < 1 || mc.m > kMaxDim) throw ConfigError("map.m", "codomain dimension must lie in [1, 10]");
    try {
      (void)parse_map(mc.source, mc.n, mc.m);
    } catch (const Error& e) {
      throw ConfigError("map.source", e.what());
    }
    c.map = mc;
  }

  if (find(doc, "alpha")) c.alpha = get_number(doc, "alpha", 0.0);
  if (ov.alpha) c.alpha = ov.alpha;
  if (auto s = get_string(doc, "mass")) c.mass = parse_mass(*s);
  if (auto s = get_string(doc, "identity")) c.identity = parse_identity(*s);
  c.include_normal_terms = get_bool(doc, "include_normal_terms", true);

  c.level = get_int(doc, "quadrature.level", c.level);
  if (ov.level) c.level = *ov.level;
  if (c.level < 1 || c.level > 40) throw ConfigError("quadrature.level", "level must lie in [1, 40]");

  if (const Json* r = find(doc, "schedule.radii")) c.radii = get_numbers(*r, "schedule.radii");
  if (const Json* s = find(doc, "steps")) {
    if (s->is_array()) {
      c.steps = get_numbers(*s, "steps");
      for (double h : c.steps)
        if (!(h > 0.0)) throw ConfigError("steps", "steps must be positive");
    } else {
      c.relative_step = get_number(doc, "steps.relative", c.relative_step);
      if (!(c.relative_step > 0.0)) throw ConfigError("steps.relative", "must be positive");
    }
  }
  c.point_count = get_int(doc, "points.count", c.point_count);
  c.r_inner = get_number(doc, "points.r_inner", c.r_inner);
  c.r_outer = get_number(doc, "points.r_outer", c.r_outer);
  if (const Json* l = find(doc, "points.list")) {
    if (!l->is_array()) throw ConfigError("points.list", "expected an array of points");
    for (const auto& p : *l) c.points.push_back(get_numbers(p, "points.list"));
  }
  c.r0 = get_number(doc, "bulk.r0", c.r0);
  c.radial_points = get_int(doc, "bulk.radial_points", c.radial_points);
  c.core_radius = get_number(doc, "bulk.core_radius", c.core_radius);
  if (c.radial_points < 1) throw ConfigError("bulk.radial_points", "must be positive");
  if (!(c.core_radius > 0.0)) throw ConfigError("bulk.core_radius", "must be positive");

  if (const Json* h = find(doc, "hypersurface")) {
    if (!h->is_object()) throw ConfigError("hypersurface", "expected an object");
    c.hypersurface_n = get_int(doc, "hypersurface.n", c.map ? c.map->n : 0);
    if (c.hypersurface_n < 2 || c.hypersurface_n > kMaxDim)
      throw ConfigError("hypersurface.n", "dimension must lie in [2, 10]");
    if (auto rho = get_string(doc, "hypersurface.rho")) c.components.push_back({*rho, {}});
    if (const Json* comps = find(doc, "hypersurface.components")) {
      if (!comps->is_array()) throw ConfigError("hypersurface.components", "expected an array");
      for (const auto& e : *comps) {
        ComponentConfig cc;
        if (e.is_string()) {
          cc.rho = e.get<std::string>();
        } else if (e.is_object() && e.contains("rho") && e["rho"].is_string()) {
          cc.rho = e["rho"].get<std::string>();
          if (e.contains("center")) cc.center = get_numbers(e["center"], "hypersurface.components.center");
        } else {
          throw ConfigError("hypersurface.components", "each component needs a rho expression");
        }
        c.components.push_back(cc);
      }
    }
    if (c.components.empty()) throw ConfigError("hypersurface.rho", "missing radial function");
    for (const auto& cc : c.components) {
      try {
        (void)parse_hypersurface(cc.rho, c.hypersurface_n);
      } catch (const Error& e) {
        throw ConfigError("hypersurface.rho", e.what());
      }
    }
    if (auto s = get_string(doc, "boundary.s")) c.boundary_s = *s;
  }

  if (auto dir = get_string(doc, "output.dir")) c.out_dir = *dir;
  if (ov.out) c.out_dir = *ov.out;
  c.write_json = get_bool(doc, "output.json", c.write_json);
  c.write_csv = get_bool(doc, "output.csv", c.write_csv);
  c.write_dat = get_bool(doc, "output.dat", c.write_dat);
  if (const Json* s = find(doc, "seed")) {
    if (!s->is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
    c.seed = s->get<std::uint64_t>();
  }
  if (ov.seed) c.seed = *ov.seed;
  c.quiet = ov.quiet || get_bool(doc, "quiet", false);

  // Mode-specific requirements.
  switch (c.mode) {
    case Mode::CheckIdentity:
      require_map(c, doc);
      if (c.identity == IdentityKind::Egb && !c.alpha) throw ConfigError("alpha", "EGB identity needs alpha");
      if (c.points.empty()) {
        if (c.point_count < 0) throw ConfigError("points.count", "must be non-negative");
        if (!(c.r_inner >= 0.0) || !(c.r_outer > c.r_inner))
          throw ConfigError("points.r_outer", "annulus needs 0 <= r_inner < r_outer");
      }
      for (const auto& p : c.points)
        if (static_cast<int>(p.size()) != c.map->n) throw ConfigError("points.list", "point dimension differs from map.n");
      break;
    case Mode::Mass:
      require_map(c, doc);
      validate_radii(c.radii, 3);
      if (c.mass == MassKind::Egb && !c.alpha) throw ConfigError("alpha", "EGB mass needs alpha");
      break;
    case Mode::Balance:
      require_map(c, doc);
      validate_radii(c.radii, 3);
      if (c.mass == MassKind::AdmRaw) throw ConfigError("mass", "ADM_raw has no bulk formula");
      if (c.mass == MassKind::Egb && !c.alpha) throw ConfigError("alpha", "EGB mass needs alpha");
      if (c.components.size() > 1) throw ConfigError("hypersurface.components", "balance supports one boundary component");
      if (!c.components.empty() && c.hypersurface_n != c.map->n)
        throw ConfigError("hypersurface.n", "boundary dimension differs from map.n");
      break;
    case Mode::Horizon:
      if (c.components.empty()) throw ConfigError("hypersurface.rho", "mode horizon needs a hypersurface");
      break;
    case Mode::Penrose:
      if (c.components.empty()) throw ConfigError("hypersurface.rho", "mode penrose needs a hypersurface");
      if (c.hypersurface_n < 5) throw ConfigError("hypersurface.n", "the GBC Penrose bound needs n >= 5");
      if (c.map) validate_radii(c.radii, 3);
      break;
    case Mode::Egb:
      require_map(c, doc);
      validate_radii(c.radii, 3);
      if (!c.alpha) throw ConfigError("alpha", "mode egb needs alpha");
      if (c.map->n < 4) throw ConfigError("map.n", "the EGB mass needs n >= 4");
      break;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream is(path);
  if (!is) throw ConfigError("--config", "cannot read " + path.string());
  Json doc;
  try {
    doc = Json::parse(is, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("(root)", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc, overrides);
}

namespace {

// ---- run modes -------------------------------------------------------------

struct Outputs {
  Json report;
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<std::pair<std::string, std::string>> dat;
  std::ostringstream summary;
  int status = 0;
};

std::string num(double v) { return format_number(v); }

MapSpec build_map(const RunConfig& c) { return parse_map(c.map->source, c.map->n, c.map->m); }

MassSelector selector(const RunConfig& c, MassKind kind) { return {kind, c.alpha.value_or(0.0)}; }

Json config_echo(const RunConfig& c) {
  Json j{{"mode", to_string(c.mode)}, {"level", c.level}, {"seed", c.seed}};
  if (c.map) j["map"] = Json{{"n", c.map->n}, {"m", c.map->m}, {"source", c.map->source}};
  if (c.alpha) j["alpha"] = *c.alpha;
  if (!c.components.empty()) {
    Json comps = Json::array();
    for (const auto& cc : c.components) comps.push_back(Json{{"rho", cc.rho}, {"center", cc.center}});
    j["hypersurface"] = Json{{"n", c.hypersurface_n}, {"components", comps}};
  }
  return j;
}

void run_check_identity(const RunConfig& c, Outputs& o) {
  const MapSpec map = build_map(c);
  const IdentitySelector sel{c.identity, c.alpha.value_or(0.0), c.include_normal_terms};
  const auto points = c.points.empty() ? annulus_points(c.point_count, map.n, c.r_inner, c.r_outer, c.seed) : c.points;
  std::vector<SweepRecord> records;
  if (c.steps.empty()) {
    // Relative steps {b, b/2, b/4} |x|, one sweep per point set.
    records.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) records[i].point = points[i];
    std::vector<std::vector<double>> per_point(points.size());
    parallel::evaluate(
        points.size(),
        [&](std::size_t i) {
          double r2 = 0.0;
          for (double v : points[i]) r2 += v * v;
          const double s = r2 > 0.0 ? std::sqrt(r2) : 1.0;
          const std::vector<double> st{c.relative_step * s, 0.5 * c.relative_step * s, 0.25 * c.relative_step * s};
          try {
            records[i].result = identity_residual(map, sel, points[i], st);
          } catch (const std::exception& e) {
            records[i].error = e.what();
          }
          return 0.0;
        },
        Execution::Parallel);
  } else {
    records = sweep(map, sel, points, c.steps);
  }

  std::vector<std::string> header{"point"};
  for (int i = 1; i <= map.n; ++i) header.push_back("x" + std::to_string(i));
  for (const char* h : {"h", "lhs", "rhs", "residual", "order", "error"}) header.emplace_back(h);
  CsvTable table(header);
  int errors = 0, unconverged = 0, exact = 0;
  double max_residual = 0.0;
  Json rows = Json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    auto base = [&] {
      std::vector<std::string> row{std::to_string(i)};
      for (double v : rec.point) row.push_back(num(v));
      return row;
    };
    if (!rec.result) {
      ++errors;
      auto row = base();
      for (int k = 0; k < 5; ++k) row.emplace_back("");
      row.push_back(rec.error);
      table.add_row(row);
      rows.push_back(Json{{"point", rec.point}, {"error", rec.error}});
      continue;
    }
    const auto& r = *rec.result;
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      auto row = base();
      row.push_back(num(r.steps[k]));
      row.push_back(num(r.lhs[k]));
      row.push_back(num(r.rhs));
      row.push_back(num(r.residuals[k]));
      row.push_back(k + 1 == r.steps.size() && r.order_estimate ? num(*r.order_estimate) : "");
      row.emplace_back("");
      table.add_row(row);
    }
    rows.push_back(to_json(r));
    max_residual = std::max(max_residual, r.residual);
    const bool at_floor = r.residual <= 1e-12 * (r.scale + 1.0);
    if (at_floor) {
      ++exact;
    } else if (!r.order_estimate || *r.order_estimate < 1.7 || *r.order_estimate > 2.3) {
      ++unconverged;
    }
  }
  o.tables.emplace_back("points.csv", table);
  o.report["identity"] = to_string(sel);
  o.report["points"] = rows;
  o.report["summary"] = Json{{"points", records.size()}, {"errors", errors}, {"unconverged", unconverged},
                             {"identically_satisfied", exact}, {"max_residual", json_number(max_residual)}};
  o.summary << "identity " << to_string(sel) << " at " << records.size() << " points\n";
  if (errors == 0 && max_residual == 0.0) {
    o.summary << "all residuals 0\n";
  } else {
    o.summary << "max finest-step residual " << num(max_residual) << "\n"
              << "points at rounding floor " << exact << ", outside order [1.7, 2.3] " << unconverged
              << ", errors " << errors << "\n";
  }
  const bool ok = errors == 0 && unconverged == 0;
  o.summary << "verdict: " << (ok ? "PASS" : "FAIL") << "\n";
  if (!ok) o.status = 2;
  if (c.write_dat) {
    std::ostringstream d;
    d << "# point h residual\n";
    for (std::size_t i = 0; i < records.size(); ++i)
      if (records[i].result)
        for (std::size_t k = 0; k < records[i].result->steps.size(); ++k)
          d << i << ' ' << num(records[i].result->steps[k]) << ' ' << num(records[i].result->residuals[k]) << '\n';
    o.dat.emplace_back("convergence.dat", d.str());
  }
}

CsvTable radius_table(const MassReport& r) {
  CsvTable t({"R", "flux"});
  for (const auto& [R, v] : r.per_radius) t.add_row({num(R), num(v)});
  return t;
}

std::string radius_dat(const MassReport& r) {
  std::ostringstream d;
  d << "# R flux\n";
  for (const auto& [R, v] : r.per_radius) d << num(R) << ' ' << num(v) << '\n';
  return d.str();
}

void run_mass(const RunConfig& c, Outputs& o) {
  const MapSpec map = build_map(c);
  const auto rule = sphere_rule(map.n, c.level);
  const MassSelector sel = selector(c, c.mass);
  const MassReport r = mass_surface(map, sel, c.radii, rule);
  const DecayReport d = asymptotic_flatness_diagnostic(map, c.radii, sphere_rule(map.n, 2));
  o.report["mass"] = to_json(r);
  o.report["decay"] = to_json(d);
  o.tables.emplace_back("per_radius.csv", radius_table(r));
  if (c.write_dat) o.dat.emplace_back("flux.dat", radius_dat(r));
  o.summary << "mass " << to_string(sel) << " limit " << num(r.limit) << " +- " << num(r.fit->uncertainty)
            << " (rate " << num(r.fit->rate) << ")\n"
            << "decay exponent " << num(d.decay_exponent) << ", tau " << num(d.tau)
            << (d.p2_ok ? "" : " [below the GBC threshold]") << (d.egb_ok ? "" : " [below the EGB threshold]") << "\n";
}

void run_balance(const RunConfig& c, Outputs& o) {
  const MapSpec map = build_map(c);
  const auto rule = sphere_rule(map.n, c.level);
  const MassSelector sel = selector(c, c.mass);
  BalanceOptions opts;
  opts.r0 = c.r0;
  opts.core_radius = c.core_radius;
  opts.radial_points = c.radial_points;
  if (!c.components.empty()) {
    ExteriorDomain ext;
    ext.sigma = parse_hypersurface(c.components.front().rho, c.hypersurface_n);
    if (c.boundary_s == "horizon") {
      ext.s_mode = BoundarySMode::Horizon;
    } else if (c.boundary_s == "map") {
      ext.s_mode = BoundarySMode::FromMap;
    } else {
      ext.s_mode = BoundarySMode::Expression;
      try {
        ext.s_expression = parse_expression(c.boundary_s, c.hypersurface_n, 'u');
      } catch (const Error& e) {
        throw ConfigError("boundary.s", e.what());
      }
    }
    opts.exterior = ext;
  }
  const MassReport r = mass_balance(map, sel, c.radii, rule, opts);
  o.report["mass"] = to_json(r);
  o.tables.emplace_back("per_radius.csv", radius_table(r));
  CsvTable shells({"inner", "outer", "value_unscaled"});
  for (const auto& s : r.bulk->shells) shells.add_row({num(s.inner), num(s.outer), num(s.value)});
  o.tables.emplace_back("shells.csv", shells);
  if (c.write_dat) o.dat.emplace_back("flux.dat", radius_dat(r));
  o.summary << "surface limit " << num(r.limit) << " +- " << num(r.fit->uncertainty) << "\n"
            << "bulk " << num(r.bulk->truncated) << " + tail " << num(r.bulk->tail)
            << (r.bulk->tail_reliable ? "" : " (unreliable, not used)") << "\n";
  if (r.boundary_term) o.summary << "boundary term " << num(*r.boundary_term) << "\n";
  o.summary << "balance residual " << num(*r.balance_residual) << " (tolerance " << num(*r.balance_tolerance) << ")\n";
  if (r.positivity_ok) o.summary << "positivity " << (*r.positivity_ok ? "holds" : "VIOLATED") << "\n";
  for (const auto& w : r.warnings) o.summary << "warning: " << w << "\n";
  const bool ok = *r.balance_ok && r.positivity_ok.value_or(true);
  o.summary << "verdict: " << (ok ? "PASS" : "FAIL") << "\n";
  if (!ok) o.status = 2;
}

std::vector<HorizonReport> component_reports(const RunConfig& c, const QuadratureRule& rule) {
  std::vector<HorizonReport> out;
  for (const auto& cc : c.components)
    out.push_back(horizon_report(parse_hypersurface(cc.rho, c.hypersurface_n), rule, c.alpha.value_or(0.0)));
  return out;
}

void run_horizon(const RunConfig& c, Outputs& o) {
  const auto rule = sphere_rule(c.hypersurface_n, c.level);
  const auto reports = component_reports(c, rule);
  Json comps = Json::array();
  CsvTable t({"component", "area", "int_sigma1", "int_sigma2", "int_sigma3", "three_convex", "af_lhs", "af_rhs",
              "af_margin"});
  bool ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    comps.push_back(to_json(r));
    t.add_row({std::to_string(i), num(r.area), num(r.int_sigma1), num(r.int_sigma2), num(r.int_sigma3),
               r.three_convex ? "true" : "false", r.af ? num(r.af->lhs) : "", r.af ? num(r.af->rhs) : "",
               r.af ? num(r.af->margin) : ""});
    o.summary << "component " << i << ": area " << num(r.area) << ", 3-convex " << (r.three_convex ? "yes" : "no");
    if (r.af) {
      o.summary << ", AF lhs " << num(r.af->lhs) << " rhs " << num(r.af->rhs) << " margin " << num(r.af->margin);
      if (r.three_convex && r.af->margin < -1e-10 * std::max(1.0, r.af->rhs)) ok = false;
    }
    o.summary << "\n";
  }
  o.report["components"] = comps;
  o.tables.emplace_back("horizon.csv", t);
  if (c.map && c.map->n == c.hypersurface_n) {
    const MapSpec map = build_map(c);
    Json diag = Json::array();
    for (const auto& cc : c.components) {
      const auto d = horizon_divergence_diagnostic(map, parse_hypersurface(cc.rho, c.hypersurface_n),
                                                   sphere_rule(c.hypersurface_n, 1));
      diag.push_back(to_json(d));
      o.summary << "map near boundary: " << d.note << "\n";
    }
    o.report["divergence"] = diag;
  }
  o.summary << "verdict: " << (ok ? "PASS" : "FAIL") << "\n";
  if (!ok) o.status = 2;
}

void run_penrose(const RunConfig& c, Outputs& o) {
  const int n = c.hypersurface_n;
  const auto rule = sphere_rule(n, c.level);
  const auto reports = component_reports(c, rule);
  std::vector<double> areas;
  double lhs = 0.0;
  bool convex = true;
  CsvTable t({"component", "area", "boundary_term", "component_bound", "three_convex"});
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    areas.push_back(r.area);
    lhs += r.boundary_gbc;
    convex = convex && r.three_convex;
    t.add_row({std::to_string(i), num(r.area), num(r.boundary_gbc), num(r.penrose_gbc),
               r.three_convex ? "true" : "false"});
  }
  const PenroseBound b = penrose_rhs(areas, n, PenroseMode::Gbc);
  const double tol = 1e-10 * std::max(1.0, b.combined);
  bool ok = lhs >= b.combined - tol;
  t.add_row({"total", num(std::accumulate(areas.begin(), areas.end(), 0.0)), num(lhs), num(b.combined),
             convex ? "true" : "false"});
  o.tables.emplace_back("penrose.csv", t);
  Json j{{"boundary_term", json_number(lhs)},
         {"rhs", json_number(b.combined)},
         {"per_component_rhs", json_number(b.per_component)},
         {"margin", json_number(lhs - b.combined)},
         {"three_convex", convex}};
  o.summary << "          lhs              rhs              margin\n"
            << "boundary  " << num(lhs) << "  " << num(b.combined) << "  " << num(lhs - b.combined) << "\n"
            << "superadditivity: sum of component bounds " << num(b.per_component) << " >= combined "
            << num(b.combined) << "\n"
            << "3-convex: " << (convex ? "yes" : "no") << "\n";
  if (c.map) {
    const MapSpec map = build_map(c);
    const MassReport m = mass_surface(map, {MassKind::P2}, c.radii, sphere_rule(map.n, c.level));
    j["mass"] = to_json(m);
    const double margin = m.limit - b.combined;
    j["mass_margin"] = json_number(margin);
    o.summary << "mass     " << num(m.limit) << "  " << num(b.combined) << "  " << num(margin) << "\n";
    if (margin < -(m.fit->uncertainty + tol)) ok = false;
  }
  o.report["penrose"] = j;
  o.summary << "verdict: " << (ok ? "PASS" : "FAIL") << "\n";
  if (!ok) o.status = 2;
}

void run_egb(const RunConfig& c, Outputs& o) {
  const MapSpec map = build_map(c);
  const auto rule = sphere_rule(map.n, c.level);
  const double alpha = *c.alpha;
  const MassReport egb = mass_surface(map, {MassKind::Egb, alpha}, c.radii, rule);
  const MassReport adm = mass_surface(map, {MassKind::P1}, c.radii, rule);
  const MassReport raw = mass_surface(map, {MassKind::AdmRaw}, c.radii, rule);
  const double diff = std::abs(egb.limit - adm.limit);
  const double allowed = egb.fit->uncertainty + adm.fit->uncertainty + 1e-12;
  bool ok = diff <= allowed;
  o.report["egb"] = to_json(egb);
  o.report["adm"] = to_json(adm);
  o.report["adm_raw"] = to_json(raw);
  o.report["difference"] = json_number(diff);
  o.report["allowed"] = json_number(allowed);
  CsvTable t({"R", "flux_egb", "flux_p1", "flux_adm_raw"});
  for (std::size_t i = 0; i < egb.per_radius.size(); ++i)
    t.add_row({num(egb.per_radius[i].first), num(egb.per_radius[i].second), num(adm.per_radius[i].second),
               num(raw.per_radius[i].second)});
  o.tables.emplace_back("per_radius.csv", t);
  o.summary << "m_EGB(" << num(alpha) << ") " << num(egb.limit) << " +- " << num(egb.fit->uncertainty) << "\n"
            << "m_ADM (P1) " << num(adm.limit) << " +- " << num(adm.fit->uncertainty) << "\n"
            << "m_ADM (raw) " << num(raw.limit) << " +- " << num(raw.fit->uncertainty) << "\n"
            << "|m_EGB - m_ADM| " << num(diff) << " (allowed " << num(allowed) << ")\n";
  if (!c.components.empty()) {
    const auto r = horizon_report(parse_hypersurface(c.components.front().rho, c.hypersurface_n),
                                  sphere_rule(c.hypersurface_n, c.level), alpha);
    o.report["horizon"] = to_json(r);
    const double tol = 1e-10 * std::max(1.0, r.penrose_egb);
    o.summary << "EGB boundary " << num(r.boundary_egb) << " vs bound " << num(r.penrose_egb) << "\n";
    if (r.boundary_egb < r.penrose_egb - tol) ok = false;
  }
  o.summary << "verdict: " << (ok ? "PASS" : "FAIL") << "\n";
  if (!ok) o.status = 2;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out) {
  Outputs o;
  o.report["schema"] = 1;
  o.report["config"] = config_echo(c);
  switch (c.mode) {
    case Mode::CheckIdentity: run_check_identity(c, o); break;
    case Mode::Mass: run_mass(c, o); break;
    case Mode::Balance: run_balance(c, o); break;
    case Mode::Horizon: run_horizon(c, o); break;
    case Mode::Penrose: run_penrose(c, o); break;
    case Mode::Egb: run_egb(c, o); break;
  }
  o.report["exit_status"] = o.status;
  if (c.write_json) write_file_atomic(c.out_dir / "report.json", o.report.dump(2) + "\n");
  if (c.write_csv)
    for (const auto& [name, table] : o.tables) write_file_atomic(c.out_dir / "tables" / name, table.str());
  for (const auto& [name, text] : o.dat) write_file_atomic(c.out_dir / "tables" / name, text);
  write_file_atomic(c.out_dir / "summary.txt", o.summary.str());
  if (!c.quiet) out << o.summary.str();
  return o.status;
}

}  // namespace gbclab
