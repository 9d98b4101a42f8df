#include "gbclab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "gbclab/error.hpp"

namespace gbclab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const ExtrapolationResult& r) {
  return Json{{"limit", json_number(r.limit)},
              {"rate", json_number(r.rate)},
              {"fit_residual", json_number(r.fit_residual)},
              {"uncertainty", json_number(r.uncertainty)}};
}

Json to_json(const MassReport& r) {
  Json j;
  j["which"] = to_string(r.which);
  j["n"] = r.n;
  j["m"] = r.m;
  j["quadrature_level"] = r.quadrature_level;
  if (r.radial_points > 0) j["radial_points"] = r.radial_points;
  Json rows = Json::array();
  for (const auto& [R, v] : r.per_radius) rows.push_back(Json{{"R", R}, {"flux", json_number(v)}});
  j["per_radius"] = rows;
  if (r.fit) j["fit"] = to_json(*r.fit);
  if (!r.fit_error.empty()) j["fit_error"] = r.fit_error;
  j["limit"] = json_number(r.limit);
  if (r.bulk) {
    const auto& b = *r.bulk;
    Json shells = Json::array();
    for (const auto& s : b.shells)
      shells.push_back(Json{{"inner", s.inner}, {"outer", s.outer}, {"value", json_number(s.value)}});
    j["bulk"] = Json{{"truncated", json_number(b.truncated)},
                     {"tail", json_number(b.tail)},
                     {"tail_exponent", json_number(b.tail_exponent)},
                     {"tail_reliable", b.tail_reliable},
                     {"total", json_number(b.total())},
                     {"inner_radius", b.inner_radius},
                     {"outer_radius", b.outer_radius},
                     {"shells_unscaled", shells}};
  }
  if (r.boundary_term) j["boundary_term"] = json_number(*r.boundary_term);
  if (r.balance_residual) j["balance_residual"] = json_number(*r.balance_residual);
  if (r.balance_tolerance) j["balance_tolerance"] = json_number(*r.balance_tolerance);
  if (r.balance_ok) j["balance_ok"] = *r.balance_ok;
  if (r.normal_bundle) {
    const auto& nb = *r.normal_bundle;
    j["normal_bundle"] = Json{{"points", nb.points},
                              {"max_normal_ratio", json_number(nb.max_normal_ratio)},
                              {"min_l2", json_number(nb.min_l2)},
                              {"flat", nb.flat}};
  }
  if (r.positivity_checked) j["positivity_checked"] = *r.positivity_checked;
  if (r.positivity_ok) j["positivity_ok"] = *r.positivity_ok;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const HorizonReport& r) {
  Json j{{"n", r.n},
         {"level", r.level},
         {"area", json_number(r.area)},
         {"int_sigma1", json_number(r.int_sigma1)},
         {"int_sigma2", json_number(r.int_sigma2)},
         {"int_sigma3", json_number(r.int_sigma3)},
         {"min_sigma1", json_number(r.min_sigma1)},
         {"min_sigma2", json_number(r.min_sigma2)},
         {"min_sigma3", json_number(r.min_sigma3)},
         {"min_kappa", json_number(r.min_kappa)},
         {"three_convex", r.three_convex}};
  if (r.af)
    j["af"] = Json{{"lhs", json_number(r.af->lhs)}, {"rhs", json_number(r.af->rhs)}, {"margin", json_number(r.af->margin)}};
  if (r.n >= 5) {
    j["penrose_gbc"] = json_number(r.penrose_gbc);
    j["boundary_gbc"] = json_number(r.boundary_gbc);
  }
  j["alpha"] = r.alpha;
  j["penrose_egb"] = json_number(r.penrose_egb);
  j["boundary_egb"] = json_number(r.boundary_egb);
  return j;
}

Json to_json(const DecayReport& r) {
  Json rows = Json::array();
  for (const auto& [R, v] : r.samples) rows.push_back(Json{{"R", R}, {"sup", json_number(v)}});
  return Json{{"samples", rows},
              {"decay_exponent", json_number(r.decay_exponent)},
              {"tau", json_number(r.tau)},
              {"zero", r.zero},
              {"p2_ok", r.p2_ok},
              {"egb_ok", r.egb_ok}};
}

Json to_json(const HorizonDivergenceReport& r) {
  Json rates = Json::array();
  for (double v : r.rates) rates.push_back(json_number(v));
  return Json{{"distances", r.distances},
              {"rates", rates},
              {"min_rate", json_number(r.min_rate)},
              {"diverges", r.diverges},
              {"note", r.note}};
}

Json to_json(const IdentityResidual& r) {
  Json lhs = Json::array(), res = Json::array();
  for (double v : r.lhs) lhs.push_back(json_number(v));
  for (double v : r.residuals) res.push_back(json_number(v));
  Json j{{"point", r.point}, {"steps", r.steps}, {"lhs", lhs}, {"rhs", json_number(r.rhs)},
         {"scale", json_number(r.scale)}, {"residuals", res}, {"residual", json_number(r.residual)}};
  j["order_estimate"] = r.order_estimate ? json_number(*r.order_estimate) : Json(nullptr);
  return j;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(cells[i]);
  }
  out += "\r\n";
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw Error("CSV row width differs from the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out = "# schema=1\r\n";
  append_row(out, header_);
  for (const auto& r : rows_) append_row(out, r);
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    os.flush();
    if (!os) {
      os.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

}  // namespace gbclab
