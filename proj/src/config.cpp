#include "lieflow/config.hpp"

#include <fstream>
#include <sstream>

namespace lieflow {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<double> GridSpec::xs(double h) const {
  std::vector<double> g;
  int n = static_cast<int>(std::lround(extent / h));
  if (n < 2) throw ConfigError("grid step too large for the extent");
  for (int i = 0; i <= n; ++i) g.push_back(x0 + i * h);
  return g;
}

std::vector<double> GridSpec::ys(double h) const {
  std::vector<double> g = xs(h);
  for (double& v : g) v += y0 - x0;
  return g;
}

namespace {

double number_from(const json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_rational(v.get<std::string>()).get_d();
  throw ConfigError(std::string(what) + ": expected a number or \"p/q\" string");
}

Poly<double> poly_from(const json& v, const char* what) {
  Poly<double> p;
  if (v.is_array()) {
    for (const auto& c : v) p.c.push_back(number_from(c, what));
  } else {
    p.c.push_back(number_from(v, what));
  }
  p.trim();
  return p;
}

PolyMat<double> polymat_from(const json& v, int rows, int cols, const std::string& what) {
  if (!v.is_array() || static_cast<int>(v.size()) != rows)
    throw ConfigError(what + ": expected " + std::to_string(rows) + " rows");
  PolyMat<double> pm(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = v[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ConfigError(what + ": expected " + std::to_string(cols) + " columns");
    for (int c = 0; c < cols; ++c) pm.at(r, c) = poly_from(row[c], what.c_str());
  }
  return pm;
}

std::pair<int, int> block_key(const std::string& key) {
  auto comma = key.find(',');
  if (comma == std::string::npos) throw ConfigError("coefficient block key must be \"k,i\"");
  try {
    return {std::stoi(key.substr(0, comma)), std::stoi(key.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("coefficient block key must be \"k,i\"");
  }
}

std::vector<ZeroGradeTerm<double>> zero_terms_from(const json& v, const char* what) {
  std::vector<ZeroGradeTerm<double>> out;
  if (!v.is_array()) throw ConfigError(std::string(what) + ": expected an array");
  for (const auto& t : v) {
    if (!t.is_object() || !t.contains("kind") || !t.contains("root") || !t.contains("poly"))
      throw ConfigError(std::string(what) + ": each term needs kind, root, poly");
    std::string kind = t["kind"].get<std::string>();
    int root = t["root"].get<int>();
    GeneratorRef g;
    if (kind == "cartan")
      g = GeneratorRef::cartan(root);
    else if (kind == "raise")
      g = GeneratorRef::raise(root);
    else if (kind == "lower")
      g = GeneratorRef::lower(root);
    else
      throw ConfigError(std::string(what) + ": kind must be cartan, raise, or lower");
    out.push_back({g, poly_from(t["poly"], what)});
  }
  return out;
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  if (!j.contains("rank")) throw ConfigError("missing \"rank\"");
  c.rank = j["rank"].get<int>();
  if (c.rank < 1 || c.rank > 12) throw ConfigError("rank out of supported range");
  if (!j.contains("grading")) throw ConfigError("missing \"grading\"");
  if (j["grading"].is_string()) {
    c.grading = parse_grading(j["grading"].get<std::string>(), c.rank);
  } else if (j["grading"].is_array()) {
    std::string txt;
    for (const auto& v : j["grading"]) {
      if (!txt.empty()) txt += ',';
      txt += std::to_string(v.get<int>());
    }
    c.grading = parse_grading(txt, c.rank);
  } else {
    throw ConfigError("\"grading\" must be a string or an array of 0/1");
  }
  if (j.contains("max_grade")) c.max_grade = j["max_grade"].get<int>();
  if (c.max_grade < 1) throw ConfigError("\"max_grade\" must be at least 1");
  if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
  if (c.mode == "rational") c.mode = "exact";
  if (c.mode != "float" && c.mode != "exact")
    throw ConfigError("\"mode\" must be \"float\" or \"exact\"");
  if (j.contains("seed")) c.seed = j["seed"].get<unsigned long>();
  if (j.contains("samples")) c.samples = j["samples"].get<int>();
  if (c.samples < 1) throw ConfigError("\"samples\" must be positive");
  if (j.contains("tol")) c.tol = j["tol"].get<double>();
  if (c.tol <= 0) throw ConfigError("\"tol\" must be positive");
  if (j.contains("reduced_scan")) c.reduced_scan = j["reduced_scan"].get<bool>();

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("origin")) {
      c.grid.x0 = g["origin"][0].get<double>();
      c.grid.y0 = g["origin"][1].get<double>();
    }
    if (g.contains("extent")) c.grid.extent = g["extent"].get<double>();
    if (c.grid.extent <= 0) throw ConfigError("grid extent must be positive");
    if (g.contains("steps")) {
      c.grid.steps.clear();
      for (const auto& h : g["steps"]) c.grid.steps.push_back(h.get<double>());
      if (c.grid.steps.empty()) throw ConfigError("grid steps must not be empty");
      for (double h : c.grid.steps)
        if (h <= 0) throw ConfigError("grid steps must be positive");
    }
  }

  SiteLattice lat = c.lattice();
  int bmax = lat.size() - 1;
  if (c.max_grade > bmax)
    throw ConfigError("\"max_grade\" exceeds the number of site gaps");
  if (j.contains("coefficients")) {
    const auto& co = j["coefficients"];
    c.coeffs.max_grade = c.max_grade;
    if (!co.contains("raising") || !co.contains("lowering"))
      throw ConfigError("\"coefficients\" needs \"raising\" and \"lowering\" block maps");
    auto fill_literal = [&](const std::string& lit, bool raising) {
      if (lit != "identity" && lit != "zero")
        throw ConfigError("coefficient literal must be \"identity\" or \"zero\"");
      for (int k = 1; k <= c.max_grade; ++k)
        for (int i = 0; i + k <= bmax; ++i) {
          int rows = lat.site(i).R + 1, cols = lat.site(i + k).R + 1;
          if (!raising) std::swap(rows, cols);
          PolyMat<double> pm(rows, cols);
          if (lit == "identity")
            for (int d = 0; d < std::min(rows, cols); ++d)
              pm.at(d, d) = Poly<double>::constant(1.0);
          (raising ? c.coeffs.pbar : c.coeffs.p)[{k, i}] = std::move(pm);
        }
    };
    if (co["raising"].is_string()) {
      fill_literal(co["raising"].get<std::string>(), true);
    } else {
      for (const auto& [key, val] : co["raising"].items()) {
        auto [k, i] = block_key(key);
        if (k < 1 || k > c.max_grade || i < 0 || i + k > bmax)
          throw ConfigError("raising block " + key + " is outside the lattice");
        c.coeffs.pbar[{k, i}] =
            polymat_from(val, lat.site(i).R + 1, lat.site(i + k).R + 1, "raising " + key);
      }
    }
    if (co["lowering"].is_string()) {
      fill_literal(co["lowering"].get<std::string>(), false);
    } else {
      for (const auto& [key, val] : co["lowering"].items()) {
        auto [k, i] = block_key(key);
        if (k < 1 || k > c.max_grade || i < 0 || i + k > bmax)
          throw ConfigError("lowering block " + key + " is outside the lattice");
        c.coeffs.p[{k, i}] =
            polymat_from(val, lat.site(i + k).R + 1, lat.site(i).R + 1, "lowering " + key);
      }
    }
    if (co.contains("zero_raising"))
      c.coeffs.zero_plus = zero_terms_from(co["zero_raising"], "zero_raising");
    if (co.contains("zero_lowering"))
      c.coeffs.zero_minus = zero_terms_from(co["zero_lowering"], "zero_lowering");
    validate_coefficients(lat, c.coeffs);
    c.has_coeffs = true;
  }
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

nlohmann::ordered_json config_echo(const RunConfig& c) {
  ordered_json out;
  out["rank"] = c.rank;
  std::string g;
  for (int v : c.grading) g += static_cast<char>('0' + v);
  out["grading"] = g;
  out["max_grade"] = c.max_grade;
  out["mode"] = c.mode;
  out["seed"] = c.seed;
  out["samples"] = c.samples;
  out["tol"] = c.tol;
  out["grid"] = ordered_json{{"origin", {c.grid.x0, c.grid.y0}},
                             {"extent", c.grid.extent},
                             {"steps", c.grid.steps}};
  out["reduced_scan"] = c.reduced_scan;
  out["has_coefficients"] = c.has_coeffs;
  return out;
}

}  // namespace lieflow
