#include "geodyn/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "geodyn/action.hpp"
#include "geodyn/builtin_metrics.hpp"
#include "geodyn/clifford.hpp"
#include "geodyn/expression.hpp"
#include "geodyn/field_equations.hpp"
#include "geodyn/geodesic.hpp"
#include "geodyn/lagrangian.hpp"
#include "geodyn/spectral_triple.hpp"

namespace geodyn {

using json = nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string describe(const std::vector<Diagnostic>& d) {
  std::string s;
  for (const auto& x : d) s += (s.empty() ? "" : "; ") + x.path + ": " + x.message;
  return s;
}

std::string key_path(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : Error("invalid configuration: " + describe(diagnostics)), diagnostics_(std::move(diagnostics)) {}

bool TaskReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
}

bool RunReport::passed() const {
  return std::all_of(tasks.begin(), tasks.end(), [](const TaskReport& t) { return t.passed(); });
}

namespace {

// ---------------------------------------------------------------------------
// Reading with diagnostics

class Reader {
 public:
  std::vector<Diagnostic> diags;
  std::map<std::string, double> params;

  void error(const std::string& path, const std::string& msg) { diags.push_back({path, msg}); }

  void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
      if (!known) error(key_path(path, it.key()), "unknown key");
    }
  }

  const json* get(const json& parent, const std::string& path, const char* key, bool required) {
    if (!parent.contains(key)) {
      if (required) error(key_path(path, key), "required");
      return nullptr;
    }
    return &parent[key];
  }

  const json* object(const json& parent, const std::string& path, const char* key, bool required) {
    const json* j = get(parent, path, key, required);
    if (j && !j->is_object()) {
      error(key_path(path, key), "expected an object");
      return nullptr;
    }
    return j;
  }

  const json* array(const json& parent, const std::string& path, const char* key, bool required) {
    const json* j = get(parent, path, key, required);
    if (j && !j->is_array()) {
      error(key_path(path, key), "expected an array");
      return nullptr;
    }
    return j;
  }

  /// A number or a constant expression over the parameters.
  std::optional<double> number(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
      try {
        const Expression e = Expression::parse(j.get<std::string>(), {}, params);
        const double v = e(std::span<const double>{});
        if (!std::isfinite(v)) {
          error(path, "expression '" + e.text() + "' is not finite");
          return std::nullopt;
        }
        return v;
      } catch (const ExpressionError& e) {
        error(path, e.what());
        return std::nullopt;
      }
    }
    error(path, "expected a number or a constant expression");
    return std::nullopt;
  }

  std::optional<double> number(const json& parent, const std::string& path, const char* key,
                               std::optional<double> fallback) {
    const json* j = get(parent, path, key, !fallback.has_value());
    if (!j) return fallback;
    return number(*j, key_path(path, key));
  }

  std::optional<double> positive(const json& parent, const std::string& path, const char* key,
                                 std::optional<double> fallback) {
    auto v = number(parent, path, key, fallback);
    if (v && !(*v > 0.0)) {
      error(key_path(path, key), "must be positive");
      return std::nullopt;
    }
    return v;
  }

  std::optional<long long> integer(const json& parent, const std::string& path, const char* key,
                                   std::optional<long long> fallback, long long lo, long long hi) {
    const json* j = get(parent, path, key, !fallback.has_value());
    if (!j) return fallback;
    if (!j->is_number_integer()) {
      error(key_path(path, key), "expected an integer");
      return std::nullopt;
    }
    const auto v = j->get<long long>();
    if (v < lo || v > hi) {
      error(key_path(path, key), "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> boolean(const json& parent, const std::string& path, const char* key, bool fallback) {
    const json* j = get(parent, path, key, false);
    if (!j) return fallback;
    if (!j->is_boolean()) {
      error(key_path(path, key), "expected true or false");
      return std::nullopt;
    }
    return j->get<bool>();
  }

  std::optional<std::string> text(const json& parent, const std::string& path, const char* key,
                                  std::optional<std::string> fallback) {
    const json* j = get(parent, path, key, !fallback.has_value());
    if (!j) return fallback;
    if (!j->is_string()) {
      error(key_path(path, key), "expected a string");
      return std::nullopt;
    }
    return j->get<std::string>();
  }

  std::optional<Expression> expression(const json& j, const std::string& path, const std::vector<std::string>& vars) {
    try {
      if (j.is_number()) return Expression::parse(fmt(j.get<double>()), vars, params);
      if (j.is_string()) return Expression::parse(j.get<std::string>(), vars, params);
    } catch (const ExpressionError& e) {
      error(path, e.what());
      return std::nullopt;
    }
    error(path, "expected an expression");
    return std::nullopt;
  }

  /// Nested arrays of expressions flattened row-major, `shape` the expected extents.
  std::optional<std::vector<Expression>> expressions(const json& j, const std::string& path, std::vector<int> shape,
                                                     const std::vector<std::string>& vars) {
    std::string want;
    for (std::size_t i = 0; i < shape.size(); ++i) want += (i ? "x" : "") + std::to_string(shape[i]);
    if (!shape_matches(j, shape, 0)) {
      error(path, "expected " + want + " expressions, got " + shape_of(j));
      return std::nullopt;
    }
    std::vector<Expression> out;
    bool ok = true;
    flatten(j, path, vars, out, ok);
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<Eigen::VectorXd> vector(const json& j, const std::string& path, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
      error(path, "expected " + std::to_string(n) + " numbers, got " + shape_of(j));
      return std::nullopt;
    }
    Eigen::VectorXd v(n);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const auto x = number(j[static_cast<std::size_t>(i)], index_path(path, static_cast<std::size_t>(i)));
      if (x)
        v[i] = *x;
      else
        ok = false;
    }
    if (!ok) return std::nullopt;
    return v;
  }

  std::optional<std::complex<double>> complex(const json& j, const std::string& path) {
    if (j.is_array()) {
      if (j.size() != 2) {
        error(path, "expected [re, im]");
        return std::nullopt;
      }
      const auto re = number(j[0], index_path(path, 0));
      const auto im = number(j[1], index_path(path, 1));
      if (!re || !im) return std::nullopt;
      return std::complex<double>(*re, *im);
    }
    const auto re = number(j, path);
    if (!re) return std::nullopt;
    return std::complex<double>(*re, 0.0);
  }

  /// Square or rectangular complex matrix; `rows`/`cols` of 0 accept any size.
  std::optional<Eigen::MatrixXcd> cmatrix(const json& j, const std::string& path, int rows = 0, int cols = 0) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
      error(path, "expected a matrix (array of rows)");
      return std::nullopt;
    }
    const auto r = static_cast<int>(j.size());
    const auto c = static_cast<int>(j[0].size());
    if ((rows && r != rows) || (cols && c != cols)) {
      error(path, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " + shape_of(j));
      return std::nullopt;
    }
    Eigen::MatrixXcd m(r, c);
    bool ok = true;
    for (int i = 0; i < r; ++i) {
      const json& row = j[static_cast<std::size_t>(i)];
      const std::string rp = index_path(path, static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<int>(row.size()) != c) {
        error(rp, "rows must all have " + std::to_string(c) + " entries");
        ok = false;
        continue;
      }
      for (int k = 0; k < c; ++k) {
        const auto z = complex(row[static_cast<std::size_t>(k)], index_path(rp, static_cast<std::size_t>(k)));
        if (z)
          m(i, k) = *z;
        else
          ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return m;
  }

  static std::string shape_of(const json& j) {
    if (!j.is_array()) return std::string(j.type_name());
    std::string s = std::to_string(j.size());
    if (!j.empty() && j[0].is_array()) s += "x" + shape_of(j[0]);
    return s;
  }

 private:
  static bool shape_matches(const json& j, const std::vector<int>& shape, std::size_t level) {
    if (level == shape.size()) return !j.is_array();
    if (!j.is_array() || static_cast<int>(j.size()) != shape[level]) return false;
    return std::all_of(j.begin(), j.end(), [&](const json& c) { return shape_matches(c, shape, level + 1); });
  }

  void flatten(const json& j, const std::string& path, const std::vector<std::string>& vars,
               std::vector<Expression>& out, bool& ok) {
    if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], index_path(path, i), vars, out, ok);
      return;
    }
    auto e = expression(j, path, vars);
    if (e)
      out.push_back(std::move(*e));
    else
      ok = false;
  }
};

// ---------------------------------------------------------------------------
// Scenario model

struct FrequencyCheck {
  int time = 0;
  int angle = 0;
  double expect = 0.0;
  double tolerance = 1e-4;
};

struct TaskSpec {
  std::string type;
  double tolerance = 0.0;
  std::vector<Point> points;
  std::optional<Expression> expect_scalar, expect_kretschmann;
  bool expect_riemann_zero = false;
  bool expect_ricci_zero = false;
  // geodesic
  Point x0;
  Eigen::VectorXd v0;
  double dtau = 0.0;
  int steps = 0;
  int record_every = 1;
  std::optional<FrequencyCheck> frequency;
  // action
  std::optional<Expression> E;
  std::optional<double> expect_total;
  // field equations
  std::string form;
  std::optional<std::vector<Expression>> T;
  double fd_step = 1e-4;
  // axioms / trace oracle
  bool fluctuation = false;
  int samples = 8;
  double max_error = 1e-2;
};

struct Scenario {
  std::string name = "unnamed";
  std::uint64_t seed = 0;
  bool has_chart = false;
  int n = 0;
  Signature eta;
  std::vector<std::string> coords;
  std::optional<Box> box;
  int grid = 5;
  bool has_geometry = false;
  bool geometry_declared = false;
  std::optional<BuiltinGeometry> builtin;
  Vielbein vielbein;
  GeneralizedMetric metric;
  SMGaugeConfig sm;
  HiggsField higgs;
  ConnectionConstants consts;
  Reparametrization reparam;
  std::optional<FiniteTriple> triple;
  CutoffFunction cutoff = CutoffFunction::exponential();
  std::optional<Moments> moments_override;
  double lambda2 = 1.0;
  std::vector<TaskSpec> tasks;
};

const std::vector<std::string> kTaskTypes = {"curvature",    "geodesic",  "action",      "field-equations",
                                             "axioms",       "limit-check", "trace-oracle"};

void read_chart(Reader& r, const json& root, Scenario& s, const std::optional<BuiltinGeometry>& builtin,
                bool needs_box) {
  const json* chart = r.object(root, "", "chart", false);
  if (!chart) {
    if (builtin) {
      s.has_chart = true;
      s.n = builtin->vielbein.dimension();
      s.eta = builtin->vielbein.eta;
      s.coords = builtin->coordinates;
    }
    if (needs_box) r.error("chart.box", "required by the action and limit-check tasks");
    return;
  }
  r.check_keys(*chart, "chart", {"dimension", "signature", "coordinates", "box", "grid"});
  const auto n = r.integer(*chart, "chart", "dimension",
                           builtin ? std::optional<long long>(builtin->vielbein.dimension()) : std::nullopt, 1,
                           kMaxDimension);
  if (!n) return;
  s.has_chart = true;
  s.n = static_cast<int>(*n);
  const int dim = s.n;

  s.eta = builtin && builtin->vielbein.dimension() == dim ? builtin->vielbein.eta : Signature::euclidean(dim);
  if (const json* sig = r.get(*chart, "chart", "signature", false)) {
    std::optional<Signature> eta;
    if (sig->is_string() && *sig == "euclidean") {
      eta = Signature::euclidean(dim);
    } else if (sig->is_string() && *sig == "lorentzian") {
      eta = Signature::lorentzian(dim);
    } else if (sig->is_array() && static_cast<int>(sig->size()) == dim &&
               std::all_of(sig->begin(), sig->end(), [](const json& x) { return x == 1 || x == -1; })) {
      eta = Signature(sig->get<std::vector<int>>());
    } else {
      r.error("chart.signature", "expected \"euclidean\", \"lorentzian\" or " + std::to_string(dim) + " entries of +1/-1");
    }
    if (eta) {
      if (builtin && builtin->name != "flat" && builtin->vielbein.dimension() == dim &&
          eta->signs() != builtin->vielbein.eta.signs()) {
        r.error("chart.signature", "does not match the signature of builtin geometry '" + builtin->name + "'");
      }
      s.eta = *eta;
    }
  }

  if (builtin && builtin->vielbein.dimension() == dim) {
    s.coords = builtin->coordinates;
  } else {
    for (int i = 0; i < dim; ++i) s.coords.push_back("x" + std::to_string(i));
  }
  if (const json* c = r.array(*chart, "chart", "coordinates", false)) {
    if (static_cast<int>(c->size()) != dim ||
        !std::all_of(c->begin(), c->end(), [](const json& x) { return x.is_string(); })) {
      r.error("chart.coordinates", "expected " + std::to_string(dim) + " names");
    } else {
      s.coords = c->get<std::vector<std::string>>();
      std::set<std::string> seen;
      for (std::size_t i = 0; i < s.coords.size(); ++i) {
        const std::string& name = s.coords[i];
        const bool ident = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') &&
                           std::all_of(name.begin(), name.end(), [](char ch) {
                             return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
                           });
        if (!ident) r.error(index_path("chart.coordinates", i), "'" + name + "' is not an identifier");
        if (!seen.insert(name).second) r.error(index_path("chart.coordinates", i), "duplicate name '" + name + "'");
      }
    }
  }

  if (const auto g = r.integer(*chart, "chart", "grid", 5, 2, 1025)) s.grid = static_cast<int>(*g);

  const json* box = r.object(*chart, "chart", "box", needs_box);
  if (!box) return;
  r.check_keys(*box, "chart.box", {"lo", "hi", "periodic"});
  const json* lo = r.get(*box, "chart.box", "lo", true);
  const json* hi = r.get(*box, "chart.box", "hi", true);
  if (!lo || !hi) return;
  const auto vlo = r.vector(*lo, "chart.box.lo", dim);
  const auto vhi = r.vector(*hi, "chart.box.hi", dim);
  if (!vlo || !vhi) return;
  Box b{*vlo, *vhi, {}};
  bool ok = true;
  for (int i = 0; i < dim; ++i) {
    if (!((*vhi)[i] > (*vlo)[i])) {
      r.error(index_path("chart.box.hi", static_cast<std::size_t>(i)), "must exceed chart.box.lo");
      ok = false;
    }
  }
  if (const json* p = r.array(*box, "chart.box", "periodic", false)) {
    if (static_cast<int>(p->size()) != dim ||
        !std::all_of(p->begin(), p->end(), [](const json& x) { return x.is_boolean(); })) {
      r.error("chart.box.periodic", "expected " + std::to_string(dim) + " booleans");
      ok = false;
    } else {
      b.periodic = p->get<std::vector<bool>>();
    }
  }
  if (ok) s.box = b;
}

std::optional<BuiltinGeometry> peek_builtin(Reader& r, const json& root) {
  if (!root.contains("geometry") || !root["geometry"].is_object()) return std::nullopt;
  const json& g = root["geometry"];
  if (!g.contains("builtin")) return std::nullopt;
  if (!g["builtin"].is_string()) {
    r.error("geometry.builtin", "expected a string");
    return std::nullopt;
  }
  const std::string name = g["builtin"];
  const auto names = builtin_geometry_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& x : names) list += (list.empty() ? "" : ", ") + x;
    r.error("geometry.builtin", "unknown geometry '" + name + "' (known: " + list + ")");
    return std::nullopt;
  }
  const auto param = r.positive(g, "geometry", "parameter", 1.0);
  if (!param) return std::nullopt;
  int dim = 4;
  if (root.contains("chart") && root["chart"].is_object() && root["chart"].contains("dimension") &&
      root["chart"]["dimension"].is_number_integer()) {
    dim = std::clamp(root["chart"]["dimension"].get<int>(), 1, kMaxDimension);
  }
  return builtin_geometry(name, *param, dim);
}

void read_geometry(Reader& r, const json& root, Scenario& s, const std::optional<BuiltinGeometry>& builtin,
                   bool needs_geometry) {
  const json* g = r.object(root, "", "geometry", needs_geometry);
  if (!g) return;
  s.geometry_declared = true;
  r.check_keys(*g, "geometry", {"builtin", "parameter", "vielbein"});
  const bool has_b = g->contains("builtin");
  const bool has_v = g->contains("vielbein");
  if (has_b == has_v) {
    r.error("geometry", "give exactly one of 'builtin' or 'vielbein'");
    return;
  }
  if (!s.has_chart) {
    if (has_v) r.error("chart", "required by a custom vielbein");
    return;
  }
  if (has_b) {
    if (!builtin) return;
    if (builtin->vielbein.dimension() != s.n) {
      r.error("geometry.builtin", "'" + builtin->name + "' is " + std::to_string(builtin->vielbein.dimension()) +
                                      "-dimensional but chart.dimension is " + std::to_string(s.n));
      return;
    }
    if (g->contains("parameter") && (builtin->name == "flat" || builtin->name == "minkowski" ||
                                     builtin->name == "polar")) {
      r.error("geometry.parameter", "'" + builtin->name + "' takes no parameter");
    }
    s.builtin = builtin;
    if (builtin->name == "flat" || builtin->name == "minkowski") {
      // flat geometry follows the chart signature
      s.builtin = flat_geometry(s.n, s.eta);
      s.builtin->coordinates = s.coords;
    }
    s.vielbein = s.builtin->vielbein;
    s.metric = s.builtin->metric;
    s.has_geometry = true;
    return;
  }
  if (g->contains("parameter")) r.error("geometry.parameter", "only builtin geometries take a parameter");
  auto e = r.expressions((*g)["vielbein"], "geometry.vielbein", {s.n, s.n}, s.coords);
  if (!e) return;
  s.vielbein = {expression_field(s.n, {up(s.n, IndexKind::Frame), down(s.n)}, std::move(*e)), s.eta};
  s.metric = metric_from_vielbein(s.vielbein);
  s.has_geometry = true;
}

void read_gauge(Reader& r, const json& root, Scenario& s) {
  const int n = std::max(s.n, 1);
  s.sm = SMGaugeConfig::zero(n);
  s.higgs = HiggsField::zero(n);
  if (const json* g = r.object(root, "", "gauge", false)) {
    r.check_keys(*g, "gauge", {"couplings", "B", "W", "G"});
    const json empty = json::object();
    const json* c = r.object(*g, "gauge", "couplings", false);
    if (c) r.check_keys(*c, "gauge.couplings", {"g1", "g2", "g3"});
    const json& cc = c ? *c : empty;
    struct Field {
      const char* name;
      const char* coupling;
      int rows;
    };
    for (const Field f : {Field{"B", "g1", 0}, Field{"W", "g2", 3}, Field{"G", "g3", 8}}) {
      const bool present = g->contains(f.name);
      if (present && !cc.contains(f.coupling)) {
        r.error(std::string("gauge.couplings.") + f.coupling,
                std::string("required because gauge.") + f.name + " is present");
      }
      const auto k = r.positive(cc, "gauge.couplings", f.coupling, 1.0);
      if (k) {
        if (f.rows == 0) s.sm.couplings.g1 = *k;
        if (f.rows == 3) s.sm.couplings.g2 = *k;
        if (f.rows == 8) s.sm.couplings.g3 = *k;
      }
      if (!present) continue;
      if (!s.has_chart) {
        r.error("chart", std::string("required by gauge.") + f.name);
        continue;
      }
      const std::string path = std::string("gauge.") + f.name;
      std::vector<int> shape = f.rows ? std::vector<int>{f.rows, n} : std::vector<int>{n};
      auto e = r.expressions((*g)[f.name], path, shape, s.coords);
      if (!e) continue;
      std::vector<IndexSlot> slots;
      if (f.rows) slots.push_back(up(f.rows, IndexKind::Frame));
      slots.push_back(down(n));
      ChartField field = expression_field(n, slots, std::move(*e));
      if (f.rows == 0) s.sm.B = field;
      if (f.rows == 3) s.sm.W = field;
      if (f.rows == 8) s.sm.G = field;
    }
  }
  if (const json* h = r.object(root, "", "higgs", false)) {
    r.check_keys(*h, "higgs", {"H", "c", "alpha"});
    if (const auto c = r.number(*h, "higgs", "c", 0.0)) {
      s.higgs.c = *c;
      s.consts.c = *c;
    }
    if (const auto a = r.positive(*h, "higgs", "alpha", 1.0)) s.consts.alpha = *a;
    if (h->contains("H")) {
      if (!s.has_chart) {
        r.error("chart", "required by higgs.H");
      } else if (auto e = r.expressions((*h)["H"], "higgs.H", {4}, s.coords)) {
        s.higgs.H = expression_field(n, {up(4, IndexKind::Frame)}, std::move(*e));
      }
    }
  }
}

void read_triple(Reader& r, const json& root, Scenario& s) {
  const json* t = r.object(root, "", "finite_triple", false);
  if (!t) return;
  if (t->contains("builtin")) {
    const auto name = r.text(*t, "finite_triple", "builtin", std::nullopt);
    if (!name) return;
    if (*name == "two-point") {
      r.check_keys(*t, "finite_triple", {"builtin", "mass", "broken_grading"});
      const auto m = r.number(*t, "finite_triple", "mass", 1.0);
      const auto b = r.boolean(*t, "finite_triple", "broken_grading", false);
      if (m && b) s.triple = two_point_triple(*m, *b);
    } else if (*name == "lepton") {
      r.check_keys(*t, "finite_triple", {"builtin", "ke"});
      Eigen::MatrixXcd ke = Eigen::MatrixXcd::Identity(3, 3);
      if (t->contains("ke")) {
        const auto m = r.cmatrix((*t)["ke"], "finite_triple.ke", 3, 3);
        if (!m) return;
        ke = *m;
      }
      s.triple = lepton_triple(ke);
    } else {
      r.error("finite_triple.builtin", "unknown triple '" + *name + "' (known: two-point, lepton)");
    }
    return;
  }
  r.check_keys(*t, "finite_triple", {"name", "D", "generators", "grading", "K", "signs", "claims"});
  FiniteTriple ft;
  ft.name = r.text(*t, "finite_triple", "name", "custom").value_or("custom");
  const json* d = r.get(*t, "finite_triple", "D", true);
  if (!d) return;
  const auto D = r.cmatrix(*d, "finite_triple.D");
  if (!D) return;
  if (D->rows() != D->cols()) {
    r.error("finite_triple.D", "must be square");
    return;
  }
  const int m = static_cast<int>(D->rows());
  ft.D = *D;
  bool ok = true;
  if (const json* gens = r.array(*t, "finite_triple", "generators", true)) {
    if (gens->empty()) r.error("finite_triple.generators", "needs at least one generator");
    for (std::size_t i = 0; i < gens->size(); ++i) {
      const auto a = r.cmatrix((*gens)[i], index_path("finite_triple.generators", i), m, m);
      if (a)
        ft.generators.push_back(*a);
      else
        ok = false;
    }
  } else {
    ok = false;
  }
  for (const char* key : {"grading", "K"}) {
    if (!t->contains(key)) continue;
    const auto a = r.cmatrix((*t)[key], std::string("finite_triple.") + key, m, m);
    if (!a) {
      ok = false;
    } else if (std::string(key) == "grading") {
      ft.grading = *a;
    } else {
      ft.K = *a;
    }
  }
  if (const json* sg = r.array(*t, "finite_triple", "signs", false)) {
    if (sg->size() != 3 || !std::all_of(sg->begin(), sg->end(), [](const json& x) { return x == 1 || x == -1; })) {
      r.error("finite_triple.signs", "expected three entries of +1/-1");
      ok = false;
    } else {
      ft.signs = {(*sg)[0].get<int>(), (*sg)[1].get<int>(), (*sg)[2].get<int>()};
    }
  }
  if (const json* cl = r.array(*t, "finite_triple", "claims", false)) {
    for (std::size_t i = 0; i < cl->size(); ++i) {
      if ((*cl)[i] == "order-zero") {
        ft.claims_order_zero = true;
      } else if ((*cl)[i] == "first-order") {
        ft.claims_first_order = true;
      } else {
        r.error(index_path("finite_triple.claims", i), "expected \"order-zero\" or \"first-order\"");
        ok = false;
      }
    }
  }
  if (ok) s.triple = std::move(ft);
}

void read_cutoff_and_constants(Reader& r, const json& root, Scenario& s) {
  if (const json* c = r.object(root, "", "cutoff", false)) {
    r.check_keys(*c, "cutoff", {"builtin", "u", "f"});
    if (c->contains("builtin") == (c->contains("u") || c->contains("f"))) {
      r.error("cutoff", "give either 'builtin' or a table 'u', 'f'");
    } else if (c->contains("builtin")) {
      if (const auto name = r.text(*c, "cutoff", "builtin", std::nullopt)) {
        try {
          s.cutoff = CutoffFunction::builtin(*name);
        } catch (const Error& e) {
          r.error("cutoff.builtin", e.what());
        }
      }
    } else {
      const json* u = r.array(*c, "cutoff", "u", true);
      const json* f = r.array(*c, "cutoff", "f", true);
      if (u && f) {
        const auto vu = r.vector(*u, "cutoff.u", static_cast<int>(u->size()));
        const auto vf = r.vector(*f, "cutoff.f", static_cast<int>(f->size()));
        if (vu && vf) {
          try {
            s.cutoff = CutoffFunction::tabulated(std::vector<double>(vu->begin(), vu->end()),
                                                 std::vector<double>(vf->begin(), vf->end()));
          } catch (const Error& e) {
            r.error("cutoff", e.what());
          }
        }
      }
    }
  }
  const json* k = r.object(root, "", "constants", false);
  if (!k) return;
  r.check_keys(*k, "constants", {"NR", "NB", "NW", "NG", "NH", "lambda0", "lambda2", "moments", "spinor_multiplicity"});
  if (const auto v = r.positive(*k, "constants", "NR", 1.0)) s.reparam.NR = *v;
  if (const auto v = r.positive(*k, "constants", "NB", 1.0)) s.reparam.NB = *v;
  if (const auto v = r.positive(*k, "constants", "NW", 1.0)) s.reparam.NW = *v;
  if (const auto v = r.positive(*k, "constants", "NG", 1.0)) s.reparam.NG = *v;
  if (const auto v = r.positive(*k, "constants", "NH", 1.0)) s.reparam.NH = *v;
  if (const auto v = r.integer(*k, "constants", "spinor_multiplicity", 4, 1, 64)) s.consts.N = static_cast<int>(*v);
  if (const json* m = r.object(*k, "constants", "moments", false)) {
    r.check_keys(*m, "constants.moments", {"M4", "M2", "M0"});
    const auto m4 = r.number(*m, "constants.moments", "M4", std::nullopt);
    const auto m2 = r.number(*m, "constants.moments", "M2", std::nullopt);
    const auto m0 = r.number(*m, "constants.moments", "M0", std::nullopt);
    if (m4 && m2 && m0) s.moments_override = Moments{*m4, *m2, *m0, 0.0, 0.0};
  }
}

/// lambda0 and lambda2 may depend on the Higgs constants and the moments.
void read_derived_constants(Reader& r, const json& root, Scenario& s, const Moments& m) {
  if (!root.contains("constants") || !root["constants"].is_object()) return;
  const json& k = root["constants"];
  if (k.contains("lambda0")) {
    if (k["lambda0"] == "vacuum") {
      s.reparam.lambda0 = vacuum_lambda0(s.consts, s.reparam);
    } else if (const auto v = r.number(k["lambda0"], "constants.lambda0")) {
      s.reparam.lambda0 = *v;
    }
  }
  if (k.contains("lambda2")) {
    if (k["lambda2"] == "unification") {
      if (s.higgs.c == 0.0 || !(m.M2 > 0.0)) {
        r.error("constants.lambda2", "\"unification\" needs higgs.c != 0 and a positive M2 moment");
      } else {
        s.lambda2 = unification_scale(m.M2, s.higgs.c);
      }
    } else if (const auto v = r.number(k["lambda2"], "constants.lambda2")) {
      if (*v > 0.0)
        s.lambda2 = *v;
      else
        r.error("constants.lambda2", "must be positive");
    }
  }
}

void read_task(Reader& r, const json& t, const std::string& path, Scenario& s) {
  TaskSpec spec;
  const auto type = r.text(t, path, "type", std::nullopt);
  if (!type) return;
  if (std::find(kTaskTypes.begin(), kTaskTypes.end(), *type) == kTaskTypes.end()) {
    std::string list;
    for (const auto& x : kTaskTypes) list += (list.empty() ? "" : ", ") + x;
    r.error(path + ".type", "unknown task '" + *type + "' (known: " + list + ")");
    return;
  }
  spec.type = *type;
  // A declared but invalid geometry is already reported; keep checking the task against the chart.
  auto need_geometry = [&] {
    if (!s.has_geometry && !s.geometry_declared) r.error(path, "task '" + *type + "' requires a chart and a geometry");
    return s.has_chart;
  };
  auto points = [&](bool required) {
    const json* p = r.array(t, path, "points", required);
    if (!p) return;
    if (p->empty()) r.error(path + ".points", "needs at least one point");
    for (std::size_t i = 0; i < p->size(); ++i) {
      if (auto v = r.vector((*p)[i], index_path(path + ".points", i), s.n)) spec.points.push_back(*v);
    }
  };
  auto tolerance = [&](double fallback) {
    if (const auto v = r.positive(t, path, "tolerance", fallback)) spec.tolerance = *v;
  };

  if (spec.type == "curvature") {
    r.check_keys(t, path, {"type", "points", "expect_scalar", "expect_kretschmann", "expect_riemann_zero",
                           "expect_ricci_zero", "tolerance"});
    if (!need_geometry()) return;
    points(true);
    tolerance(1e-8);
    if (t.contains("expect_scalar")) spec.expect_scalar = r.expression(t["expect_scalar"], path + ".expect_scalar", s.coords);
    if (t.contains("expect_kretschmann")) {
      spec.expect_kretschmann = r.expression(t["expect_kretschmann"], path + ".expect_kretschmann", s.coords);
    }
    spec.expect_riemann_zero = r.boolean(t, path, "expect_riemann_zero", false).value_or(false);
    spec.expect_ricci_zero = r.boolean(t, path, "expect_ricci_zero", false).value_or(false);
  } else if (spec.type == "geodesic") {
    r.check_keys(t, path, {"type", "x0", "v0", "dtau", "steps", "record_every", "tolerance", "frequency"});
    if (!need_geometry()) return;
    tolerance(1e-8);
    if (const json* x = r.get(t, path, "x0", true)) spec.x0 = r.vector(*x, path + ".x0", s.n).value_or(Point());
    if (const json* v = r.get(t, path, "v0", true)) spec.v0 = r.vector(*v, path + ".v0", s.n).value_or(Point());
    spec.dtau = r.positive(t, path, "dtau", std::nullopt).value_or(0.0);
    spec.steps = static_cast<int>(r.integer(t, path, "steps", std::nullopt, 1, 10000000).value_or(1));
    spec.record_every = static_cast<int>(
        r.integer(t, path, "record_every", std::max(1, spec.steps / 100), 1, 10000000).value_or(1));
    if (const json* f = r.object(t, path, "frequency", false)) {
      const std::string fp = path + ".frequency";
      r.check_keys(*f, fp, {"time", "angle", "expect", "tolerance"});
      const auto ti = r.integer(*f, fp, "time", std::nullopt, 0, s.n - 1);
      const auto an = r.integer(*f, fp, "angle", std::nullopt, 0, s.n - 1);
      const auto ex = r.number(*f, fp, "expect", std::nullopt);
      const auto tol = r.positive(*f, fp, "tolerance", 1e-4);
      if (ti && an && ex && tol) spec.frequency = FrequencyCheck{static_cast<int>(*ti), static_cast<int>(*an), *ex, *tol};
    }
  } else if (spec.type == "action") {
    r.check_keys(t, path, {"type", "E", "expect_total", "tolerance", "max_error"});
    if (!need_geometry()) return;
    tolerance(1e-10);
    spec.max_error = r.positive(t, path, "max_error", 1e-2).value_or(1e-2);
    if (t.contains("E")) spec.E = r.expression(t["E"], path + ".E", s.coords);
    if (t.contains("expect_total")) spec.expect_total = r.number(t["expect_total"], path + ".expect_total");
  } else if (spec.type == "field-equations") {
    r.check_keys(t, path, {"type", "form", "points", "T", "fd_step", "tolerance"});
    if (!need_geometry()) return;
    points(true);
    tolerance(1e-6);
    spec.form = r.text(t, path, "form", "universal").value_or("universal");
    if (spec.form != "universal" && spec.form != "standard-model") {
      r.error(path + ".form", "expected \"universal\" or \"standard-model\"");
    }
    if (spec.form == "universal" && s.n % 2 != 0) r.error(path + ".form", "the universal form needs an even dimension");
    if (t.contains("T")) spec.T = r.expressions(t["T"], path + ".T", {s.n, s.n}, s.coords);
    spec.fd_step = r.positive(t, path, "fd_step", 1e-4).value_or(1e-4);
  } else if (spec.type == "axioms") {
    r.check_keys(t, path, {"type", "fluctuation", "tolerance"});
    if (!s.triple) r.error(path, "task 'axioms' requires finite_triple");
    tolerance(1e-12);
    spec.fluctuation = r.boolean(t, path, "fluctuation", false).value_or(false);
  } else if (spec.type == "limit-check") {
    r.check_keys(t, path, {"type", "tolerance", "max_error"});
    if (!need_geometry()) return;
    if (!s.builtin && s.has_geometry) r.error(path, "task 'limit-check' requires a builtin geometry");
    tolerance(1e-8);
    spec.max_error = r.positive(t, path, "max_error", 1e-2).value_or(1e-2);
  } else if (spec.type == "trace-oracle") {
    r.check_keys(t, path, {"type", "samples", "tolerance"});
    tolerance(1e-10);
    spec.samples = static_cast<int>(r.integer(t, path, "samples", 8, 2, 10000).value_or(8));
  }
  s.tasks.push_back(std::move(spec));
}

struct Built {
  Scenario scenario;
  Moments moments;
};

Built build(const json& root, std::vector<Diagnostic>& diags) {
  Reader r;
  Built out;
  Scenario& s = out.scenario;
  if (!root.is_object()) {
    diags.push_back({"", "the configuration must be a JSON object"});
    return out;
  }
  r.check_keys(root, "", {"schema", "name", "seed", "parameters", "chart", "geometry", "gauge", "higgs",
                          "finite_triple", "cutoff", "constants", "tasks"});
  if (const auto schema = r.text(root, "", "schema", std::nullopt); schema && *schema != kConfigSchema) {
    r.error("schema", "expected \"" + std::string(kConfigSchema) + "\", got \"" + *schema + "\"");
  }
  s.name = r.text(root, "", "name", "unnamed").value_or("unnamed");
  if (const json* seed = r.get(root, "", "seed", false)) {
    if (seed->is_number_unsigned())
      s.seed = seed->get<std::uint64_t>();
    else
      r.error("seed", "expected a non-negative integer");
  }
  if (const json* p = r.object(root, "", "parameters", false)) {
    for (auto it = p->begin(); it != p->end(); ++it) {
      if (const auto v = r.number(it.value(), key_path("parameters", it.key()))) r.params[it.key()] = *v;
    }
  }

  std::set<std::string> types;
  const json* tasks = r.array(root, "", "tasks", true);
  if (tasks) {
    if (tasks->empty()) r.error("tasks", "needs at least one task");
    for (const auto& t : *tasks)
      if (t.is_object() && t.contains("type") && t["type"].is_string()) types.insert(t["type"].get<std::string>());
  }
  const bool needs_box = types.count("action") || types.count("limit-check");
  const bool needs_geometry = types.count("curvature") || types.count("geodesic") || types.count("action") ||
                              types.count("field-equations") || types.count("limit-check");

  const auto builtin = peek_builtin(r, root);
  read_chart(r, root, s, builtin, needs_box);
  if (!s.has_chart && needs_geometry) r.error("chart", "required by the requested tasks");
  read_geometry(r, root, s, builtin, needs_geometry);
  read_gauge(r, root, s);
  read_triple(r, root, s);
  read_cutoff_and_constants(r, root, s);
  try {
    out.moments = s.moments_override ? *s.moments_override : moments(s.cutoff);
  } catch (const Error& e) {
    r.error("cutoff", e.what());
  }
  read_derived_constants(r, root, s, out.moments);

  if (s.has_geometry) {
    try {
      assemble_connection(s.vielbein, {}, s.sm, s.higgs, s.consts);
    } catch (const Error& e) {
      r.error("gauge", e.what());
    }
  }
  if (tasks) {
    for (std::size_t i = 0; i < tasks->size(); ++i) {
      const std::string path = index_path("tasks", i);
      if (!(*tasks)[i].is_object()) {
        r.error(path, "expected an object");
        continue;
      }
      read_task(r, (*tasks)[i], path, s);
    }
  }
  diags = std::move(r.diags);
  return out;
}

// ---------------------------------------------------------------------------
// Tasks

class Table {
 public:
  explicit Table(const std::vector<std::string>& header) { line(header); }
  void row(const std::vector<std::string>& cells) { line(cells); }
  std::string str() const { return out_; }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ += (i ? "," : "") + cells[i];
    out_ += "\n";
  }
  std::string out_;
};

OracleCheck at_most(std::string name, double value, double tolerance) {
  return {std::move(name), value, 0.0, tolerance, value <= tolerance};
}

OracleCheck near(std::string name, double value, double reference, double tolerance, bool relative) {
  const double scale = relative ? std::max(1.0, std::abs(reference)) : 1.0;
  return {std::move(name), value, reference, tolerance, std::abs(value - reference) <= tolerance * scale};
}

std::string point_label(const Point& p) {
  std::string s;
  for (Eigen::Index i = 0; i < p.size(); ++i) s += (i ? " " : "") + short_fmt(p[i]);
  return "(" + s + ")";
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Region region_of(const Scenario& s) { return {*s.box, s.grid}; }

ConnectionForm connection_of(const Scenario& s) { return assemble_connection(s.vielbein, {}, s.sm, s.higgs, s.consts); }

void run_curvature(const Scenario& s, const TaskSpec& t, TaskReport& rep) {
  std::vector<std::string> header{"point"};
  for (const auto& c : s.coords) header.push_back(c);
  for (const char* h : {"ricci_scalar", "ricci_max_abs", "riemann_max_abs", "kretschmann"}) header.push_back(h);
  if (t.expect_scalar) header.push_back("expected_scalar");
  if (t.expect_kretschmann) header.push_back("expected_kretschmann");
  Table table(header);
  std::ostringstream text;
  double scalar_err = 0.0, kretsch_err = 0.0, ricci_max = 0.0, riemann_max = 0.0;
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const Point& p = t.points[i];
    const MetricJet mj = metric_jet(s.metric, p, 2);
    const CurvatureTensors ct = curvature_from_jet(mj);
    const double k = kretschmann(lower_riemann(ct.riemann, mj.g), mj.ginv);
    const double rmax = max_abs(ct.ricci.data());
    const double rimax = max_abs(ct.riemann.data());
    ricci_max = std::max(ricci_max, rmax);
    riemann_max = std::max(riemann_max, rimax);
    std::vector<std::string> row{std::to_string(i)};
    for (Eigen::Index a = 0; a < p.size(); ++a) row.push_back(fmt(p[a]));
    for (double v : {ct.scalar, rmax, rimax, k}) row.push_back(fmt(v));
    text << "  " << point_label(p) << "  R = " << short_fmt(ct.scalar) << "  K = " << short_fmt(k);
    const std::span<const double> x(p.data(), static_cast<std::size_t>(p.size()));
    if (t.expect_scalar) {
      const double e = (*t.expect_scalar)(x);
      scalar_err = std::max(scalar_err, std::abs(ct.scalar - e) / std::max(1.0, std::abs(e)));
      row.push_back(fmt(e));
      text << "  expected R = " << short_fmt(e);
    }
    if (t.expect_kretschmann) {
      const double e = (*t.expect_kretschmann)(x);
      kretsch_err = std::max(kretsch_err, std::abs(k - e) / std::max(1.0, std::abs(e)));
      row.push_back(fmt(e));
    }
    text << "\n";
    table.row(row);
  }
  rep.text = text.str();
  rep.csv = table.str();
  if (t.expect_scalar) rep.checks.push_back(at_most("ricci scalar vs expected (rel)", scalar_err, t.tolerance));
  if (t.expect_kretschmann) rep.checks.push_back(at_most("kretschmann vs expected (rel)", kretsch_err, t.tolerance));
  if (t.expect_ricci_zero) rep.checks.push_back(at_most("max |Ric|", ricci_max, t.tolerance));
  if (t.expect_riemann_zero) rep.checks.push_back(at_most("max |Riemann|", riemann_max, t.tolerance));
}

void run_geodesic(const Scenario& s, const TaskSpec& t, TaskReport& rep) {
  const GeodesicResult g = geodesic_integrate(s.metric, {t.x0, t.v0, 0.0}, t.dtau, t.steps, t.record_every);
  std::vector<std::string> header{"tau"};
  for (const auto& c : s.coords) header.push_back(c);
  for (const auto& c : s.coords) header.push_back("d" + c);
  header.push_back("norm");
  Table table(header);
  for (const auto& st : g.trajectory) {
    std::vector<std::string> row{fmt(st.tau)};
    for (Eigen::Index a = 0; a < st.x.size(); ++a) row.push_back(fmt(st.x[a]));
    for (Eigen::Index a = 0; a < st.v.size(); ++a) row.push_back(fmt(st.v[a]));
    row.push_back(fmt(geodesic_norm(s.metric, st.x, st.v)));
    table.row(row);
  }
  rep.csv = table.str();
  const double norm0 = geodesic_norm(s.metric, t.x0, t.v0);
  std::ostringstream text;
  text << "  steps " << t.steps << ", dtau " << short_fmt(t.dtau) << ", norm " << short_fmt(norm0)
       << ", max norm drift " << short_fmt(g.max_norm_drift) << "\n";
  if (!g.completed) text << "  stopped early: " << g.error << "\n";
  rep.checks.push_back({"integration completed", g.completed ? 1.0 : 0.0, 1.0, 0.0, g.completed});
  rep.checks.push_back(at_most("norm drift (rel)", g.max_norm_drift / std::max(1.0, std::abs(norm0)), t.tolerance));
  if (t.frequency && g.trajectory.size() >= 2) {
    const auto& a = g.trajectory.front();
    const auto& b = g.trajectory.back();
    const double dt = b.x[t.frequency->time] - a.x[t.frequency->time];
    const double omega = (b.x[t.frequency->angle] - a.x[t.frequency->angle]) / dt;
    text << "  mean angular frequency " << fmt(omega) << " (expected " << fmt(t.frequency->expect) << ")\n";
    rep.checks.push_back(near("angular frequency (rel)", omega, t.frequency->expect,
                              t.frequency->tolerance * std::abs(t.frequency->expect), false));
  }
  rep.text = text.str();
}

void run_action(const Scenario& s, const Moments& m, const TaskSpec& t, TaskReport& rep) {
  HeatKernelInput in{connection_of(s), std::nullopt, s.reparam};
  if (t.E) in.E = expression_field(s.n, {}, {*t.E});
  const HeatKernelCoefficients c = heat_kernel_coefficients(in, region_of(s));
  const ActionReport a = spectral_action(m, c, s.lambda2);
  rep.csv = action_csv(a);
  std::ostringstream text;
  text << action_text(a);
  text << "  a0 = " << fmt(c.a0) << "  a2 = " << fmt(c.a2) << "  a4 = " << fmt(c.a4) << "\n";
  if (s.n % 2 == 0) {
    const UniversalForm u = universal_action_form(m, c, s.lambda2, sigma_squared(s.eta));
    text << "  universal form: tau0 = " << fmt(u.tau0) << "  kappa0 = " << fmt(u.kappa0)
         << "  sigma^2 = " << fmt(u.sigma2) << "\n";
    text << "  compact total (folded) = " << fmt(u.compact_total) << "  + a2 term " << fmt(u.a2_term) << "\n";
    text << "  literal R.R total = " << fmt(u.literal_total) << "\n";
    rep.checks.push_back(near("compact form + a2 term equals total (rel)", u.compact_total + u.a2_term, a.total,
                              1e-12, true));
  }
  rep.text = text.str();
  rep.checks.push_back(at_most("quadrature error estimate (rel)", a.total_error / std::max(1e-300, std::abs(a.total)),
                               t.max_error));
  if (t.expect_total) rep.checks.push_back(near("total vs expected (rel)", a.total, *t.expect_total, t.tolerance, true));
}

void run_field_equations(const Scenario& s, const Moments& m, const TaskSpec& t, TaskReport& rep) {
  const ConnectionForm a = connection_of(s);
  std::optional<ChartField> T;
  if (t.T) T = expression_field(s.n, {down(s.n), down(s.n)}, *t.T);
  Table table({"point", "mu", "nu", "lhs", "rhs", "residual", "variation", "fd_variation"});
  std::ostringstream text;
  double worst_fd = 0.0, worst_sym = 0.0;
  std::optional<UniversalConstants> uk;
  std::optional<NormalizedSM> sm;
  if (t.form == "universal") {
    uk = universal_constants(m.M4, m.M0, s.lambda2, sigma_squared(s.eta));
    text << "  tau0 = " << fmt(uk->tau0) << "  kappa0 = " << fmt(uk->kappa0) << "\n";
  } else {
    sm = normalize_sm(m.M0, m.M4 * s.lambda2 * s.lambda2, s.sm.couplings, s.consts, s.reparam.NR, s.reparam.NH,
                      s.reparam.lambda0);
    text << "  alpha0 = " << fmt(sm->alpha0) << "  mu0 = " << fmt(sm->mu0) << "  delta0 = " << fmt(sm->delta0) << "\n";
  }
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const Point& p = t.points[i];
    const FieldEquationResidual r =
        uk ? universal_field_equation(a, p, *uk, T, t.fd_step) : sm_field_equation(a, p, *sm, T, t.fd_step);
    for (int mu = 0; mu < s.n; ++mu)
      for (int nu = 0; nu < s.n; ++nu)
        table.row({std::to_string(i), std::to_string(mu), std::to_string(nu), fmt(r.lhs(mu, nu)), fmt(r.rhs(mu, nu)),
                   fmt(r.residual(mu, nu)), fmt(r.variation(mu, nu)), fmt(r.fd_variation(mu, nu))});
    worst_fd = std::max(worst_fd, r.fd_deviation);
    worst_sym = std::max(worst_sym, r.symmetry_residual);
    text << "  " << point_label(p) << "  max |residual| = " << short_fmt(r.residual.cwiseAbs().maxCoeff())
         << "  variation vs FD = " << short_fmt(r.fd_deviation);
    if (uk) {
      text << "  variational-form residual = " << short_fmt(r.variational_residual.cwiseAbs().maxCoeff())
           << "  displayed-trace-sign vs FD = " << short_fmt(r.displayed_fd_deviation);
    }
    text << "\n";
    if (i == 0) text << "  (" << r.note << ")\n";
  }
  rep.text = text.str();
  rep.csv = table.str();
  rep.checks.push_back(at_most("variation vs finite differences", worst_fd, t.tolerance));
  rep.checks.push_back(at_most("residual symmetry", worst_sym, 1e-9));
}

void run_axioms(const Scenario& s, const TaskSpec& t, TaskReport& rep) {
  const FiniteTriple& ft = *s.triple;
  const AxiomReport ax = check_axioms(ft, t.tolerance);
  Table table({"axiom", "claimed", "passed", "residual"});
  std::ostringstream text;
  text << "  triple '" << ft.name << "', dimension " << ft.dim() << ", commutator bound "
       << short_fmt(ax.commutator_bound) << "\n";
  for (const auto& a : ax.results) {
    table.row({a.name, a.claimed ? "1" : "0", a.passed ? "1" : "0", fmt(a.residual)});
    text << "  " << (a.passed ? "holds " : "fails ") << a.name << (a.claimed ? " (claimed)" : "") << "  residual "
         << short_fmt(a.residual) << "\n";
    if (a.claimed) rep.checks.push_back({"claimed: " + a.name, a.residual, 0.0, t.tolerance, a.passed});
  }
  if (t.fluctuation) {
    const OneFormSpan span = one_form_span(ft);
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(ft.dim(), ft.dim());
    for (const auto& b : span.basis) A += std::complex<double>(u(rng), u(rng)) * b;
    text << "  one-form span rank " << span.rank << ", closure residual " << short_fmt(span.closure_residual) << "\n";
    table.row({"one-form span rank", "0", "1", std::to_string(span.rank)});
    table.row({"one-form closure", "0", span.closure_residual <= 1e-10 ? "1" : "0", fmt(span.closure_residual)});
    rep.checks.push_back(at_most("one-form closure under the algebra", span.closure_residual, 1e-10));
    if (ft.K) {
      const FluctuatedTriple f = fluctuate(ft, A);
      text << "  fluctuated D': hermiticity " << short_fmt(f.hermiticity_residual) << ", first order "
           << short_fmt(f.first_order_residual) << "\n";
      table.row({"fluctuation hermiticity", "0", f.hermiticity_residual <= 1e-10 ? "1" : "0",
                 fmt(f.hermiticity_residual)});
      table.row({"fluctuation first order", "0", f.first_order_residual <= 1e-10 ? "1" : "0",
                 fmt(f.first_order_residual)});
      rep.checks.push_back(at_most("fluctuated D' hermitian", f.hermiticity_residual, 1e-10));
      if (ft.claims_first_order) rep.checks.push_back(at_most("fluctuated D' first order", f.first_order_residual, 1e-10));
    }
  }
  rep.text = text.str();
  rep.csv = table.str();
}

void run_limit_check(const Scenario& s, const Moments& m, const TaskSpec& t, TaskReport& rep) {
  LimitInput in{*s.builtin, std::nullopt, s.sm, s.higgs, s.consts, s.reparam};
  const Region region = region_of(s);
  const LimitChecks c = riemannian_limit_checks(in, region);
  const ActionReport a = riemannian_limit_action(in, region, m, s.lambda2);
  std::ostringstream text;
  text << "  " << c.points << " points: |gamma - g| " << short_fmt(c.metric_residual) << ", |Rhat - R| "
       << short_fmt(c.riemann_residual) << ", frame curvature " << short_fmt(c.frame_residual) << "\n";
  text << action_text(a);
  rep.text = text.str();
  rep.csv = action_csv(a);
  rep.checks.push_back(at_most("generalized metric equals g", c.metric_residual, 1e-12));
  rep.checks.push_back(at_most("Riemann tensors agree", c.riemann_residual, t.tolerance));
  rep.checks.push_back(at_most("quadrature error estimate (rel)", a.total_error / std::max(1e-300, std::abs(a.total)),
                               t.max_error));
}

struct Waves {
  int n = 0, comps = 0;
  std::vector<double> amp, k, phase;

  Waves(int n_, int comps_, std::mt19937_64& rng) : n(n_), comps(comps_) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int c = 0; c < comps; ++c) {
      amp.push_back(u(rng));
      phase.push_back(3.0 * u(rng));
      for (int m = 0; m < n; ++m) k.push_back(u(rng));
    }
  }

  template <typename S>
  void operator()(std::span<const S> x, std::span<S> out) const {
    using std::sin;
    for (int c = 0; c < comps; ++c) {
      S arg(phase[static_cast<std::size_t>(c)]);
      for (int m = 0; m < n; ++m) arg += k[static_cast<std::size_t>(c * n + m)] * x[static_cast<std::size_t>(m)];
      out[static_cast<std::size_t>(c)] = amp[static_cast<std::size_t>(c)] * sin(arg);
    }
  }
};

void run_trace_oracle(const Scenario& s, const TaskSpec& t, TaskReport& rep) {
  const int n = s.has_chart ? s.n : 4;
  const Couplings g = s.sm.couplings;
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SectorTraces> samples;
  double q_err = 0.0, l_err = 0.0, trace_max = 0.0;
  const Eigen::MatrixXd ginv = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < t.samples; ++i) {
    SMGaugeConfig sm = SMGaugeConfig::zero(n, g);
    sm.B = ChartField::generic(n, {down(n)}, Waves(n, n, rng));
    sm.W = ChartField::generic(n, {up(3, IndexKind::Frame), down(n)}, Waves(n, 3 * n, rng));
    sm.G = ChartField::generic(n, {up(8, IndexKind::Frame), down(n)}, Waves(n, 8 * n, rng));
    Point p(n);
    for (int a = 0; a < n; ++a) p[a] = u(rng);
    const SMFieldStrengths f = sm_field_strengths(sm, p);
    const SectorTraces tr = sector_traces(f, ginv);
    const double scale = std::max(1.0, std::abs(tr.q));
    q_err = std::max(q_err, std::abs(tr.q - 0.25 * g.g2 * g.g2 * tr.w_matrix) / scale);
    l_err = std::max(l_err, std::abs(tr.lambda + 0.25 * g.g1 * g.g1 * tr.BB) / std::max(1.0, std::abs(tr.lambda)));
    for (const auto& am : f.block.a) trace_max = std::max(trace_max, std::abs(am.trace()));
    samples.push_back(tr);
  }
  const VSectorFit fit = fit_v_sector(samples);
  const double stated_kG = -0.25 * g.g3 * g.g3;
  const double stated_kB = -g.g1 * g.g1 / 12.0;
  auto agree = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };

  Table table({"quantity", "stated", "oracle", "agree"});
  table.row({"Tr(Q.Q) / Tr(W.W)", fmt(0.25 * g.g2 * g.g2), fmt(0.25 * g.g2 * g.g2), q_err <= t.tolerance ? "1" : "0"});
  table.row({"Tr(Lambda.Lambda) / B.B", fmt(-0.25 * g.g1 * g.g1), fmt(-0.25 * g.g1 * g.g1), l_err <= t.tolerance ? "1" : "0"});
  table.row({"Tr(V.V): G.G coefficient", fmt(stated_kG), fmt(fit.kG), agree(stated_kG, fit.kG) ? "1" : "0"});
  table.row({"Tr(V.V): B.B coefficient", fmt(stated_kB), fmt(fit.kB), agree(stated_kB, fit.kB) ? "1" : "0"});
  table.row({"max |Tr A_mu|", "0", fmt(trace_max), trace_max <= t.tolerance ? "1" : "0"});
  rep.csv = table.str();

  std::ostringstream text;
  text << "  couplings g1 = " << short_fmt(g.g1) << ", g2 = " << short_fmt(g.g2) << ", g3 = " << short_fmt(g.g3)
       << "; " << t.samples << " random samples (seed " << s.seed << ")\n";
  text << "  Tr(Q.Q) = (g2^2/4) Tr(W.W): max rel deviation " << short_fmt(q_err) << "\n";
  text << "  Tr(V.V) = kG G.G + kB B.B\n";
  text << "    stated   kG = -g3^2/4  = " << fmt(stated_kG) << "   kB = -g1^2/12 = " << fmt(stated_kB) << "\n";
  text << "    oracle   kG = " << fmt(fit.kG) << "   kB = " << fmt(fit.kB) << "   (fit residual "
       << short_fmt(fit.residual) << ")\n";
  if (!agree(stated_kG, fit.kG)) {
    text << "    the stated G.G coefficient disagrees with the brute-force trace; the trace value is -g3^2/2\n";
  }
  text << "  unimodularity: max |Tr A_mu| = " << short_fmt(trace_max) << "\n";
  rep.text = text.str();
  rep.checks.push_back(at_most("Tr(Q.Q) identity (rel)", q_err, t.tolerance));
  rep.checks.push_back(at_most("Tr(Lambda.Lambda) identity (rel)", l_err, t.tolerance));
  rep.checks.push_back(at_most("V-sector fit residual", fit.residual, t.tolerance));
  rep.checks.push_back(at_most("gauge block traceless", trace_max, t.tolerance));
}

// ---------------------------------------------------------------------------
// Builtin scenarios

const char* kFlatEmpty = R"json({
  "schema": "geodyn-config-v1",
  "name": "flat-empty",
  "chart": {"dimension": 4, "box": {"lo": [0, 0, 0, 0], "hi": [1, 1, 1, 1]}, "grid": 3},
  "geometry": {"builtin": "flat"},
  "tasks": [
    {"type": "curvature", "points": [[0.1, 0.2, 0.3, 0.4], [0.5, 0.5, 0.5, 0.5]],
     "expect_scalar": "0", "expect_riemann_zero": true, "tolerance": 1e-14},
    {"type": "action", "expect_total": "1/(16*pi^2)", "tolerance": 1e-12}
  ]
})json";

const char* kSphere2 = R"json({
  "schema": "geodyn-config-v1",
  "name": "sphere2",
  "parameters": {"r0": 1.5},
  "chart": {"dimension": 2, "box": {"lo": [0.3, 0], "hi": [2.8, "2*pi"], "periodic": [false, true]}, "grid": 9},
  "geometry": {"builtin": "sphere2", "parameter": "r0"},
  "tasks": [
    {"type": "curvature", "points": [[0.5, 0], [1, 1], ["pi/2", 2], [2.5, 4]],
     "expect_scalar": "2/r0^2", "expect_kretschmann": "4/r0^4", "tolerance": 1e-10},
    {"type": "geodesic", "x0": ["pi/2", 0], "v0": [0.3, "1/r0"], "dtau": 0.01, "steps": 2000, "record_every": 20,
     "tolerance": 1e-9}
  ]
})json";

const char* kSchwarzschild = R"json({
  "schema": "geodyn-config-v1",
  "name": "schwarzschild-orbit",
  "parameters": {"m": 1, "r0": 6},
  "chart": {"dimension": 4},
  "geometry": {"builtin": "schwarzschild", "parameter": "m"},
  "tasks": [
    {"type": "curvature", "points": [[0, 6, 1.2, 0.3], [0, 10, "pi/2", 1], [0, 3, 0.7, 2]],
     "expect_scalar": "0", "expect_ricci_zero": true, "expect_kretschmann": "48*m^2/r^6", "tolerance": 1e-10},
    {"type": "geodesic", "x0": [0, "r0", "pi/2", 0],
     "v0": ["1/sqrt(1-3*m/r0)", 0, 0, "sqrt(m/r0^3)/sqrt(1-3*m/r0)"],
     "dtau": 0.01, "steps": 10000, "record_every": 100, "tolerance": 1e-8,
     "frequency": {"time": 0, "angle": 3, "expect": "sqrt(m/r0^3)", "tolerance": 1e-4}}
  ]
})json";

const char* kSmTraceCheck = R"json({
  "schema": "geodyn-config-v1",
  "name": "sm-trace-check",
  "seed": 7,
  "gauge": {"couplings": {"g1": 0.36, "g2": 0.65, "g3": 1.2}},
  "tasks": [{"type": "trace-oracle", "samples": 8}]
})json";

const char* kTwoPoint = R"json({
  "schema": "geodyn-config-v1",
  "name": "two-point",
  "seed": 3,
  "finite_triple": {"builtin": "two-point", "mass": 0.8},
  "tasks": [{"type": "axioms", "fluctuation": true}]
})json";

const char* kLepton = R"json({
  "schema": "geodyn-config-v1",
  "name": "lepton",
  "seed": 5,
  "finite_triple": {"builtin": "lepton",
                    "ke": [[0.3, [0.1, 0.2], 0], [[0.1, 0.2], 0.5, 0.05], [0, 0.05, 0.9]]},
  "tasks": [{"type": "axioms", "fluctuation": true}]
})json";

const char* kRiemannianLimit = R"json({
  "schema": "geodyn-config-v1",
  "name": "riemannian-limit",
  "chart": {"dimension": 4,
            "box": {"lo": [0.4, 0, 0, 0], "hi": [2.7, "2*pi", 1, 1], "periodic": [false, true, false, false]},
            "grid": 5},
  "geometry": {"builtin": "sphere2-flat"},
  "gauge": {"couplings": {"g1": 0.4},
            "B": ["0", "0.3*sin(theta)", "0.2*z", "0"]},
  "higgs": {"c": 0.5, "H": ["0.3*cos(theta)", "0", "0.1*w", "0"]},
  "tasks": [{"type": "limit-check"}, {"type": "action"}]
})json";

const char* kFieldEquations = R"json({
  "schema": "geodyn-config-v1",
  "name": "field-equations",
  "parameters": {"a": 0.15},
  "chart": {"dimension": 4, "signature": "lorentzian", "coordinates": ["t", "x", "y", "z"]},
  "geometry": {"vielbein": [["1 + a*sin(x)", "0", "a*cos(y)*0.3", "0"],
                            ["0", "1 + a*x*y", "0", "0"],
                            ["0", "a*sin(t)", "1", "0"],
                            ["0", "0", "0", "exp(a*t*z)"]]},
  "gauge": {"couplings": {"g1": 0.36, "g2": 0.65, "g3": 1.2},
            "B": ["0.2*sin(y)", "0", "0.1*t", "0"],
            "W": [["0", "0.3*z", "0", "0"], ["0", "0", "0", "0.1*x"], ["0.2*y", "0", "0", "0"]]},
  "higgs": {"c": 0.4, "H": ["0.3 + 0.1*x", "0", "0.05*t", "0"]},
  "tasks": [
    {"type": "field-equations", "form": "universal", "points": [[0.1, 0.2, -0.3, 0.4], [0.5, -0.1, 0.2, 0.3]]},
    {"type": "field-equations", "form": "standard-model", "points": [[0.1, 0.2, -0.3, 0.4]]}
  ]
})json";

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> list = {
      {"flat-empty", "flat 4D chart with no fields: zero curvature and an action made of the constant term only",
       kFlatEmpty},
      {"sphere2", "2-sphere of radius 1.5: Ricci scalar 2/r^2 at sample points and a conserved geodesic", kSphere2},
      {"schwarzschild-orbit", "Schwarzschild exterior: Ricci-flatness, Kretschmann scalar and a circular orbit",
       kSchwarzschild},
      {"sm-trace-check", "gauge-sector matrix traces against brute-force oracles", kSmTraceCheck},
      {"two-point", "two-point finite triple: axioms and inner fluctuations", kTwoPoint},
      {"lepton", "lepton-sector finite triple: axioms and inner fluctuations", kLepton},
      {"riemannian-limit", "sphere x plane with matter: Riemannian limit identities and the limit action",
       kRiemannianLimit},
      {"field-equations", "curved Lorentzian chart with gauge and Higgs fields: field-equation residuals",
       kFieldEquations},
  };
  return list;
}

json parse_config(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
    if (const auto pos = msg.find(": "); pos != std::string::npos && msg.rfind("syntax error", 0) == 0) {
      msg = msg.substr(pos + 2);
    }
    throw ConfigError({{"line " + std::to_string(line) + ", column " + std::to_string(col), msg}});
  }
}

json load_config(const std::string& source) {
  std::string name = source;
  const bool forced = source.rfind("builtin:", 0) == 0;
  if (forced) name = source.substr(8);
  if (forced || !std::filesystem::exists(source)) {
    for (const auto& b : builtin_scenarios())
      if (b.name == name) return parse_config(b.json);
    if (forced) throw ConfigError({{source, "unknown builtin scenario"}});
    throw ConfigError({{source, "no such file or builtin scenario"}});
  }
  std::ifstream in(source, std::ios::binary);
  if (!in) throw ConfigError({{source, "cannot read file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<Diagnostic> validate_config(const json& config) {
  std::vector<Diagnostic> diags;
  build(config, diags);
  return diags;
}

RunReport run_scenario(const json& config, const RunOptions& options) {
  json effective = config;
  if (options.grid) {
    if (!effective.contains("chart") || !effective["chart"].is_object()) effective["chart"] = json::object();
    effective["chart"]["grid"] = *options.grid;
  }
  if (options.seed) effective["seed"] = *options.seed;
  std::vector<Diagnostic> diags;
  const Built b = build(effective, diags);
  if (!diags.empty()) throw ConfigError(std::move(diags));
  const Scenario& s = b.scenario;

  RunReport report;
  report.scenario = s.name;
  report.seed = s.seed;
  report.grid = s.grid;
  for (std::size_t i = 0; i < s.tasks.size(); ++i) {
    const TaskSpec& t = s.tasks[i];
    TaskReport rep;
    rep.type = t.type;
    char label[64];
    std::snprintf(label, sizeof label, "%02zu_%s", i + 1, t.type.c_str());
    rep.label = label;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (t.type == "curvature") run_curvature(s, t, rep);
      if (t.type == "geodesic") run_geodesic(s, t, rep);
      if (t.type == "action") run_action(s, b.moments, t, rep);
      if (t.type == "field-equations") run_field_equations(s, b.moments, t, rep);
      if (t.type == "axioms") run_axioms(s, t, rep);
      if (t.type == "limit-check") run_limit_check(s, b.moments, t, rep);
      if (t.type == "trace-oracle") run_trace_oracle(s, t, rep);
    } catch (const Error& e) {
      rep.text += std::string("  error: ") + e.what() + "\n";
      rep.checks.push_back({"task completed", 0.0, 1.0, 0.0, false});
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.tasks.push_back(std::move(rep));
  }
  return report;
}

std::string RunReport::text() const {
  std::ostringstream out;
  out << "scenario: " << scenario << "\n";
  out << "seed: " << seed << "\n";
  out << "grid: " << grid << "\n";
  double total = 0.0;
  for (const auto& t : tasks) {
    char head[128];
    std::snprintf(head, sizeof head, "\n[%s] %s (%.3f s)\n", t.label.c_str(), t.passed() ? "PASS" : "FAIL", t.seconds);
    out << head << t.text;
    for (const auto& c : t.checks) {
      char line[256];
      std::snprintf(line, sizeof line, "  %s %s: %.6g (tolerance %.3g)\n", c.passed ? "ok  " : "FAIL", c.name.c_str(),
                    c.reference != 0.0 ? std::abs(c.value - c.reference) : c.value, c.tolerance);
      out << line;
    }
    total += t.seconds;
  }
  char tail[96];
  std::snprintf(tail, sizeof tail, "\nresult: %s (%.3f s)\n", passed() ? "PASS" : "FAIL", total);
  out << tail;
  return out.str();
}

std::vector<std::string> write_artifacts(const RunReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> paths;
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
    paths.push_back(p.string());
  };
  write("report.txt", report.text());
  for (const auto& t : report.tasks)
    if (!t.csv.empty()) write(t.label + ".csv", t.csv);
  return paths;
}

}  // namespace geodyn
