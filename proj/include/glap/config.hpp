#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "glap/error.hpp"
#include "glap/experiments.hpp"
#include "glap/functions.hpp"
#include "glap/geometry.hpp"
#include "glap/kernels.hpp"
#include "glap/polynomial.hpp"
#include "glap/sampling.hpp"

namespace glap::config {

using json = nlohmann::ordered_json;

// Every problem found in a document, each prefixed by its key path.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : Error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "\n" : "") + e[i];
    return s;
  }
  std::vector<std::string> errors_;
};

struct Config {
  experiments::Experiment experiment;
  std::string output;
  json document;  // normalised, defaults filled in
};

namespace detail {

// Collects errors while walking the document. Each accessor records a
// problem and returns nullopt instead of throwing.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& what) {
    errors.push_back((path.empty() ? std::string("<root>") : path) + ": " + what);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  bool object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (const auto& [k, v] : j.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || k == a;
      if (!known) fail(join(path, k), "unknown key \"" + k + "\"");
    }
    return true;
  }

  const json* field(const json& j, const std::string& path, const char* key, bool required) {
    if (!j.contains(key)) {
      if (required) fail(join(path, key), "missing required key");
      return nullptr;
    }
    return &j.at(key);
  }

  std::optional<double> number(const json& j, const std::string& path, const char* key,
                               std::optional<double> fallback = std::nullopt) {
    const json* v = field(j, path, key, !fallback);
    if (!v) return fallback;
    return as_number(*v, join(path, key));
  }

  std::optional<double> as_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      fail(path, "number must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::uint64_t> count(const json& j, const std::string& path, const char* key,
                                     std::optional<std::uint64_t> fallback = std::nullopt) {
    const json* v = field(j, path, key, !fallback);
    if (!v) return fallback;
    return as_count(*v, join(path, key));
  }

  std::optional<std::uint64_t> as_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::isfinite(x) && x >= 0.0 && x == std::floor(x) && x < 1.8e19) {
        return static_cast<std::uint64_t>(x);
      }
    }
    fail(path, "expected a nonnegative integer");
    return std::nullopt;
  }

  std::optional<std::string> string(const json& j, const std::string& path, const char* key,
                                    std::optional<std::string> fallback = std::nullopt) {
    const json* v = field(j, path, key, !fallback);
    if (!v) return fallback;
    if (!v->is_string()) {
      fail(join(path, key), "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto x = as_number(v[i], path + "[" + std::to_string(i) + "]");
      ok = ok && x.has_value();
      if (x) out.push_back(*x);
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<std::vector<double>> numbers(const json& j, const std::string& path,
                                             const char* key, bool required = true) {
    const json* v = field(j, path, key, required);
    if (!v) return std::nullopt;
    return numbers(*v, join(path, key));
  }

  std::optional<Vec> vec(const json& j, const std::string& path, const char* key, std::size_t d,
                         bool required = true) {
    auto xs = numbers(j, path, key, required);
    if (!xs) return std::nullopt;
    if (xs->size() != d) {
      fail(join(path, key), "expected " + std::to_string(d) + " components");
      return std::nullopt;
    }
    Vec v(d);
    for (std::size_t i = 0; i < d; ++i) v[i] = (*xs)[i];
    return v;
  }

  // Runs a library constructor, turning its precondition errors into
  // config errors at `path`.
  template <class F>
  auto guarded(const std::string& path, F&& make) -> std::optional<decltype(make())> {
    try {
      return make();
    } catch (const Error& e) {
      fail(path, e.what());
      return std::nullopt;
    }
  }
};

inline json vec_json(const Vec& v) {
  json a = json::array();
  for (std::size_t i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

template <class T>
struct Built {
  std::optional<T> value;
  json normalised;
};

inline Built<geometry::Domain> build_domain(Reader& r, const json& j, const std::string& path,
                                            std::size_t d) {
  Built<geometry::Domain> out;
  if (!j.is_object()) {
    r.fail(path, "expected an object");
    return out;
  }
  const auto type = r.string(j, path, "type");
  if (!type) return out;
  json n{{"type", *type}};
  if (*type == "full_space" || *type == "cusp") {
    r.object(j, path, {"type"});
    if (*type == "cusp" && d != 2) r.fail(path, "cusp domain is two-dimensional");
    else out.value = *type == "cusp" ? geometry::cusp() : geometry::full_space(d);
  } else if (*type == "interval") {
    r.object(j, path, {"type", "lo", "hi"});
    const auto lo = r.number(j, path, "lo");
    const auto hi = r.number(j, path, "hi");
    if (d != 1) r.fail(path, "interval domain is one-dimensional");
    if (lo && hi) {
      n["lo"] = *lo;
      n["hi"] = *hi;
      if (d == 1) out.value = r.guarded(path, [&] { return geometry::interval(*lo, *hi); });
    }
  } else if (*type == "box") {
    r.object(j, path, {"type", "lo", "hi"});
    const auto lo = r.vec(j, path, "lo", d);
    const auto hi = r.vec(j, path, "hi", d);
    if (lo && hi) {
      n["lo"] = vec_json(*lo);
      n["hi"] = vec_json(*hi);
      out.value = r.guarded(path, [&] { return geometry::box(*lo, *hi); });
    }
  } else if (*type == "ball") {
    r.object(j, path, {"type", "center", "radius"});
    const auto c = r.vec(j, path, "center", d);
    const auto rad = r.number(j, path, "radius");
    if (c && rad) {
      n["center"] = vec_json(*c);
      n["radius"] = *rad;
      out.value = r.guarded(path, [&] { return geometry::ball(*c, *rad); });
    }
  } else if (*type == "half_space") {
    r.object(j, path, {"type", "origin", "normal"});
    const auto o = r.vec(j, path, "origin", d);
    const auto nv = r.vec(j, path, "normal", d);
    if (o && nv) {
      n["origin"] = vec_json(*o);
      n["normal"] = vec_json(*nv);
      out.value = r.guarded(path, [&] { return geometry::half_space(*o, *nv); });
    }
  } else if (*type == "wedge") {
    r.object(j, path, {"type", "apex", "bisector", "opening"});
    const auto a = r.vec(j, path, "apex", d);
    const auto b = r.vec(j, path, "bisector", d);
    const auto op = r.number(j, path, "opening");
    if (a && b && op) {
      n["apex"] = vec_json(*a);
      n["bisector"] = vec_json(*b);
      n["opening"] = *op;
      out.value = r.guarded(path, [&] { return geometry::wedge(*a, *b, *op); });
    }
  } else if (*type == "parabolic_graph") {
    r.object(j, path, {"type", "coefficients"});
    const auto c = r.numbers(j, path, "coefficients");
    if (c) {
      n["coefficients"] = numbers_json(*c);
      if (c->size() + 1 != d) r.fail(r.join(path, "coefficients"), "expected dimension - 1 coefficients");
      else out.value = r.guarded(path, [&] { return geometry::parabolic_graph(*c); });
    }
  } else {
    r.fail(r.join(path, "type"), "unknown domain type \"" + *type + "\"");
  }
  out.normalised = std::move(n);
  return out;
}

inline Built<kernels::Kernel> build_kernel(Reader& r, const json& j, const std::string& path,
                                           std::size_t d) {
  Built<kernels::Kernel> out;
  if (!j.is_object()) {
    r.fail(path, "expected an object");
    return out;
  }
  const auto type = r.string(j, path, "type");
  if (!type) return out;
  json n{{"type", *type}};
  if (*type == "gaussian") {
    r.object(j, path, {"type", "a"});
    if (const auto a = r.number(j, path, "a", 1.0)) {
      n["a"] = *a;
      out.value = r.guarded(path, [&] { return kernels::gaussian(d, *a); });
    }
  } else if (*type == "indicator_ball" || *type == "epanechnikov") {
    r.object(j, path, {"type", "radius"});
    if (const auto R = r.number(j, path, "radius", 1.0)) {
      n["radius"] = *R;
      out.value = r.guarded(path, [&] {
        return *type == "indicator_ball" ? kernels::indicator_ball(d, *R) : kernels::epanechnikov(d, *R);
      });
    }
  } else if (*type == "indicator_box") {
    r.object(j, path, {"type", "half_widths"});
    if (const auto w = r.numbers(j, path, "half_widths")) {
      n["half_widths"] = numbers_json(*w);
      if (w->size() != d) r.fail(r.join(path, "half_widths"), "expected one half width per dimension");
      else out.value = r.guarded(path, [&] { return kernels::indicator_box(*w); });
    }
  } else if (*type == "product") {
    r.object(j, path, {"type", "factors"});
    const json* fs = r.field(j, path, "factors", true);
    if (fs && !fs->is_array()) r.fail(r.join(path, "factors"), "expected an array");
    if (fs && fs->is_array()) {
      std::vector<kernels::Factor> factors;
      json nf = json::array();
      bool ok = true;
      for (std::size_t i = 0; i < fs->size(); ++i) {
        const std::string fp = r.join(path, "factors") + "[" + std::to_string(i) + "]";
        const json& f = (*fs)[i];
        if (!r.object(f, fp, {"kind", "scale"})) {
          ok = false;
          continue;
        }
        const auto kind = r.string(f, fp, "kind");
        const auto scale = r.number(f, fp, "scale", 1.0);
        kernels::Factor fac;
        if (kind == "gaussian") fac.kind = kernels::Factor::Kind::gaussian;
        else if (kind == "indicator") fac.kind = kernels::Factor::Kind::indicator;
        else if (kind == "epanechnikov") fac.kind = kernels::Factor::Kind::epanechnikov;
        else if (kind) r.fail(r.join(fp, "kind"), "unknown factor kind \"" + *kind + "\"");
        ok = ok && kind && scale;
        if (kind && scale) {
          fac.scale = *scale;
          factors.push_back(fac);
          nf.push_back(json{{"kind", *kind}, {"scale", *scale}});
        }
      }
      n["factors"] = nf;
      if (ok && factors.size() != d) r.fail(r.join(path, "factors"), "expected one factor per dimension");
      else if (ok) out.value = r.guarded(path, [&] { return kernels::product(factors); });
    }
  } else if (*type == "power_law") {
    r.object(j, path, {"type", "C", "tau", "beta", "cutoff"});
    const auto C = r.number(j, path, "C", 1.0);
    const auto tau = r.number(j, path, "tau");
    const auto beta = r.number(j, path, "beta");
    const json* cut = r.field(j, path, "cutoff", false);
    std::optional<double> cutoff = geometry::kInf;
    if (cut) cutoff = r.as_number(*cut, r.join(path, "cutoff"));
    if (C && tau && beta && cutoff) {
      n["C"] = *C;
      n["tau"] = *tau;
      n["beta"] = *beta;
      if (cut) n["cutoff"] = *cutoff;
      out.value = r.guarded(path, [&] { return kernels::power_law(d, *C, *tau, *beta, *cutoff); });
    }
  } else if (*type == "tilted_gaussian") {
    r.object(j, path, {"type"});
    out.value = r.guarded(path, [&] { return kernels::tilted_gaussian(d); });
  } else {
    r.fail(r.join(path, "type"), "unknown kernel type \"" + *type + "\"");
  }
  out.normalised = std::move(n);
  return out;
}

// Polynomial from {"terms": [{"coef", "exps"}]} or univariate
// {"coefficients", "axis"}.
inline std::optional<Polynomial> read_polynomial(Reader& r, const json& j, const std::string& path,
                                                 std::size_t d, json& n) {
  const bool has_terms = j.contains("terms");
  const bool has_coeffs = j.contains("coefficients");
  if (has_terms == has_coeffs) {
    r.fail(path, "give exactly one of \"terms\" or \"coefficients\"");
    return std::nullopt;
  }
  if (has_coeffs) {
    const auto c = r.numbers(j, path, "coefficients");
    const auto axis = r.count(j, path, "axis", 0);
    if (!c || !axis) return std::nullopt;
    n["coefficients"] = numbers_json(*c);
    n["axis"] = *axis;
    if (*axis >= d) {
      r.fail(r.join(path, "axis"), "axis out of range");
      return std::nullopt;
    }
    return Polynomial::univariate(d, *axis, *c);
  }
  const json& ts = j.at("terms");
  const std::string tp = r.join(path, "terms");
  if (!ts.is_array()) {
    r.fail(tp, "expected an array");
    return std::nullopt;
  }
  std::vector<Polynomial::Term> terms;
  json nt = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::string ip = tp + "[" + std::to_string(i) + "]";
    if (!r.object(ts[i], ip, {"coef", "exps"})) {
      ok = false;
      continue;
    }
    const auto c = r.number(ts[i], ip, "coef");
    const json* e = r.field(ts[i], ip, "exps", true);
    Polynomial::Term t{c.value_or(0.0), {}};
    json ne = json::array();
    if (e && e->is_array() && e->size() == d) {
      for (std::size_t k = 0; k < d; ++k) {
        const auto x = r.as_count((*e)[k], r.join(ip, "exps") + "[" + std::to_string(k) + "]");
        ok = ok && x.has_value() && *x < 64;
        if (x) t.exps[k] = static_cast<int>(*x);
        ne.push_back(x.value_or(0));
      }
    } else if (e) {
      r.fail(r.join(ip, "exps"), "expected " + std::to_string(d) + " exponents");
      ok = false;
    } else {
      ok = false;
    }
    ok = ok && c.has_value();
    terms.push_back(t);
    nt.push_back(json{{"coef", t.coef}, {"exps", ne}});
  }
  n["terms"] = nt;
  if (!ok) return std::nullopt;
  return r.guarded(path, [&] { return Polynomial(d, terms); });
}

inline Built<sampling::Density> build_density(Reader& r, const json& j, const std::string& path,
                                              std::size_t d, Built<geometry::Domain>& domain) {
  Built<sampling::Density> out;
  if (!j.is_object()) {
    r.fail(path, "expected an object");
    return out;
  }
  const auto type = r.string(j, path, "type");
  const json* dj = r.field(j, path, "domain", true);
  if (dj) domain = build_domain(r, *dj, r.join(path, "domain"), d);
  if (!type) return out;
  json n{{"type", *type}};
  n["domain"] = domain.normalised;
  const auto& S = domain.value;
  if (*type == "uniform") {
    r.object(j, path, {"type", "domain"});
    if (S) out.value = r.guarded(path, [&] { return sampling::uniform(*S); });
  } else if (*type == "linear") {
    r.object(j, path, {"type", "domain", "a", "b"});
    const auto a = r.number(j, path, "a");
    const auto b = r.vec(j, path, "b", d);
    if (a && b) {
      n["a"] = *a;
      n["b"] = vec_json(*b);
      if (S) out.value = r.guarded(path, [&] { return sampling::linear(*S, *a, *b); });
    }
  } else if (*type == "product") {
    r.object(j, path, {"type", "domain", "factors"});
    const json* fs = r.field(j, path, "factors", true);
    if (fs && (!fs->is_array() || fs->size() != d)) {
      r.fail(r.join(path, "factors"), "expected one coefficient list per dimension");
    } else if (fs) {
      std::vector<std::vector<double>> factors;
      json nf = json::array();
      bool ok = true;
      for (std::size_t i = 0; i < d; ++i) {
        auto c = r.numbers((*fs)[i], r.join(path, "factors") + "[" + std::to_string(i) + "]");
        ok = ok && c.has_value();
        if (c) {
          nf.push_back(numbers_json(*c));
          factors.push_back(*c);
        }
      }
      n["factors"] = nf;
      if (ok && S) out.value = r.guarded(path, [&] { return sampling::product(*S, factors); });
    }
  } else if (*type == "custom_polynomial") {
    r.object(j, path, {"type", "domain", "terms", "coefficients", "axis"});
    auto P = read_polynomial(r, j, path, d, n);
    if (P && S) out.value = r.guarded(path, [&] { return sampling::custom_polynomial(*S, *P); });
  } else {
    r.fail(r.join(path, "type"), "unknown density type \"" + *type + "\"");
  }
  out.normalised = std::move(n);
  return out;
}

inline Built<functions::TestFunction> build_function(Reader& r, const json& j,
                                                     const std::string& path, std::size_t d) {
  Built<functions::TestFunction> out;
  if (!j.is_object()) {
    r.fail(path, "expected an object");
    return out;
  }
  const auto type = r.string(j, path, "type");
  if (!type) return out;
  json n{{"type", *type}};
  if (*type == "polynomial") {
    r.object(j, path, {"type", "terms", "coefficients", "axis"});
    if (auto P = read_polynomial(r, j, path, d, n)) out.value = functions::polynomial(*P);
  } else if (*type == "trig") {
    r.object(j, path, {"type", "omega", "amplitude", "phase"});
    const auto w = r.vec(j, path, "omega", d);
    const auto a = r.number(j, path, "amplitude", 1.0);
    const auto ph = r.number(j, path, "phase", 0.0);
    if (w && a && ph) {
      n["omega"] = vec_json(*w);
      n["amplitude"] = *a;
      n["phase"] = *ph;
      out.value = r.guarded(path, [&] { return functions::trig(*w, *a, *ph); });
    }
  } else if (*type == "holder") {
    r.object(j, path, {"type", "center", "theta"});
    auto c = j.contains("center") ? r.vec(j, path, "center", d) : std::optional<Vec>(Vec(d));
    const auto th = r.number(j, path, "theta");
    if (c && th) {
      n["center"] = vec_json(*c);
      n["theta"] = *th;
      out.value = r.guarded(path, [&] { return functions::holder(*c, *th); });
    }
  } else {
    r.fail(r.join(path, "type"), "unknown function type \"" + *type + "\"");
  }
  out.normalised = std::move(n);
  return out;
}

inline std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline const std::vector<const char*>& top_level_keys() {
  static const std::vector<const char*> keys{
      "experiment", "dimension", "kernel",  "density",  "domain",       "function",
      "point",      "points",    "schedule", "n_list",  "replications", "seed",
      "tolerances", "output",    "eps_list", "convention_factor", "centering", "pairs"};
  return keys;
}

// Parses and validates a config document. Throws ConfigError listing every
// problem found.
inline Config parse_config(const std::string& text) {
  using experiments::Kind;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is one past the offending character
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError({"syntax error at " + detail::location(text, at)});
  }
  detail::Reader r;
  Config cfg;
  auto& ex = cfg.experiment;
  json& n = cfg.document;
  n = json::object();
  if (!doc.is_object()) throw ConfigError({"<root>: expected an object"});
  for (const auto& [k, v] : doc.items()) {
    bool known = false;
    for (const char* a : top_level_keys()) known = known || k == a;
    if (!known) r.fail(k, "unknown key \"" + k + "\"");
  }

  const auto name = r.string(doc, "", "experiment");
  std::optional<Kind> kind;
  if (name) {
    kind = experiments::kind_from_string(*name);
    if (!kind) r.fail("experiment", "unknown experiment \"" + *name + "\"");
    n["experiment"] = *name;
  }
  const auto dim = r.count(doc, "", "dimension");
  if (dim && (*dim < 1 || *dim > kMaxDim)) {
    r.fail("dimension", "dimension must lie in 1.." + std::to_string(kMaxDim));
  }
  if (!kind || !dim || *dim < 1 || *dim > kMaxDim) throw ConfigError(r.errors);
  ex.kind = *kind;
  const std::size_t d = *dim;
  n["dimension"] = d;

  const bool stochastic = *kind == Kind::lln || *kind == Kind::clt || *kind == Kind::corr;
  const bool needs_model = stochastic || *kind == Kind::rate || *kind == Kind::boundary;

  // kernel
  if (const json* kj = r.field(doc, "", "kernel", true)) {
    auto k = detail::build_kernel(r, *kj, "kernel", d);
    n["kernel"] = k.normalised;
    ex.kernel = std::move(k.value);
  }

  // density and domain
  detail::Built<geometry::Domain> domain;
  if (const json* gj = r.field(doc, "", "density", needs_model)) {
    auto g = detail::build_density(r, *gj, "density", d, domain);
    n["density"] = g.normalised;
    ex.density = std::move(g.value);
  }
  if (const json* sj = r.field(doc, "", "domain", false)) {
    auto top = detail::build_domain(r, *sj, "domain", d);
    if (doc.contains("density")) {
      if (top.normalised != domain.normalised) {
        r.fail("domain", "differs from density.domain");
      }
    } else {
      domain = std::move(top);
    }
    n["domain"] = domain.normalised;
  }
  if (!ex.density && domain.value) ex.domain = domain.value;

  // function
  if (const json* fj = r.field(doc, "", "function", needs_model)) {
    auto f = detail::build_function(r, *fj, "function", d);
    n["function"] = f.normalised;
    ex.function = std::move(f.value);
  }

  // points
  const bool has_point = doc.contains("point"), has_points = doc.contains("points");
  if (has_point && has_points) r.fail("points", "give either \"point\" or \"points\", not both");
  if (has_point) {
    if (auto p = r.vec(doc, "", "point", d)) ex.points = {*p};
  } else if (has_points) {
    const json& ps = doc.at("points");
    if (!ps.is_array()) {
      r.fail("points", "expected an array of points");
    } else {
      for (std::size_t i = 0; i < ps.size(); ++i) {
        auto xs = r.numbers(ps[i], "points[" + std::to_string(i) + "]");
        if (xs && xs->size() != d) r.fail("points[" + std::to_string(i) + "]", "wrong dimension");
        else if (xs) ex.points.push_back(Vec(std::span<const double>(*xs)));
      }
    }
  }
  const std::size_t want_points = *kind == Kind::corr ? 2 : 1;
  if (needs_model && !has_point && !has_points) r.fail("point", "missing required key");
  else if (needs_model && (has_point || has_points) && ex.points.size() != want_points &&
           r.errors.empty()) {
    r.fail("points", "experiment needs exactly " + std::to_string(want_points) + " point(s)");
  }
  if (!ex.points.empty()) {
    json ps = json::array();
    for (const auto& p : ex.points) ps.push_back(detail::vec_json(p));
    n["points"] = ps;
  }

  // schedule
  const double theta_default = ex.function ? ex.function->theta() : 1.0;
  if (const json* sj = r.field(doc, "", "schedule", stochastic)) {
    if (r.object(*sj, "schedule", {"gamma", "c", "theta"})) {
      const auto gamma = r.number(*sj, "schedule", "gamma");
      const auto c = r.number(*sj, "schedule", "c", 1.0);
      const auto theta = r.number(*sj, "schedule", "theta", theta_default);
      if (gamma && c && theta) {
        n["schedule"] = json{{"gamma", *gamma}, {"c", *c}, {"theta", *theta}};
        if (auto s = r.guarded("schedule", [&] { return experiments::make_schedule(d, *theta, *gamma, *c); })) {
          ex.schedule = *s;
          if ((*kind == Kind::clt || *kind == Kind::corr) && !s->clt_valid) {
            r.fail("schedule", std::string("schedule invalid for ") + *name);
          }
          if (*kind == Kind::lln && !s->lln_valid) r.fail("schedule", "schedule invalid for lln");
        }
      }
    }
  } else {
    ex.schedule.d = d;
    ex.schedule.theta = theta_default;
  }

  // sample sizes
  if (const json* nj = r.field(doc, "", "n_list", stochastic)) {
    if (!nj->is_array() || nj->empty()) {
      r.fail("n_list", "expected a nonempty array of sample sizes");
    } else {
      json nl = json::array();
      for (std::size_t i = 0; i < nj->size(); ++i) {
        const auto v = r.as_count((*nj)[i], "n_list[" + std::to_string(i) + "]");
        if (v && *v == 0) r.fail("n_list[" + std::to_string(i) + "]", "sample size must be positive");
        if (v) {
          ex.n_list.push_back(*v);
          nl.push_back(*v);
        }
      }
      n["n_list"] = nl;
    }
  }
  if (const auto R = r.count(doc, "", "replications", 1)) {
    if (*R == 0) r.fail("replications", "must be positive");
    ex.replications = *R;
    n["replications"] = *R;
  }
  if (const auto seed = r.count(doc, "", "seed", 42)) {
    ex.seed = *seed;
    n["seed"] = *seed;
  }

  // tolerances
  if (const json* tj = r.field(doc, "", "tolerances", false)) {
    if (r.object(*tj, "tolerances",
                 {"lln_median", "ks", "variance_lo", "variance_hi", "corr", "slope_band",
                  "degenerate_max", "plateau", "decrease_ratio", "exact_floor", "quadrature"})) {
      auto& t = ex.tol;
      auto set = [&](const char* key, double& slot) {
        if (auto v = r.number(*tj, "tolerances", key, slot)) {
          if (*v <= 0.0) r.fail(std::string("tolerances.") + key, "must be positive");
          slot = *v;
        }
      };
      set("lln_median", t.lln_median);
      set("ks", t.ks);
      set("variance_lo", t.variance_lo);
      set("variance_hi", t.variance_hi);
      set("corr", t.corr);
      set("slope_band", t.slope_band);
      set("degenerate_max", t.degenerate_max);
      set("plateau", t.plateau);
      set("decrease_ratio", t.decrease_ratio);
      set("exact_floor", t.exact_floor);
      set("quadrature", t.quadrature);
    }
  }
  n["tolerances"] = json{{"lln_median", ex.tol.lln_median},   {"ks", ex.tol.ks},
                         {"variance_lo", ex.tol.variance_lo}, {"variance_hi", ex.tol.variance_hi},
                         {"corr", ex.tol.corr},               {"slope_band", ex.tol.slope_band},
                         {"degenerate_max", ex.tol.degenerate_max}, {"plateau", ex.tol.plateau},
                         {"decrease_ratio", ex.tol.decrease_ratio}, {"exact_floor", ex.tol.exact_floor},
                         {"quadrature", ex.tol.quadrature}};

  // experiment-specific extras
  if (*kind == Kind::boundary) ex.eps_list = {0.2, 0.1, 0.05};
  if (const json* ej = r.field(doc, "", "eps_list", false)) {
    if (auto e = r.numbers(*ej, "eps_list")) {
      if (e->empty()) r.fail("eps_list", "must not be empty");
      for (double x : *e) {
        if (x <= 0.0) r.fail("eps_list", "values must be positive");
      }
      ex.eps_list = *e;
    }
  }
  if (*kind == Kind::rate || *kind == Kind::boundary) n["eps_list"] = detail::numbers_json(ex.eps_list);
  if (const auto cf = r.number(doc, "", "convention_factor", 0.5)) {
    if (*cf != 0.5 && *cf != 1.0) r.fail("convention_factor", "must be 0.5 or 1");
    ex.convention_factor = *cf;
    n["convention_factor"] = *cf;
  }
  if (const auto c = r.string(doc, "", "centering", std::string())) {
    if (*c == "limit") ex.centering = experiments::Centering::limit;
    else if (*c == "averaging") ex.centering = experiments::Centering::averaging;
    else if (!c->empty()) r.fail("centering", "must be \"limit\" or \"averaging\"");
    if (!c->empty()) n["centering"] = *c;
  }
  if (const json* pj = r.field(doc, "", "pairs", false)) {
    ex.pairs.clear();
    json np = json::array();
    if (!pj->is_array()) {
      r.fail("pairs", "expected an array of [alpha, eta] pairs");
    } else {
      for (std::size_t i = 0; i < pj->size(); ++i) {
        auto xs = r.numbers((*pj)[i], "pairs[" + std::to_string(i) + "]");
        if (xs && xs->size() != 2) r.fail("pairs[" + std::to_string(i) + "]", "expected two numbers");
        else if (xs) {
          ex.pairs.push_back({(*xs)[0], (*xs)[1]});
          np.push_back(detail::numbers_json(*xs));
        }
      }
    }
    n["pairs"] = np;
  }
  cfg.output = r.string(doc, "", "output", std::string("glap_") + *name).value_or("");
  n["output"] = cfg.output;

  // cross checks
  if (r.errors.empty()) {
    const geometry::Domain* S = ex.density ? &ex.density->domain() : (ex.domain ? &*ex.domain : nullptr);
    for (std::size_t i = 0; i < ex.points.size(); ++i) {
      if (S && !S->contains(ex.points[i])) {
        r.fail(has_point ? "point" : "points[" + std::to_string(i) + "]", "point outside the domain");
      }
    }
    if (stochastic && ex.density && !ex.density->sampleable()) {
      r.fail("density", "density cannot be sampled");
    }
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return cfg;
}

// Normalised document text; parse_config(serialize(c)) reproduces c.
inline std::string serialize(const Config& c) { return c.document.dump(2) + "\n"; }

}  // namespace glap::config
