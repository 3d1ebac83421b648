#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "glap/config.hpp"
#include "glap/io.hpp"

using namespace glap;
using namespace glap::config;

namespace {

const char* kMinimalClt = R"({
  "experiment": "clt",
  "dimension": 1,
  "kernel": {"type": "indicator_ball"},
  "density": {"type": "uniform", "domain": {"type": "interval", "lo": -1, "hi": 1}},
  "function": {"type": "polynomial", "coefficients": [0, 1, 1]},
  "point": [0],
  "schedule": {"gamma": 0.25},
  "n_list": [1000],
  "replications": 10
})";

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& what) {
  for (const auto& e : errs) {
    if (e.find(what) != std::string::npos) return true;
  }
  return false;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string patched(const std::string& key, const std::string& value) {
  auto j = json::parse(kMinimalClt);
  j[key] = json::parse(value);
  return j.dump();
}

}  // namespace

TEST(Config, MinimalCltParses) {
  const auto c = parse_config(kMinimalClt);
  EXPECT_EQ(c.experiment.kind, experiments::Kind::clt);
  EXPECT_TRUE(c.experiment.schedule.clt_valid);
  EXPECT_EQ(c.experiment.seed, 42u);
  EXPECT_EQ(c.experiment.n_list, std::vector<std::size_t>{1000});
  EXPECT_EQ(c.experiment.points.size(), 1u);
  EXPECT_EQ(c.output, "glap_clt");
  EXPECT_EQ(c.document.at("schedule").at("c"), 1.0);
}

TEST(Config, ScheduleInvalidForClt) {
  const auto errs = errors_of(patched("schedule", R"({"gamma": 2.0, "theta": 1})"));
  EXPECT_TRUE(mentions(errs, "schedule invalid for clt"));
}

TEST(Config, UnknownKeyIsNamed) {
  const auto errs = errors_of(patched("kernel_bandwidth", "0.1"));
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_TRUE(mentions(errs, "kernel_bandwidth"));
  EXPECT_TRUE(mentions(errors_of(patched("kernel", R"({"type": "gaussian", "sigma": 2})")),
                       "kernel.sigma"));
}

TEST(Config, AllErrorsAreReported) {
  auto j = json::parse(kMinimalClt);
  j["bogus"] = 1;
  j["replications"] = -3;
  j["kernel"] = json{{"type", "nope"}};
  j["point"] = json::array({0.0, 1.0});
  const auto errs = errors_of(j.dump());
  EXPECT_TRUE(mentions(errs, "bogus"));
  EXPECT_TRUE(mentions(errs, "replications"));
  EXPECT_TRUE(mentions(errs, "kernel.type"));
  EXPECT_TRUE(mentions(errs, "point"));
  EXPECT_GE(errs.size(), 4u);
}

TEST(Config, SyntaxErrorHasLineAndColumn) {
  const auto errs = errors_of("{\n  \"experiment\": \"clt\",\n  \"dimension\": ,\n}");
  ASSERT_EQ(errs.size(), 1u);
  EXPECT_TRUE(mentions(errs, "line 3, column 16")) << errs[0];
}

TEST(Config, SemanticChecks) {
  EXPECT_TRUE(mentions(errors_of(patched("point", "[1.5]")), "outside the domain"));
  EXPECT_TRUE(mentions(errors_of(patched("dimension", "2")), "components"));
  EXPECT_TRUE(mentions(errors_of(patched("convention_factor", "0.7")), "convention_factor"));
  EXPECT_TRUE(mentions(errors_of(patched("n_list", "[]")), "n_list"));
  EXPECT_TRUE(mentions(errors_of(patched("domain", R"({"type": "interval", "lo": 0, "hi": 1})")),
                       "differs from density.domain"));
  auto j = json::parse(kMinimalClt);
  j.erase("schedule");
  EXPECT_TRUE(mentions(errors_of(j.dump()), "schedule: missing"));
  j = json::parse(kMinimalClt);
  j["experiment"] = "lln";
  j["schedule"] = {{"gamma", 0.5}};
  EXPECT_TRUE(mentions(errors_of(j.dump()), "schedule invalid for lln"));
}

TEST(Config, RoundTripIsIdentity) {
  std::vector<std::string> texts{kMinimalClt};
  for (const auto& entry : std::filesystem::directory_iterator(GLAP_CONFIG_DIR)) {
    texts.push_back(slurp(entry.path().string()));
  }
  ASSERT_GE(texts.size(), 8u);
  for (const auto& t : texts) {
    const auto a = parse_config(t);
    const std::string s = serialize(a);
    const auto b = parse_config(s);
    EXPECT_EQ(a.document, b.document);
    EXPECT_EQ(s, serialize(b));
    EXPECT_EQ(a.experiment.seed, b.experiment.seed);
    EXPECT_EQ(a.experiment.points.size(), b.experiment.points.size());
  }
}

TEST(Config, ShippedConfigsParse) {
  for (const auto& entry : std::filesystem::directory_iterator(GLAP_CONFIG_DIR)) {
    EXPECT_NO_THROW(parse_config(slurp(entry.path().string()))) << entry.path();
  }
}

TEST(Config, BuildersCoverEveryType) {
  const char* kernels[] = {
      R"({"type": "gaussian", "a": 2})",
      R"({"type": "indicator_ball", "radius": 1})",
      R"({"type": "indicator_box", "half_widths": [1, 0.5]})",
      R"({"type": "epanechnikov"})",
      R"({"type": "product", "factors": [{"kind": "gaussian"}, {"kind": "indicator", "scale": 2}]})",
      R"({"type": "power_law", "C": 1, "tau": 0.5, "beta": 5, "cutoff": 3})",
      R"({"type": "tilted_gaussian"})"};
  for (const char* k : kernels) {
    json j{{"experiment", "moments"}, {"dimension", 2}, {"kernel", json::parse(k)}};
    EXPECT_NO_THROW(parse_config(j.dump())) << k;
  }
  const char* domains[] = {
      R"({"type": "full_space"})",
      R"({"type": "box", "lo": [-1, -1], "hi": [1, 1]})",
      R"({"type": "ball", "center": [0, 0], "radius": 2})",
      R"({"type": "half_space", "origin": [0, 0], "normal": [0, 1]})",
      R"({"type": "wedge", "apex": [0, 0], "bisector": [0, 1], "opening": 1.5})",
      R"({"type": "parabolic_graph", "coefficients": [1]})",
      R"({"type": "cusp"})"};
  for (const char* d : domains) {
    json j{{"experiment", "moments"},
           {"dimension", 2},
           {"kernel", {{"type", "gaussian"}}},
           {"domain", json::parse(d)},
           {"point", {0.0, 0.0}}};
    EXPECT_NO_THROW(parse_config(j.dump())) << d;
  }
  const char* functions[] = {
      R"({"type": "polynomial", "terms": [{"coef": 1, "exps": [2, 1]}]})",
      R"({"type": "trig", "omega": [1, 2], "phase": 0.3})",
      R"({"type": "holder", "theta": 0.5})"};
  const char* densities[] = {
      R"({"type": "uniform", "domain": {"type": "ball", "center": [0, 0], "radius": 1}})",
      R"({"type": "linear", "a": 2, "b": [0.5, 0], "domain": {"type": "ball", "center": [0, 0], "radius": 1}})",
      R"({"type": "product", "factors": [[1, 1], [1]], "domain": {"type": "box", "lo": [0, 0], "hi": [1, 1]}})",
      R"({"type": "custom_polynomial", "terms": [{"coef": 1, "exps": [0, 2]}], "domain": {"type": "box", "lo": [0, 0], "hi": [1, 1]}})"};
  for (const char* f : functions) {
    for (const char* g : densities) {
      json j{{"experiment", "rate"},      {"dimension", 2},           {"kernel", {{"type", "gaussian"}}},
             {"density", json::parse(g)}, {"function", json::parse(f)}, {"point", {0.5, 0.5}}};
      EXPECT_NO_THROW(parse_config(j.dump())) << f << " " << g;
    }
  }
}

TEST(Config, SubSchemaErrorsCarryPaths) {
  json j{{"experiment", "moments"}, {"dimension", 2},
         {"kernel", {{"type", "indicator_box"}, {"half_widths", {1.0}}}}};
  EXPECT_TRUE(mentions(errors_of(j.dump()), "kernel.half_widths"));
  j["kernel"] = {{"type", "power_law"}, {"tau", 3}, {"beta", 1}};
  EXPECT_TRUE(mentions(errors_of(j.dump()), "kernel: power-law exponents"));
  j["kernel"] = {{"type", "gaussian"}};
  j["domain"] = {{"type", "ball"}, {"center", {0.0, 0.0}}, {"radius", "one"}};
  EXPECT_TRUE(mentions(errors_of(j.dump()), "domain.radius: expected a number"));
}

TEST(Emit, RecordRowsAndDeterministicBytes) {
  auto j = json::parse(kMinimalClt);
  j["n_list"] = {200, 400, 800};
  j["replications"] = 2;
  auto cfg = parse_config(j.dump());
  const auto res = experiments::run(cfg.experiment);
  const auto dir = std::filesystem::temp_directory_path() / "glap_emit_test";
  std::filesystem::remove_all(dir);
  const auto f = io::emit_results(res, cfg, (dir / "run").string());
  const std::string records = slurp(f.records);
  EXPECT_EQ(std::count(records.begin(), records.end(), '\n'), 1 + 6);
  EXPECT_EQ(records.rfind("experiment,n,epsilon,replication,value\n", 0), 0u);
  EXPECT_EQ(records.find('\r'), std::string::npos);
  const std::string summary = slurp(f.summary);
  EXPECT_EQ(summary.rfind("n,epsilon,count,mean,variance,ks,corr,median_error,verdict\n", 0), 0u);
  const std::string manifest = slurp(f.manifest);
  const auto again = io::emit_results(res, cfg, (dir / "run").string());
  EXPECT_EQ(slurp(again.records), records);
  EXPECT_EQ(slurp(again.summary), summary);
  EXPECT_EQ(slurp(again.manifest), manifest);
  const auto m = json::parse(manifest);
  EXPECT_EQ(m.at("convention_factor"), 0.5);
  EXPECT_EQ(m.at("seed"), 42);
  EXPECT_TRUE(m.at("tolerances").contains("ks"));
  std::filesystem::remove_all(dir);
}

TEST(Emit, NumbersRoundTrip) {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.uniform(-60, 60)));
    EXPECT_EQ(std::stod(io::format_number(x)), x);
  }
  EXPECT_EQ(io::format_number(0.1), "0.1");
  EXPECT_EQ(io::format_number(std::nan("")), "");
}
