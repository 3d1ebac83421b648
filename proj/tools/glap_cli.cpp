// glap: run one experiment from a JSON config and write CSV/JSON results.
//
//   glap <moments|admissible|lln|clt|rate|corr|boundary> --config PATH
//        [--seed N] [--out PREFIX] [--threads N]
//
// Exit status: 0 pass, 2 fail, 1 error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "glap/config.hpp"
#include "glap/experiments.hpp"
#include "glap/io.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kError = 1;
constexpr int kFail = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned threads = 0;
};

int run(const std::string& command, const Options& opt) {
  if (!std::filesystem::is_regular_file(opt.config)) {
    std::cerr << "error: config not found: " << opt.config << "\n";
    return kError;
  }
  std::ifstream in(opt.config, std::ios::binary);
  std::stringstream text;
  text << in.rdbuf();
  if (!in) {
    std::cerr << "error: cannot read " << opt.config << "\n";
    return kError;
  }
  auto cfg = glap::config::parse_config(text.str());
  const std::string declared = cfg.document.at("experiment").get<std::string>();
  if (declared != command) {
    std::cerr << "error: config declares experiment \"" << declared << "\" but the subcommand is \""
              << command << "\"\n";
    return kError;
  }
  auto& ex = cfg.experiment;
  if (opt.seed) ex.seed = *opt.seed;
  ex.threads = opt.threads ? opt.threads : glap::experiments::default_threads();
  const auto result = glap::experiments::run(ex);
  const std::string prefix = opt.out.empty() ? cfg.output : opt.out;
  const auto files = glap::io::emit_results(result, cfg, prefix, opt.seed);
  glap::io::print_summary(std::cout, result);
  std::cout << "wrote " << files.records << ", " << files.summary << ", " << files.manifest << "\n";
  return result.pass ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for graph Laplacian operators"};
  app.require_subcommand(1);
  Options opt;
  for (const char* name : {"moments", "admissible", "lln", "clt", "rate", "corr", "boundary"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
    sub->add_option("--seed", opt.seed, "override the master seed");
    sub->add_option("--out", opt.out, "output path prefix (default: config \"output\")");
    sub->add_option("--threads", opt.threads, "worker threads (default: hardware concurrency)")
        ->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const glap::config::ConfigError& e) {
    std::cerr << "error: invalid config " << opt.config << "\n";
    for (const auto& msg : e.errors()) std::cerr << "  " << msg << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kError;
}
