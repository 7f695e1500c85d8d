#include "gibbslim/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gibbslim/config.hpp"
#include "gibbslim/errors.hpp"
#include "gibbslim/serialize.hpp"
#include "gibbslim/study.hpp"
#include "gibbslim/version.hpp"

namespace gibbslim::cli {

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
  long long max_dim = 0;
  bool max_dim_set = false;
};

int run_mode(const std::string& mode, const Options& opt) {
  config::StudyConfig cfg = config::load_config(opt.config_path);
  if (opt.seed_set) cfg.seed = opt.seed;
  if (opt.max_dim_set) {
    if (opt.max_dim < 1) throw ConfigError("--max-dim must be positive");
    cfg.max_dim = static_cast<Index>(opt.max_dim);
  }
  if (cfg.mode != mode)
    throw ConfigError("this subcommand needs mode = " + mode + ", config says '" +
                      cfg.mode + "'");
  const serialize::Format fmt = serialize::parse_format(opt.format);
  const study::StudyOutput out = study::run_study(cfg);

  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  const std::string path =
      (std::filesystem::path(opt.out_dir) /
       (cfg.basename + "." + serialize::extension(fmt)))
          .string();
  serialize::emit_report(out.report, fmt, path);
  std::cout << "wrote " << path << "\n";
  if (!out.ok) {
    std::cerr << "error: one or more checks failed, see " << path << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"thermal states of trapped bosons and their classical field limits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Entry {
    const char* command;
    const char* mode;
    const char* blurb;
  };
  const Entry entries[] = {
      {"onebody", "onebody", "dump the discretized one-body spectrum"},
      {"bosonic-converge", "bosonic",
       "temperature sweep against the classical field ensemble"},
      {"boltzon-converge", "boltzon",
       "particle sweep comparing exact states with the mean-field minimizer"},
      {"measure-check", "measure-check",
       "Monte Carlo moment and partition cross-checks"},
      {"free-check", "free-check", "exact checks of the interaction-free theory"},
  };

  Options opt;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.command, e.blurb);
    sub->add_option("--config", opt.config_path, "study configuration file")
        ->required();
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--out", opt.out_dir, "output directory (default .)");
    sub->add_option("--format", opt.format, "csv or json (default csv)");
    sub->add_option("--max-dim", opt.max_dim, "override the dimension cap");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    opt.seed_set = sub->count("--seed") > 0;
    opt.max_dim_set = sub->count("--max-dim") > 0;
    for (const Entry& e : entries)
      if (sub->get_name() == e.command) return run_mode(e.mode, opt);
    throw ConfigError("unknown subcommand");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gibbslim::cli
