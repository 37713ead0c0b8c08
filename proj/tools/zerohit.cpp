#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zerohit/commands.hpp"
#include "zerohit/config.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "JSON configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "master seed (overrides the config)");
  cmd->add_option("--out-dir", opts.out_dir, "directory for output files");
  cmd->add_option("--threads", opts.threads, "worker threads")
      ->check(CLI::Range(1u, 1024u));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled Bessel flows, hitting-time fields, reverse Loewner "
               "flows and welding"};
  app.require_subcommand(1);

  CommonOptions opts;
  bool refine = false;
  auto* verify = app.add_subcommand("verify-law", "exact hitting-time law against simulation");
  auto* field = app.add_subcommand("field", "hitting-time field on shared paths");
  auto* weld = app.add_subcommand("weld", "welding table psi(kappa, x)");
  auto* walk = app.add_subcommand("walk", "iterated hitting-time walk and sum statistics");
  auto* trace = app.add_subcommand("trace", "curve points from complex probes");
  auto* selftest = app.add_subcommand("selftest", "closed-form and structural checks");
  for (CLI::App* cmd : {verify, field, weld, walk, trace, selftest}) add_common(cmd, opts);
  field->add_flag("--refine", refine, "double both grids before running");

  CLI11_PARSE(app, argc, argv);

  try {
    zerohit::RunConfig cfg;
    if (!opts.config.empty()) cfg = zerohit::load_config(opts.config);
    if (opts.seed) cfg.seed = *opts.seed;

    zerohit::CommandContext ctx;
    ctx.out_dir = opts.out_dir;
    ctx.threads = opts.threads;
    ctx.log = &std::cout;
    ctx.refine = refine;

    if (*verify) return zerohit::cmd_verify_law(cfg, ctx);
    if (*field) return zerohit::cmd_field(cfg, ctx);
    if (*weld) return zerohit::cmd_weld(cfg, ctx);
    if (*walk) return zerohit::cmd_walk(cfg, ctx);
    if (*trace) return zerohit::cmd_trace(cfg, ctx);
    return zerohit::cmd_selftest(ctx);
  } catch (const zerohit::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
