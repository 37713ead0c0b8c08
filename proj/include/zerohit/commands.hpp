#pragma once

#include <filesystem>
#include <iosfwd>

#include "zerohit/config.hpp"

namespace zerohit {

struct CommandContext {
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
  /// Progress and summary lines; may be null.
  std::ostream* log = nullptr;
  /// field only: refine both grids once before running.
  bool refine = false;
};

/// Each command writes its files into ctx.out_dir and returns 0 when every
/// gated check passes, 1 otherwise. Outputs do not depend on ctx.threads.
int cmd_verify_law(const RunConfig& cfg, const CommandContext& ctx);
int cmd_field(const RunConfig& cfg, const CommandContext& ctx);
int cmd_weld(const RunConfig& cfg, const CommandContext& ctx);
int cmd_walk(const RunConfig& cfg, const CommandContext& ctx);
int cmd_trace(const RunConfig& cfg, const CommandContext& ctx);
/// Closed-form and structural checks only; no Monte Carlo.
int cmd_selftest(const CommandContext& ctx);

}  // namespace zerohit
