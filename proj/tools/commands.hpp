#pragma once

#include "config.hpp"

namespace peacock::cli {

// Each command writes its artifacts into the output directory and returns
// 0 when every requested verdict holds, 1 when a verdict fails. Usage and
// precondition errors escape as typed exceptions; run_cli maps them to 2.
int cmd_mrl(const RunConfig& cfg);
int cmd_tp2(const RunConfig& cfg);
int cmd_embed(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

int run_cli(int argc, const char* const* argv);

}  // namespace peacock::cli
