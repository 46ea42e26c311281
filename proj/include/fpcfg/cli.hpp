#pragma once

namespace fpcfg {

// Entry point for the fpcfg tool. Exit codes: 0 ok, 2 usage, 3 bad data or
// misaligned inputs, 4 numerical failure (zero-measure corpus).
int run_cli(int argc, const char* const* argv);

}  // namespace fpcfg
