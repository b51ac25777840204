#pragma once

namespace dvcm {

// Entry point behind the `dvcm` binary. Returns 0 on success, 2 on usage
// errors (unknown flag, missing required argument, bad value), 1 on runtime
// errors (unreadable file, degenerate input).
int cli_dispatch(int argc, const char* const* argv);

}  // namespace dvcm
