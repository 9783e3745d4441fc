#pragma once

namespace bsr {

/// Command-line entry point (fit / bench / ksens / eval / demo-finance).
/// Returns the process exit code: 0 on success, 1 on runtime failures,
/// 2 on usage, config or input-format errors.
int run_cli(int argc, const char* const* argv);

}  // namespace bsr
