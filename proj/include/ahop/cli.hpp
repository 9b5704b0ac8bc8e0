#pragma once

namespace ahop {

/// Batch entry point behind the `ahop` binary; exposed for in-process tests.
/// Exit codes: 0 success, 2 config/schema, 3 invariant violation, 4 IO.
int run_cli(int argc, const char* const* argv);

}  // namespace ahop
