#pragma once

// sdfc: check, graph, project, run, run-dist, verify.
//
// Exit codes: 0 success, 1 diagnostics (parse, typing, projection),
// 2 runtime error, 3 equivalence mismatch, 64 usage error.

#include <ostream>

namespace sdf {

enum ExitCode { kExitOk = 0, kExitDiagnostics = 1, kExitRuntime = 2, kExitMismatch = 3, kExitUsage = 64 };

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdf
