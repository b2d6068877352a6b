#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdf/ast.hpp"

namespace sdf {

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value() && diagnostics.empty(); }
};

/// Parse a whole source file. Never throws; failures come back as
/// diagnostics (SYN001 syntax, SYN002 duplicate pattern variable,
/// SYN003 duplicate node, SYN004 application outside an equation).
ParseResult parse_program(std::string_view text);

/// Convenience for tests and tools: throws CompileError on failure.
Program parse_or_throw(std::string_view text);

/// Read a file (or "-" for standard input).
std::string read_source(const std::string& path);

}  // namespace sdf
