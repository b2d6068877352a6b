#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sdf {

struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;
};

enum class Severity { Error, Warning };

/// A located compiler message. `code` is one of the stable tags listed in
/// README.md (SYN00x, ARCH00x, TYPE00x, PROJ00x, EVAL00x, DIST00x, RT00x).
struct Diagnostic {
  Severity severity = Severity::Error;
  SourceSpan span;
  std::string message;
  std::string code;
};

/// `file:line:col: code: message`
std::string format_diagnostic(const Diagnostic& d, const std::string& file);

/// Base of every error raised by the pipeline. Carries a stable code so that
/// tests and the CLI can dispatch on it without matching message text.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, SourceSpan span = {})
      : std::runtime_error(code + ": " + message), code_(std::move(code)),
        message_(message), span_(span) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  const SourceSpan& span() const noexcept { return span_; }

  Diagnostic to_diagnostic() const { return {Severity::Error, span_, message_, code_}; }

 private:
  std::string code_;
  std::string message_;
  SourceSpan span_;
};

/// Several diagnostics reported together (parse and type errors).
class CompileError : public std::runtime_error {
 public:
  explicit CompileError(std::vector<Diagnostic> diags)
      : std::runtime_error(diags.empty() ? "compile error" : diags.front().code + ": " + diags.front().message),
        diags_(std::move(diags)) {}

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

}  // namespace sdf
