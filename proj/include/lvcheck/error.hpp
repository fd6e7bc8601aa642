#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lvcheck {

enum class ErrorCode {
  MalformedXml,
  BadBounds,
  BadAttribute,
  MissingRoot,
  EmptyGui,
  TooManyNodes,
  InvalidClass,
  ShapeMismatch,
  NoLabeledNodes,
  NonFiniteLoss,
  InfeasibleSpec,
  UnknownComponent,
  EmptyCorpus,
  LengthMismatch,
  BadConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's exit-code logic) can branch on kind, not message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lvcheck
