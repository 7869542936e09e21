#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace irgraph {

// Base class for every error the library throws. `code()` is a stable,
// machine-readable tag used by the CLI to pick exit codes.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

class SyntaxError : public Error {
public:
  SyntaxError(std::size_t line, std::size_t col, const std::string& expected,
              const std::string& found)
      : Error("syntax-error", "line " + std::to_string(line) + ":" +
                                  std::to_string(col) + ": expected " +
                                  expected + ", found " + found),
        line_(line), col_(col), expected_(expected), found_(found) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t col() const noexcept { return col_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

private:
  std::size_t line_;
  std::size_t col_;
  std::string expected_;
  std::string found_;
};

class UnsupportedConstruct : public Error {
public:
  UnsupportedConstruct(std::string construct, std::size_t line)
      : Error("unsupported-construct",
              "unsupported construct '" + construct + "' at line " +
                  std::to_string(line)),
        construct_(std::move(construct)), line_(line) {}

  const std::string& construct() const noexcept { return construct_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string construct_;
  std::size_t line_;
};

class UnresolvedReference : public Error {
public:
  explicit UnresolvedReference(const std::string& identifier)
      : Error("unresolved-reference",
              "unresolved reference to '" + identifier + "'"),
        identifier_(identifier) {}

  const std::string& identifier() const noexcept { return identifier_; }

private:
  std::string identifier_;
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error("io-error", what) {}
};

class FormatError : public Error {
public:
  explicit FormatError(const std::string& what) : Error("format-error", what) {}
};

class ShapeMismatch : public Error {
public:
  explicit ShapeMismatch(const std::string& what)
      : Error("shape-mismatch", what) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& what)
      : Error("dimension-mismatch", what) {}
};

class FeatureOverflow : public Error {
public:
  explicit FeatureOverflow(const std::string& what)
      : Error("feature-overflow", what) {}
};

class NonFiniteLoss : public Error {
public:
  explicit NonFiniteLoss(const std::string& what)
      : Error("non-finite-loss", what) {}
};

class InternalInconsistency : public Error {
public:
  explicit InternalInconsistency(const std::string& what)
      : Error("internal-inconsistency", what) {}
};

class ContextOverflow : public Error {
public:
  explicit ContextOverflow(const std::string& what)
      : Error("context-overflow", what) {}
};

class EmptyGraph : public Error {
public:
  explicit EmptyGraph(const std::string& what) : Error("empty-graph", what) {}
};

class EmptyInput : public Error {
public:
  explicit EmptyInput(const std::string& what) : Error("empty-input", what) {}
};

class DegenerateLabels : public Error {
public:
  explicit DegenerateLabels(const std::string& what)
      : Error("degenerate-labels", what) {}
};

class UnpairedSample : public Error {
public:
  explicit UnpairedSample(const std::string& what)
      : Error("unpaired-sample", what) {}
};

class CannotAblateModule : public Error {
public:
  CannotAblateModule() : Error("cannot-ablate-module",
                               "the module node kind cannot be ablated") {}
};

class SerializationOverflow : public Error {
public:
  explicit SerializationOverflow(const std::string& what)
      : Error("serialization-overflow", what) {}
};

}  // namespace irgraph
