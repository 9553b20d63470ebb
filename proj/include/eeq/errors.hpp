#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eeq {

/// Arithmetic left the host integer range. Raised instead of wrapping so
/// pairing-encoded values can never be silently corrupted.
class OverflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A checker needed a value outside the current (stage, bound) scope.
/// Carries the minimal bound that would have sufficed.
class ScopeError : public std::runtime_error {
public:
  ScopeError(const std::string& msg, std::uint64_t need_n)
      : std::runtime_error(msg + " (need n >= " + std::to_string(need_n) + ")"),
        need_n_(need_n) {}

  std::uint64_t need_n() const { return need_n_; }

private:
  std::uint64_t need_n_;
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// A stage construction was fed inputs that break its replay contract:
/// an anti-monotone schedule violated, a bound too small, a degenerate
/// surrogate. The message names the violated invariant.
class SurrogateViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace eeq
