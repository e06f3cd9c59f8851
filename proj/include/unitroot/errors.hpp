#pragma once

#include <stdexcept>
#include <string>

namespace ur {

// A verification that compared two independent computations and found them different.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Working precision or truncation too small to certify the requested digits.
struct PrecisionExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line = 0, int column = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg : msg),
        line(line),
        column(column) {}
  int line;
  int column;
};

}  // namespace ur
