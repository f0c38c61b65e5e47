#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace maxcut {

// All numeric work is done in 64-bit floats; feature matrices are row-major
// so that per-node rows are contiguous during sparse message passing.
using Scalar = double;
using Index = Eigen::Index;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Relaxed per-node probabilities, entries in [0,1].
using SoftAssignment = Vector;

// Binary side assignment, entries in {0,1}.
using CutAssignment = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

// Seed for every randomized operation. Same seed + same inputs gives
// bit-identical results.
struct RngSeed {
  std::uint64_t value = 0;
};

// Malformed instance file; line is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Random graph construction exhausted its restart budget.
class GenerationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values or an undefined normalization during training.
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace maxcut
