#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "trsqp/types.hpp"

namespace trsqp {

/// Malformed LIBSVM input; message carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(long line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Dense dataset with labels in {-1, +1}. Feature indices are 1-based in
/// LIBSVM files and 0-based in memory; labels in {0, 1} are remapped to
/// {-1, +1} on load.
struct Dataset {
  Index n_samples = 0;
  Index dim = 0;
  Matrix features;  // n_samples x dim
  Vector labels;    // entries in {-1, +1}
};

/// Parses LIBSVM text ("<label> <idx>:<val> ..."), tolerating blank lines,
/// trailing whitespace, and CRLF endings. dim_hint widens the feature space
/// beyond the largest index seen.
Dataset parse_libsvm(const std::string& path, std::optional<Index> dim_hint = std::nullopt);

/// Same parser over an in-memory string (used by tests and the round-trip
/// property).
Dataset parse_libsvm_text(const std::string& text, std::optional<Index> dim_hint = std::nullopt);

/// Serializes to LIBSVM text with round-trip-exact decimal encoding; zeros
/// are skipped as the format intends.
std::string write_libsvm_text(const Dataset& data);
void write_libsvm(const Dataset& data, const std::string& path);

}  // namespace trsqp
