#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lfm {

// Stable error codes. The CLI prints the code name on the diagnostic stream
// and maps StoreIo to exit code 2, everything else to exit code 1.
enum class Errc {
  empty_dataset,
  zero_evidence,
  malformed_row,
  invalid_direction,
  store_io,
  length_mismatch,
  empty_matrix,
  invalid_config,
};

constexpr const char* errc_name(Errc code) {
  switch (code) {
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::zero_evidence: return "ZeroEvidence";
    case Errc::malformed_row: return "MalformedRow";
    case Errc::invalid_direction: return "InvalidDirection";
    case Errc::store_io: return "StoreIo";
    case Errc::length_mismatch: return "LengthMismatch";
    case Errc::empty_matrix: return "EmptyMatrix";
    case Errc::invalid_config: return "InvalidConfig";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::size_t line = 0)
      : std::runtime_error(compose(code, message, line)), code_(code), line_(line) {}

  Errc code() const { return code_; }

  // 1-based input line for row-scoped errors, 0 otherwise.
  std::size_t line() const { return line_; }

  bool is_io() const { return code_ == Errc::store_io; }

 private:
  static std::string compose(Errc code, const std::string& message, std::size_t line) {
    std::string out = errc_name(code);
    if (line > 0) {
      out += ": line ";
      out += std::to_string(line);
    }
    if (!message.empty()) {
      out += ": ";
      out += message;
    }
    return out;
  }

  Errc code_;
  std::size_t line_;
};

}  // namespace lfm
