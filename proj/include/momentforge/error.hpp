#ifndef MOMENTFORGE_ERROR_HPP
#define MOMENTFORGE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace momentforge {

enum class ErrorKind {
  dimension,       // shape mismatch, non-square where square required
  structure,       // non-Hermitian where Hermitian required
  length,          // not enough moments / parameters / indices out of range
  conditioning,    // singular block where an inverse is required
  domain,          // evaluation point outside the domain (pole, z = 0, ...)
  scope,           // operation only defined for a subcase (e.g. q = 1)
  classification,  // input not in the required moment-sequence class
  moment_mismatch, // measure does not reproduce the prescribed moments
  not_stieltjes,   // rational function is not a Stieltjes transform
  parse            // malformed JSON or file content
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::structure: return "structure";
    case ErrorKind::length: return "length";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::domain: return "domain";
    case ErrorKind::scope: return "scope";
    case ErrorKind::classification: return "classification";
    case ErrorKind::moment_mismatch: return "moment_mismatch";
    case ErrorKind::not_stieltjes: return "not_stieltjes";
    case ErrorKind::parse: return "parse";
  }
  return "unknown";
}

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace momentforge

#endif  // MOMENTFORGE_ERROR_HPP
