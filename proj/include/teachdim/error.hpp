#pragma once

#include <stdexcept>
#include <string>

namespace teachdim {

// Machine-readable error codes. The CLI reports these verbatim.
namespace errc {
inline constexpr const char* dimension_mismatch = "dimension_mismatch";
inline constexpr const char* non_finite = "non_finite";
inline constexpr const char* invalid_matrix = "invalid_matrix";
inline constexpr const char* invalid_lambda = "invalid_lambda";
inline constexpr const char* invalid_label = "invalid_label";
inline constexpr const char* invalid_target = "invalid_target";
inline constexpr const char* invalid_option = "invalid_option";
inline constexpr const char* domain_error = "domain_error";
inline constexpr const char* zero_target = "zero_target";
inline constexpr const char* non_identity_regularizer = "non_identity_regularizer";
inline constexpr const char* boundary_unsupported = "boundary_unsupported";
inline constexpr const char* not_applicable = "not_applicable";
inline constexpr const char* vacuous_experiment = "vacuous_experiment";
inline constexpr const char* io_error = "io_error";
inline constexpr const char* parse_error = "parse_error";
}  // namespace errc

class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace teachdim
