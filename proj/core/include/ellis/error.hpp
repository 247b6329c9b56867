#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ellis {

enum class ErrorCode {
  unknown_name,
  invalid_parameter,
  out_of_range,
  negative_power_on_noninvertible,
  empty_set,
  empty_basis,
  budget_exceeded,
  rule_undefined,
  length_mismatch,
  preimages_unavailable,
  bad_spec,
  invalid_config,
  io_failure,
  no_pairing_found,
  singleton_escape,
  invariant_violation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ellis
