#include "ellis/error.hpp"

namespace ellis {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::unknown_name: return "unknown-name";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::out_of_range: return "out-of-range";
    case ErrorCode::negative_power_on_noninvertible: return "negative-power-on-noninvertible";
    case ErrorCode::empty_set: return "empty-set";
    case ErrorCode::empty_basis: return "empty-basis";
    case ErrorCode::budget_exceeded: return "budget-exceeded";
    case ErrorCode::rule_undefined: return "rule-undefined-on-window";
    case ErrorCode::length_mismatch: return "length-mismatch";
    case ErrorCode::preimages_unavailable: return "preimages-unavailable";
    case ErrorCode::bad_spec: return "bad-spec";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::no_pairing_found: return "no-pairing-found";
    case ErrorCode::singleton_escape: return "singleton-escape";
    case ErrorCode::invariant_violation: return "invariant-violation";
  }
  return "unknown-error";
}

}  // namespace ellis
