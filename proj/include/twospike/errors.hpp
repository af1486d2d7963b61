#pragma once

#include <stdexcept>
#include <string>

namespace twospike {

enum class errc {
  domain,             // argument outside its documented range
  regime_violation,   // parameters outside the regime the routine supports
  block_mismatch,     // block count does not divide the bulk dimension
  dimension_mismatch,
  k_too_small,        // discretization too coarse to admit an interior solution
  sampler_stall,      // rejection sampler exhausted its retry budget
  empty_selection,    // a filter or window matched nothing
};

inline const char* errc_name(errc c) noexcept {
  switch (c) {
    case errc::domain: return "DOMAIN";
    case errc::regime_violation: return "REGIME_VIOLATION";
    case errc::block_mismatch: return "BLOCK_MISMATCH";
    case errc::dimension_mismatch: return "DIMENSION_MISMATCH";
    case errc::k_too_small: return "K_TOO_SMALL";
    case errc::sampler_stall: return "SAMPLER_STALL";
    case errc::empty_selection: return "EMPTY_SELECTION";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace twospike
