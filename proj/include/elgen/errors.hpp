#pragma once

#include <stdexcept>
#include <string>

namespace elgen {

// Domain errors carry a stable code so the CLI can map them to exit codes
// (0 ok, 1 usage, 2 domain).
enum class errc {
    dimension_mismatch,
    ring_mismatch,
    not_invertible,
    not_unimodular,
    length_too_short,
    not_in_sl,
    malformed_input,
    stack_not_unimodular,
    delta_not_below_epsilon,
    undecidable,
    unsupported,
};

class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

} // namespace elgen
