#pragma once

#include <stdexcept>
#include <string>

namespace kvn {

enum class errc {
    invalid_dimension,
    invalid_range,
    grid_mismatch,
    bad_weights,
    memory_guard,
    stability_budget_exceeded,
    trajectory_escape,
    mass_conservation,
    mask_violation,
    unsupported,
    corrupt_header,
    io_failure,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_dimension: return "invalid-dimension";
        case errc::invalid_range: return "invalid-range";
        case errc::grid_mismatch: return "grid-mismatch";
        case errc::bad_weights: return "bad-weights";
        case errc::memory_guard: return "memory-guard";
        case errc::stability_budget_exceeded: return "stability-budget-exceeded";
        case errc::trajectory_escape: return "trajectory-escape";
        case errc::mass_conservation: return "mass-conservation";
        case errc::mask_violation: return "mask-violation";
        case errc::unsupported: return "unsupported";
        case errc::corrupt_header: return "corrupt-header";
        case errc::io_failure: return "io-failure";
    }
    return "unknown";
}

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

}  // namespace kvn
