#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ltgan {

enum class Errc {
  InvalidArgument,
  InvalidElements,
  NoConvergence,
  NearCollinear,
  NoFeasiblePair,
  AllLambertFailed,
  EmptyTofWindow,
  EmptyCatalog,
  ParseError,
  DegenerateFeature,
  DimensionMismatch,
  StaleCache,
  SingleClass,
  Diverged,
  TargetUnreachable,
  Io,
};

std::string_view to_string(Errc code);

// All library failures are reported through this type; `code()` lets callers
// branch on the failure kind (e.g. resample a pair on EmptyTofWindow).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ltgan
