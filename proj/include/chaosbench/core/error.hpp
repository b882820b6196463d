#pragma once

#include <stdexcept>
#include <string>

namespace chaosbench {

enum class ErrorKind {
  invalid_input,
  alias,
  unsupported_dimension,
  truncation,
  non_positive_density,
  degenerate_phase,
  config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define CHAOSBENCH_DEFINE_ERROR(Name, kind_value)                  \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(kind_value, what) {} \
  };

CHAOSBENCH_DEFINE_ERROR(InvalidInput, ErrorKind::invalid_input)
CHAOSBENCH_DEFINE_ERROR(AliasError, ErrorKind::alias)
CHAOSBENCH_DEFINE_ERROR(UnsupportedDimension, ErrorKind::unsupported_dimension)
CHAOSBENCH_DEFINE_ERROR(TruncationError, ErrorKind::truncation)
CHAOSBENCH_DEFINE_ERROR(NonPositiveDensity, ErrorKind::non_positive_density)
CHAOSBENCH_DEFINE_ERROR(DegeneratePhase, ErrorKind::degenerate_phase)
CHAOSBENCH_DEFINE_ERROR(ConfigError, ErrorKind::config)

#undef CHAOSBENCH_DEFINE_ERROR

}  // namespace chaosbench
