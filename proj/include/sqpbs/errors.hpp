#pragma once

#include <stdexcept>
#include <string>

namespace sqpbs {

enum class AbortReason { EavesdroppingDetected, KeyEstablishmentFailed, MissingRecord };

const char* to_string(AbortReason reason);

/// A check failed and the run must stop. Protocol drivers record it in the
/// transcript rather than letting it escape.
class ProtocolAbort : public std::runtime_error {
 public:
  ProtocolAbort(AbortReason reason, const std::string& detail)
      : std::runtime_error(std::string(to_string(reason)) + ": " + detail), reason_(reason), detail_(detail) {}

  AbortReason reason() const { return reason_; }
  const std::string& detail() const { return detail_; }

 private:
  AbortReason reason_;
  std::string detail_;
};

/// A semiquantum party attempted an operation outside its capability set.
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sqpbs
