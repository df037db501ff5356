#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ehdec {

// Invalid scenario or configuration document. `field` is a dotted path
// (e.g. "network.p_b[1]") when the error can be attributed to one field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Raised when a joint decision-rule enumeration would exceed the cap.
class EnumerationCapExceeded : public std::length_error {
 public:
  EnumerationCapExceeded(long double cardinality, std::uint64_t cap)
      : std::length_error("decision rule enumeration has " +
                          std::to_string(static_cast<double>(cardinality)) +
                          " elements, cap is " + std::to_string(cap)),
        cardinality_(cardinality),
        cap_(cap) {}

  long double cardinality() const noexcept { return cardinality_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  long double cardinality_;
  std::uint64_t cap_;
};

}  // namespace ehdec
