#ifndef WSNAUTH_ERRORS_HPP
#define WSNAUTH_ERRORS_HPP

#include <optional>
#include <string_view>
#include <utility>
#include <variant>

namespace wsnauth {

enum class Error {
  DecodeError,
  UnknownType,
  LengthMismatch,
  InvalidPoint,
  InvalidScalar,
  StaleTimestamp,
  ReplayDetected,
  BadMac,
  IdMismatch,
  UnknownSensor,
  BadAuthenticator,
  AlreadyRegistered,
  IdError,
  NotAccepted,
  UnknownEntity,
  NotFound,
  ExistingState,
  DuplicateId,
  IoError,
};

std::string_view to_string(Error e);

// Minimal value-or-error carrier. value() on an error (or error() on a
// value) throws std::bad_variant_access; call sites check ok() first.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error e) : v_(e) {}

  bool ok() const { return std::holds_alternative<T>(v_); }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<T>(v_); }
  const T& value() const& { return std::get<T>(v_); }
  T&& value() && { return std::get<T>(std::move(v_)); }
  Error error() const { return std::get<Error>(v_); }

 private:
  std::variant<T, Error> v_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error e) : e_(e) {}

  bool ok() const { return !e_.has_value(); }
  explicit operator bool() const { return ok(); }
  Error error() const { return *e_; }

 private:
  std::optional<Error> e_;
};

}  // namespace wsnauth

#endif
