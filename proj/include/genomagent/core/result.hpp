// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <variant>

namespace genomagent {

enum class Errc {
  InvalidArgument,
  ParseFailure,
  HttpError,
  MalformedResponse,
  RidNotFound,
  Timeout,
  JobFailed,
  BackendUnavailable,
  ScriptExhausted,
  CassetteMiss,
  FixtureMiss,
  Unclassifiable,
  AllSourcesFailed,
  ExtractionFailed,
  PipelineMismatch,
  ProgramInvalid,
  NoEvidence,
  BudgetExceeded,
  VariantMismatch,
  MissingTaskFile,
  GoldParseFailure,
  EmptyInput,
  IoError,
};

const char* errc_name(Errc code);

struct Error {
  Errc code;
  std::string message;
};

inline Error make_error(Errc code, std::string message) {
  return Error{code, std::move(message)};
}

/// Value-or-error return type used across the project. Holds either a T or
/// an Error; accessing the wrong alternative is a programming error.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(Error error) : state_(std::move(error)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<T>(state_); }
  const T& value() const& { return std::get<T>(state_); }
  T&& value() && { return std::get<T>(std::move(state_)); }

  const Error& error() const { return std::get<Error>(state_); }

  T value_or(T fallback) const {
    return ok() ? std::get<T>(state_) : std::move(fallback);
  }

 private:
  std::variant<T, Error> state_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error error) : error_(std::move(error)), failed_(true) {}

  bool ok() const { return !failed_; }
  explicit operator bool() const { return ok(); }
  const Error& error() const { return error_; }

 private:
  Error error_{};
  bool failed_ = false;
};

}  // namespace genomagent
