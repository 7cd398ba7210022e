#pragma once

#include <stdexcept>
#include <string>

namespace swiperec {

enum class ErrorKind {
  Validation,  // malformed input, broken invariant
  NotFound,    // unknown user/product/resource
  Store,       // storage failure, retriable
  Config,      // bad configuration or arguments
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace swiperec
