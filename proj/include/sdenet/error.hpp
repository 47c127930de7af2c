#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sdenet {

// Error carrying a short machine-readable code ("not-stable", "bad-subsampling", ...)
// alongside the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace sdenet
