#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fsfcpt {

// Rejected physical or configuration parameters.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Linear-algebra breakdown: singular or ill-conditioned system.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Time integration could not reach a usable steady state.
class convergence_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carries every issue found while validating a scan configuration, so a
// caller can report all of them at once instead of fixing one at a time.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& e : v) {
      if (!s.empty()) s += "; ";
      s += e;
    }
    return s;
  }

  std::vector<std::string> issues_;
};

}  // namespace fsfcpt
