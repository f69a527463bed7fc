#pragma once

#include <stdexcept>
#include <string>

namespace eitprop {

// Bad arguments or violated preconditions in the numerical core.
class PhysicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment config failed schema validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eitprop
