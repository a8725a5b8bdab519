#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace smcsim {

enum class ErrorKind {
  config,
  degenerate_parameters,
  control_singularity,
  simulation_diverged,
  tuning_failed,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure the toolkit reports. `time()` is set for
/// failures that happen at a known simulation instant.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<double> time = std::nullopt)
      : std::runtime_error(message), kind_(kind), time_(time) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> time() const noexcept { return time_; }

 private:
  ErrorKind kind_;
  std::optional<double> time_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorKind::config, message) {}
};

class DegenerateParameters : public Error {
 public:
  explicit DegenerateParameters(const std::string& message)
      : Error(ErrorKind::degenerate_parameters, message) {}
};

class ControlSingularity : public Error {
 public:
  explicit ControlSingularity(const std::string& message,
                              std::optional<double> time = std::nullopt)
      : Error(ErrorKind::control_singularity, message, time) {}
};

class SimulationDiverged : public Error {
 public:
  SimulationDiverged(const std::string& message, double time)
      : Error(ErrorKind::simulation_diverged, message, time) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

}  // namespace smcsim
