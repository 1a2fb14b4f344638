#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace spwd {

using TaskId = int;
using MachineId = int;
using VertexId = int;
using EdgeId = int;
using NodeId = int;

inline constexpr VertexId kNoVertex = -1;
inline constexpr NodeId kNoNode = -1;

// Absolute tolerance for every time/cost feasibility comparison.
inline constexpr double kTolerance = 1e-9;

inline constexpr std::size_t kDefaultPathCap = 10'000'000;

enum class ErrorKind {
  parse,
  invalid_input,
  cycle,
  not_series_parallel,
  path_explosion,
  space_too_large,
  missing_subschedule,
  infeasible_merge,
  bound_violation,
  config,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse error";
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::cycle: return "cycle detected";
    case ErrorKind::not_series_parallel: return "graph is not series-parallel";
    case ErrorKind::path_explosion: return "path explosion";
    case ErrorKind::space_too_large: return "search space too large";
    case ErrorKind::missing_subschedule: return "missing subschedule";
    case ErrorKind::infeasible_merge: return "merged schedule infeasible";
    case ErrorKind::bound_violation: return "size bound violated";
    case ErrorKind::config: return "configuration error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Path counter that saturates instead of wrapping.
struct PathCount {
  static constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

  std::uint64_t value = 0;
  bool saturated = false;

  friend PathCount operator+(PathCount a, PathCount b) {
    PathCount r;
    r.saturated = a.saturated || b.saturated;
    if (a.value > kMax - b.value) {
      r.value = kMax;
      r.saturated = true;
    } else {
      r.value = a.value + b.value;
    }
    return r;
  }

  friend PathCount operator*(PathCount a, PathCount b) {
    PathCount r;
    r.saturated = a.saturated || b.saturated;
    if (a.value != 0 && b.value > kMax / a.value) {
      r.value = kMax;
      r.saturated = true;
    } else {
      r.value = a.value * b.value;
    }
    return r;
  }

  friend bool operator==(const PathCount&, const PathCount&) = default;
};

}  // namespace spwd
