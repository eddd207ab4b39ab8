#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "condfield/common.hpp"

namespace condfield {

struct CheckOptions {
  Tolerances tol{};
  /// Identity evaluations before a check switches to deterministic
  /// stratified sampling.
  std::uint64_t work_budget = 10'000'000;
  /// Session seed driving every sampled decision.
  std::uint64_t seed = 0;
  /// Slack for the in/sup sandwich, which holds exactly in real arithmetic.
  double sullivan_slack = 1e-12;
};

/// Outcome of one numerical check. `passed` holds exactly when
/// worst_violation <= tolerance and no structural defect was found; the
/// witness names the key realizing the worst violation.
struct Report {
  std::string check_name;
  bool passed = true;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  std::optional<std::string> witness;
  std::uint64_t count_checked = 0;
  bool sampled = false;
  std::string note;
};

}  // namespace condfield
