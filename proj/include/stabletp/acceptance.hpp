#pragma once

#include "stabletp/precision.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace stabletp::acceptance {

inline constexpr int criterion_count = 13;

struct AcceptanceConfig {
  std::uint64_t seed = 1234;
  Precision precision{};  // working digits of the determinant searches; witnesses confirmed at +30
  bool quick = false;     // restrict run_suite to the quick subset
};

struct CriterionResult {
  int id;
  std::string name;
  bool passed;
  nlohmann::ordered_json measured;  // measured values only, no timings, so output is reproducible
};

std::string criterion_name(int id);

// Criteria run by run_suite in quick mode.
std::vector<int> quick_subset();

// Runs one criterion (1..criterion_count). Numerical exceptions inside a criterion are caught and
// reported as a failure with the message in `measured`.
CriterionResult run_criterion(int id, const AcceptanceConfig& cfg);

// Every criterion, or the quick subset, in id order.
std::vector<CriterionResult> run_suite(const AcceptanceConfig& cfg);

// {"seed", "digits", "quick", "criteria": [...], "passed", "failed"}
nlohmann::ordered_json summary(const std::vector<CriterionResult>& results, const AcceptanceConfig& cfg);

}  // namespace stabletp::acceptance
