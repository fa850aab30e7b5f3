#pragma once

// Text form of derivation steps as they appear in logs.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/chart.hpp"

namespace vforge {

inline constexpr std::string_view kLogHeader = "vforge-log 1";

/// `?` for unknown values.
std::string format_value(const std::optional<GroupValue>& v);
std::optional<GroupValue> parse_value(std::string_view text);

/// `step <n>: <kind> <payload> => <outputs>  # <annotation>`; `before` is the
/// chart the step applies to.
std::string format_step(const StepRecord& record, std::size_t number, const Chart& before);

struct LoggedStep {
  std::size_t number = 0;
  TransformStep step;
  std::string annotation;
  /// (name, value) of each output variable.
  std::vector<std::pair<std::string, std::optional<GroupValue>>> outputs;
};

/// Parses a step line against the chart it applies to. Throws ParseError.
LoggedStep parse_step(std::string_view line, const Chart& before, const CoefficientField& field,
                      std::size_t line_number);

/// Charts before and after every step: result[k] is the chart after k steps.
std::vector<Chart> replay_charts(const Derivation& d);

}  // namespace vforge
