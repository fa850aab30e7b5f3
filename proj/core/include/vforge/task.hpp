#pragma once

// Line-oriented task files.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/chart.hpp"
#include "vforge/poly.hpp"
#include "vforge/reduction.hpp"
#include "vforge/value_group.hpp"

namespace vforge {

enum class TaskKind { Monomialize, Principalize, Fraction, Dominate, Reduce, Expand, Uniformize, Verify };

std::string to_string(TaskKind kind);
std::optional<TaskKind> parse_task_kind(std::string_view text);

struct NamedPoly {
  std::string name;
  Poly poly;
  int line = 0;
};

struct Task {
  TaskKind kind = TaskKind::Monomialize;
  FramePtr frame;
  std::optional<Chart> chart;
  CoefficientField field = CoefficientField::rationals();
  int level = 1;
  std::vector<NamedPoly> polys;
  std::vector<NamedPoly> relations;
  std::vector<BranchChoice> branches;
  std::size_t order = 10;
  std::size_t max_steps = 1'000'000;
  std::string log_path;

  const Chart& initial_chart() const { return *chart; }
  BranchPolicy branch_policy() const { return {branches, {}}; }
};

/// Parses a task file. Errors carry the 1-based line and column.
Task parse_task(std::string_view text);

}  // namespace vforge
