#pragma once

// Batch front end: run a task, verify a log, fuzz the pipeline.

#include <cstddef>
#include <cstdint>
#include <stop_token>
#include <string>
#include <string_view>

#include "vforge/task.hpp"

namespace vforge::cli {

enum ExitCode : int { kSuccess = 0, kVerifyFailed = 1, kMathFailure = 2, kParseFailure = 3, kInternalFailure = 4 };

struct RunResult {
  int exit_code = kSuccess;
  std::string log;
  std::string report;
};

RunResult run_task(const Task& task, std::stop_token stop = {});

/// Parses and runs; parse errors become exit code 3 with the location in the report.
RunResult run_text(std::string_view task_text, std::stop_token stop = {});

struct VerifyResult {
  int exit_code = kSuccess;
  std::string reason;
};

VerifyResult verify_log(std::string_view log, const Task& task);
VerifyResult verify_text(std::string_view log, std::string_view task_text);

struct FuzzResult {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string summary;
};

/// Random tasks of every kind: each must run, verify and reproduce its log.
FuzzResult fuzz(std::uint64_t seed, std::size_t cases);

}  // namespace vforge::cli
