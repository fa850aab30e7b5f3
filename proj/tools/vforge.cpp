// vforge command line: run task files, verify logs, fuzz the pipeline.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "vforge/errors.hpp"
#include "vforge/runner.hpp"
#include "vforge/task.hpp"

namespace fs = std::filesystem;
using namespace vforge;
using namespace vforge::cli;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

bool read_file(const fs::path& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Write to a sibling temporary, then rename over the target.
void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

struct Outcome {
  int code = kSuccess;
  std::string log;
  std::string report;
};

Outcome run_file(const fs::path& task_path, std::stop_token stop) {
  std::string text;
  if (!read_file(task_path, text)) return {kParseFailure, "", "cannot read " + task_path.string() + "\n"};
  Task task;
  try {
    task = parse_task(text);
  } catch (const Error& e) {
    return {kParseFailure, "", std::string("parse error: ") + e.what() + "\n"};
  }
  if (task.kind != TaskKind::Verify) {
    RunResult r = run_task(task, std::move(stop));
    return {r.exit_code, std::move(r.log), std::move(r.report)};
  }
  if (task.log_path.empty()) return {kParseFailure, "", "parse error: verify task needs a 'log:' line\n"};
  fs::path log_path = fs::path(task.log_path).is_absolute() ? fs::path(task.log_path)
                                                             : task_path.parent_path() / task.log_path;
  std::string log;
  if (!read_file(log_path, log)) return {kParseFailure, "", "cannot read " + log_path.string() + "\n"};
  VerifyResult v = verify_log(log, task);
  return {v.exit_code, "", "task: verify\nresult: " + std::string(v.exit_code == kSuccess ? "ok" : "failed") +
                               "\nreason: " + v.reason + "\n"};
}

int command_run(const std::vector<std::string>& files, const std::string& out_dir) {
  std::stop_source source;
  std::signal(SIGINT, on_interrupt);
  std::jthread watcher([&source](std::stop_token own) {
    while (!own.stop_requested()) {
      if (g_interrupted.load()) {
        source.request_stop();
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  });

  std::vector<Outcome> outcomes(files.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < files.size(); ++k) {
      workers.emplace_back([&, k] { outcomes[k] = run_file(files[k], source.get_token()); });
    }
  }
  watcher.request_stop();

  int worst = kSuccess;
  for (std::size_t k = 0; k < files.size(); ++k) {
    const fs::path task_path(files[k]);
    const Outcome& o = outcomes[k];
    fs::path dir = out_dir.empty() ? task_path.parent_path() : fs::path(out_dir);
    try {
      if (!dir.empty()) fs::create_directories(dir);
      const fs::path stem = dir / task_path.stem();
      if (!o.log.empty()) write_atomic(fs::path(stem).concat(".log"), o.log);
      write_atomic(fs::path(stem).concat(".report"), o.report);
    } catch (const std::exception& e) {
      std::cerr << files[k] << ": " << e.what() << "\n";
      worst = std::max(worst, static_cast<int>(kInternalFailure));
      continue;
    }
    std::cout << (files.size() > 1 ? files[k] + ":\n" : "") << o.report;
    worst = std::max(worst, o.code);
  }
  return worst;
}

int command_verify(const std::string& log_file, const std::string& task_file) {
  std::string log, task;
  if (!read_file(log_file, log)) {
    std::cerr << "cannot read " << log_file << "\n";
    return kParseFailure;
  }
  if (!read_file(task_file, task)) {
    std::cerr << "cannot read " << task_file << "\n";
    return kParseFailure;
  }
  VerifyResult v = verify_text(log, task);
  std::cout << (v.exit_code == kSuccess ? "ok" : "failed") << ": " << v.reason << "\n";
  return v.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vforge: valuation chart derivations with checkable logs"};
  app.require_subcommand(1);

  std::vector<std::string> task_files;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run task files and write <stem>.log and <stem>.report");
  run->add_option("tasks", task_files, "Task files (independent tasks run concurrently)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default: next to each task)");

  std::string log_file, task_file;
  auto* verify = app.add_subcommand("verify", "Replay a derivation log against its task");
  verify->add_option("log", log_file, "Derivation log")->required()->check(CLI::ExistingFile);
  verify->add_option("task", task_file, "Task file")->required()->check(CLI::ExistingFile);

  std::uint64_t seed = 1;
  std::size_t count = 200;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Run, verify and re-run random tasks");
  fuzz_cmd->add_option("--seed", seed, "Random seed")->required();
  fuzz_cmd->add_option("--count", count, "Number of cases")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kParseFailure;
  }

  try {
    if (*run) return command_run(task_files, out_dir);
    if (*verify) return command_verify(log_file, task_file);
    FuzzResult r = fuzz(seed, count);
    std::cout << r.summary;
    return r.failures == 0 ? kSuccess : kVerifyFailed;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalFailure;
  }
}
