#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace socnav::check {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string stats;  // JSON fragment with per-check numbers
};

struct SuiteOptions {
  std::uint64_t seed = 20240915;
  bool inject_cantelli_bug = false;  // mutation: c(p) -> p/(1-p)

  int planted_count = 200;
  int planted_max_dim = 25;
  int planted_max_cones = 8;
  int split_count = 50;
  int epigraph_count = 30;
  int scaling_count = 40;
  int moment_instances = 20;
  std::size_t moment_samples = 100000;
  int cantelli_instances = 20;
  std::size_t cantelli_samples = 100000;
  int robust_instances = 20;
  std::size_t robust_samples = 10000;
  int reduction_states = 100;
  int monotone_instances = 20;
  int kernel_tuples = 100;
  int fd_states = 100;
  int frechet_pairs = 50;
};

/// All suite names, in execution order.
std::vector<std::string> suite_names();

/// Run every suite whose name starts with `selector` ("" or "all" runs
/// everything).  Each result carries machine-readable stats.
std::vector<CheckResult> run_suites(const std::string& selector,
                                    const SuiteOptions& options = {});

}  // namespace socnav::check
