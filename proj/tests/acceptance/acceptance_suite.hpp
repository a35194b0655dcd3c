#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ncres::acceptance {

enum class Status { kPass, kFail, kDegraded };

struct CriterionResult {
  std::string id;
  std::string title;
  Status status = Status::kFail;
  std::string measured;
  double seconds = 0.0;
  double budget = 0.0;  // seconds
};

struct SuiteOptions {
  std::uint64_t seed = 20240611;
  double k_scale = 1.0;  // multiplies every truncation radius
  unsigned threads = 1;
  bool check_runtime = true;
  std::vector<std::string> only;  // empty: everything
};

std::vector<std::string> criterion_ids();

// Runs the criteria in order; each result is also written to `live` as soon as it is known.
std::vector<CriterionResult> run_suite(const SuiteOptions& opt, std::ostream* live = nullptr, bool with_time = true);

std::string format_line(const CriterionResult& r, bool with_time);
std::string to_string(Status s);

// 0 all pass, 2 degraded but nothing failed, 1 otherwise
int exit_code(const std::vector<CriterionResult>& results);

}  // namespace ncres::acceptance
