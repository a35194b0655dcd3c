#include <iostream>

#include "CLI11.hpp"
#include "acceptance_suite.hpp"

int main(int argc, char** argv) {
  ncres::acceptance::SuiteOptions opt;
  CLI::App app{"acceptance criteria"};
  app.add_option("--seed", opt.seed, "random seed");
  app.add_option("--k-scale", opt.k_scale, "scale factor for truncation radii");
  app.add_option("--threads", opt.threads, "worker threads");
  app.add_option("--only", opt.only, "run only these criteria (AC1 ...)");
  bool no_time = false;
  app.add_flag("--no-time", no_time, "omit timings, do not enforce runtime budgets");
  CLI11_PARSE(app, argc, argv);
  opt.check_runtime = !no_time;
  auto res = ncres::acceptance::run_suite(opt, &std::cout, !no_time);
  int passed = 0;
  for (const auto& r : res) passed += r.status == ncres::acceptance::Status::kPass;
  std::cout << passed << "/" << res.size() << " criteria passed" << std::endl;
  return ncres::acceptance::exit_code(res);
}
