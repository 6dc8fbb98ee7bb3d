#pragma once

// Self-check suites run by `hyperperc verify`. Each check is a named
// invariant; a suite passes when all of its checks pass.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hyperperc::verify {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool passed() const;
};

struct Options {
  std::uint64_t seed = 1;
  // Name of a deliberate fault to inject, for testing the harness itself.
  // "oracle-constant" perturbs the tree susceptibility closed form.
  std::optional<std::string> fault;
};

const std::vector<std::string>& suite_names();  // without "all"

// Throws InvalidArgument for an unknown suite or fault name.
std::vector<SuiteReport> run(const std::string& suite, const Options& options = {});

nlohmann::json to_json(const std::vector<SuiteReport>& reports);

}  // namespace hyperperc::verify
