// Copyright 2026 The postfid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end.
//
//   postfid sweep      [--gate ns|cs] [--alpha A --beta B --gamma C]
//                      [--eta-start S --eta-end E --eta-steps N]
//                      [--format csv|json] [--out PATH] [--config FILE]
//   postfid cs-check   [--eta X ...] [--format csv|json] [--out PATH]
//   postfid pmax-demo
//   postfid validate
//
// Exit status: 0 success, 1 validation or domain failure, 2 usage error.
// POSTFID_TOL overrides the global numerical tolerance.

#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "postfid/fidelity.hpp"
#include "postfid/gates.hpp"

namespace postfid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Raised for bad command-line or configuration input.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SweepConfig {
  std::string gate = "ns";  // "ns" or "cs"
  double alpha = 1.0;       // NS amplitudes; normalised before use
  double beta = 1.0;
  double gamma = 1.0;
  double eta_start = 0.05;
  double eta_end = 1.0;
  int eta_steps = 20;
  std::string out;  // empty: standard output
  std::string format = "csv";
};

/// Throws UsageError unless 0 <= eta_start <= eta_end <= 1, eta_steps >= 1,
/// gate and format are known and the amplitudes are not all zero.
void check_config(const SweepConfig& config);

/// eta_steps evenly spaced points from eta_start to eta_end inclusive.
std::vector<double> eta_grid(const SweepConfig& config);

/// Reads the keys of SweepConfig from a JSON object into `config`. Throws
/// UsageError for unreadable files, malformed JSON or unknown keys.
void load_config_file(const std::string& path, SweepConfig& config);

/// One report per grid point, ordered by eta. Points are evaluated
/// concurrently.
std::vector<FidelityReport> run_sweep(const SweepConfig& config);

std::string format_csv(const std::vector<FidelityReport>& reports);
std::string format_json(const SweepConfig& config, const std::vector<FidelityReport>& reports);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidateOptions {
  /// Layout used for every NS gate built by the suite; the CLI can corrupt it
  /// to demonstrate that the sign-flip check catches a wrong convention.
  NsLayout ns_layout{};
};

/// POM completeness, retrodictive/predictive duality, two-path consistency,
/// P^max reference cases, NS sign flip, CS truth table and the fidelity chain.
std::vector<CheckResult> run_validation(const ValidateOptions& options = {});

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace postfid::cli
