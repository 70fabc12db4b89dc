// Copyright 2026 The trkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built-in invariant suite for the decomposed attention kernels. Used by
// the `dattn-check` subcommand.

#ifndef TRKIT_DATTN_CHECK_HPP_
#define TRKIT_DATTN_CHECK_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trkit/dattn.hpp"

namespace trkit::dattn {

using TextKernel = std::function<Vector(
    std::size_t, const TokenSequence&, const ProjectionWeights&,
    const AttentionConfig&)>;

struct CheckOptions {
  int seeds = 20;
  std::vector<int> dims = {8, 16, 32};
  MixMode mode = MixMode::kAdaptive;
  std::uint64_t base_seed = 0;
  // Kernel checked against the monolithic reference. Defaults to the
  // decomposition selected by `mode`; tests substitute faulty kernels.
  TextKernel kernel;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  std::optional<std::uint64_t> failing_seed;
};

struct ScalingMeasurement {
  std::string kernel;
  std::int64_t frames = 0;
  std::int64_t tokens_per_frame = 0;
  std::uint64_t score_ops = 0;
};

struct CheckReport {
  std::vector<CheckResult> checks;
  std::vector<ScalingMeasurement> scaling;

  bool all_passed() const;
};

CheckReport run_dattn_checks(const CheckOptions& options);

std::string format_check_report(const CheckReport& report);

}  // namespace trkit::dattn

#endif  // TRKIT_DATTN_CHECK_HPP_
