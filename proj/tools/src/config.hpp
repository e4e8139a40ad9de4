// Copyright 2026 The qnd Authors
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

#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnd/ensemble_geometry.hpp"
#include "qnd/geometry_scan.hpp"
#include "qnd/sme_oracle.hpp"

namespace qnd::cli {

using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "qnd/1";

/// Bad configuration or flags; maps to the validation exit code.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json default_config();

/// Defaults, then the file (if any), then each key=value override.
json resolve_config(const std::string& path, const std::vector<std::string>& sets);

/// Applies one dotted-path override; the value is parsed as JSON when possible.
void apply_override(json& config, const std::string& assignment);

/// Rejects keys that are not in the default schema.
void check_keys(const json& config);

struct Resolved {
  AtomicSpecies species;
  BeamParameters beam;
  double wavelength = kDefaultWavelength;
  double sigma_perp = 0.0;
  double sigma_z = 0.0;
  Constraint constraint;
  DynamicsSettings dynamics;
};

/// Species, beam and dynamics blocks; cloud closure when `need_cloud`.
Resolved resolve_common(const json& config, bool need_cloud);

/// Exactly one of cloud.eta0_cm3, cloud.N, cloud.od_eff.
Constraint resolve_constraint(const json& cloud);

ScanSpec resolve_scan(const json& config);

struct OracleRun {
  std::vector<double> weights;
  OracleConfig config;
  int trajectories = 0;
  std::uint64_t seed = 0;
};
OracleRun resolve_oracle(const json& config);

}  // namespace qnd::cli
