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

#include <filesystem>
#include <string>

#include "config.hpp"

namespace qnd::cli {

struct Context {
  json config;
  std::filesystem::path out_dir;
};

void cmd_modes(const Context& ctx);
void cmd_effnums(const Context& ctx);
void cmd_simulate(const Context& ctx);
void cmd_scan(const Context& ctx);
void cmd_oracle(const Context& ctx);

}  // namespace qnd::cli
