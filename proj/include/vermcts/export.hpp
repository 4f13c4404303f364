// Copyright 2026 The VerMCTS Authors
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

#ifndef VERMCTS_EXPORT_HPP_
#define VERMCTS_EXPORT_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vermcts/harness.hpp"

namespace vermcts {

inline constexpr const char* kCurveCsvHeader = "problem,method,T,pass_rate,wilson_lo,wilson_hi";
inline constexpr const char* kTreeCsvHeader = "problem,tokens,nodes,depth,width";

std::string curves_csv(std::span<const PassCurve> curves);
std::string tree_stats_csv(std::span<const TreeStatPoint> series);

/// Line chart of every curve of one problem, Wilson bands shaded.
std::string curves_svg(std::span<const PassCurve> curves, const std::string& problem);

/// Writes curves.csv and tree_stats.csv into \p out_dir, plus one
/// pass_at_T_<problem>.svg per problem when \p plot is set. Returns the
/// written paths. I/O failures throw std::runtime_error.
std::vector<std::filesystem::path> export_curves(std::span<const PassCurve> curves,
                                                 std::span<const TreeStatPoint> series,
                                                 const std::filesystem::path& out_dir,
                                                 bool plot);

}  // namespace vermcts

#endif  // VERMCTS_EXPORT_HPP_
