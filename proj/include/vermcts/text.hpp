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

#ifndef VERMCTS_TEXT_HPP_
#define VERMCTS_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vermcts {

/// Number of maximal runs of non-whitespace characters.
std::size_t whitespace_token_count(std::string_view text);

/// Length of the shortest prefix of `text` holding its first `k` whitespace
/// tokens (the whole text if it has at most k tokens).
std::size_t prefix_with_tokens(std::string_view text, std::size_t k);

/// Lines that contain at least one non-whitespace character.
std::size_t count_nonblank_lines(std::string_view text);

bool is_blank(std::string_view text);
std::string_view trim(std::string_view text);

/// Script records are one chunk per line with \n, \t, \r and \\ escapes.
std::string escape_record(std::string_view raw);
std::string unescape_record(std::string_view record);

/// 64-bit FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// Deterministic draws that do not depend on the standard library's
/// implementation-defined distributions.
template <typename Rng>
std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

template <typename Rng>
double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace vermcts

#endif  // VERMCTS_TEXT_HPP_
