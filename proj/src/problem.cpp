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

#include "vermcts/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "vermcts/errors.hpp"
#include "vermcts/text.hpp"

#ifndef VERMCTS_DEFAULT_SUITE
#define VERMCTS_DEFAULT_SUITE "problems"
#endif

namespace vermcts {

namespace {

[[noreturn]] void fail(std::string_view origin, std::size_t line, const std::string& message) {
  throw ProblemFormatError(std::string(origin) + ":" + std::to_string(line) + ": " + message);
}

std::vector<std::string_view> split_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool valid_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProblemFormatError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

void ProblemSpec::validate(std::string_view origin) const {
  const std::string where(origin);
  if (!valid_id(id)) throw ProblemFormatError(where + ": invalid or missing id '" + id + "'");
  if (is_blank(prompt)) throw ProblemFormatError(where + ": empty prompt");
  if (is_blank(effective_check_lemma()))
    throw ProblemFormatError(where + ": no check_lemma");
  if (completion_sentinel && completion_sentinel->empty())
    throw ProblemFormatError(where + ": completion_sentinel must not be empty");
}

ProblemSpec parse_problem(std::string_view content, std::string_view origin) {
  ProblemSpec p;
  bool have_language = false;
  std::string* block = nullptr;
  std::string hints_text;
  std::set<std::string> seen_blocks;
  std::size_t line_no = 0;

  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (line.starts_with("=== ")) {
      const std::string name(trim(line.substr(4)));
      if (!seen_blocks.insert(name).second) fail(origin, line_no, "duplicate block '" + name + "'");
      if (name == "prompt") block = &p.prompt;
      else if (name == "hints") block = &hints_text;
      else if (name == "check_lemma") block = &p.check_lemma;
      else if (name == "check_lemma_override") block = &p.check_lemma_override;
      else fail(origin, line_no, "unknown block '" + name + "'");
      continue;
    }
    if (block != nullptr) {
      block->append(line);
      block->push_back('\n');
      continue;
    }
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string_view::npos) fail(origin, line_no, "expected 'key: value'");
    const std::string key(trim(t.substr(0, colon)));
    const std::string value(trim(t.substr(colon + 1)));
    if (key == "id") {
      p.id = value;
    } else if (key == "language") {
      try {
        p.language = parse_language(value);
      } catch (const std::exception& e) {
        fail(origin, line_no, e.what());
      }
      have_language = true;
    } else if (key == "proof_marker") {
      p.proof_marker = value;
    } else if (key == "min_lines") {
      char* end = nullptr;
      const long long v = std::strtoll(value.c_str(), &end, 10);
      if (value.empty() || *end != '\0' || v < 0)
        fail(origin, line_no, "min_lines must be a non-negative integer");
      p.min_lines = static_cast<std::size_t>(v);
    } else if (key == "completion_sentinel") {
      p.completion_sentinel = value;
    } else {
      fail(origin, line_no, "unknown key '" + key + "'");
    }
  }

  auto trim_trailing_blank_lines = [](std::string& s) {
    while (s.size() >= 2 && s[s.size() - 1] == '\n' && s[s.size() - 2] == '\n') s.pop_back();
    if (s == "\n") s.clear();
  };
  trim_trailing_blank_lines(p.prompt);
  trim_trailing_blank_lines(p.check_lemma);
  trim_trailing_blank_lines(p.check_lemma_override);
  for (std::string_view h : split_lines(hints_text))
    if (!is_blank(h)) p.hints.emplace_back(h);

  if (!have_language) throw ProblemFormatError(std::string(origin) + ": missing language");
  p.validate(origin);
  return p;
}

ProblemSpec load_problem(const std::filesystem::path& path) {
  return parse_problem(read_file(path), path.string());
}

std::vector<ProblemSpec> load_suite(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) return {load_problem(path)};
  if (!std::filesystem::is_directory(path, ec))
    throw ConfigError("problem suite not found: " + path.string());

  std::vector<std::filesystem::path> files;
  const auto index = path / "suite.txt";
  if (std::filesystem::exists(index, ec)) {
    const std::string content = read_file(index);
    for (std::string_view line : split_lines(content)) {
      const std::string_view t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      files.push_back(path / std::string(t));
    }
  } else {
    for (const auto& entry : std::filesystem::recursive_directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".problem")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  }

  std::vector<ProblemSpec> suite;
  std::set<std::string> ids;
  for (const auto& f : files) {
    ProblemSpec p = load_problem(f);
    if (!ids.insert(p.id).second)
      throw ProblemFormatError(f.string() + ": duplicate problem id '" + p.id + "'");
    suite.push_back(std::move(p));
  }
  return suite;
}

std::filesystem::path default_suite_path() {
  const char* env = std::getenv("VERMCTS_SUITE");
  if (env != nullptr && *env != '\0') return env;
  return VERMCTS_DEFAULT_SUITE;
}

const ProblemSpec& find_problem(const std::vector<ProblemSpec>& suite, std::string_view id) {
  for (const auto& p : suite)
    if (p.id == id) return p;
  throw ConfigError("unknown problem '" + std::string(id) + "'");
}

State render_prompt(const ProblemSpec& problem) {
  std::string text = problem.prompt;
  if (problem.language == Language::kCoq) {
    for (const auto& h : problem.hints) {
      text += h;
      text += '\n';
    }
  }
  return State::from_prompt(std::move(text));
}

}  // namespace vermcts
