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

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "vermcts/errors.hpp"
#include "vermcts/generator.hpp"
#include "vermcts/text.hpp"

namespace vermcts {

HttpEndpoint endpoint_from_env(HttpEndpoint endpoint) {
  if (endpoint.base_url.empty()) {
    if (const char* url = std::getenv("VERMCTS_ENDPOINT")) endpoint.base_url = url;
  }
  if (endpoint.api_key.empty()) {
    if (const char* key = std::getenv("VERMCTS_API_KEY")) endpoint.api_key = key;
  }
  return endpoint;
}

HttpGenerator::HttpGenerator(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.base_url.empty()) throw ConfigError("http-llm generator requires an endpoint");
}

std::string HttpGenerator::request_body(const State& prefix, const SamplingParams& params) const {
  nlohmann::json stop = nlohmann::json::array();
  if (endpoint_.server_side_stop) {
    stop.push_back(params.stop == StopKind::kNewline ? "\n" : ". ");
    if (!params.sentinel.empty()) stop.push_back(params.sentinel);
  }
  nlohmann::json body = {
      {"prompt", prefix.text()},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"max_tokens", params.max_action_tokens},
      {"stop", stop},
      {"seed", params.seed},
  };
  if (!endpoint_.model.empty()) body["model"] = endpoint_.model;
  return body.dump();
}

Action HttpGenerator::next_chunk(const State& prefix, const SamplingParams& params) {
  if (prefix.text().empty())
    throw std::invalid_argument("next_chunk requires a non-empty prefix");

  httplib::Client client(endpoint_.base_url);
  const auto timeout = endpoint_.request_timeout;
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout));
  if (!endpoint_.api_key.empty()) client.set_bearer_token_auth(endpoint_.api_key);

  const std::string body = request_body(prefix, params);
  auto backoff = endpoint_.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Post(endpoint_.path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw GeneratorError(GeneratorError::Kind::kMalformedResponse,
                           "endpoint returned HTTP " + std::to_string(res->status));

    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded())
      throw GeneratorError(GeneratorError::Kind::kMalformedResponse, "endpoint returned invalid JSON");
    const nlohmann::json::json_pointer text_ptr(endpoint_.text_pointer);
    const nlohmann::json::json_pointer usage_ptr(endpoint_.usage_pointer);
    if (!reply.contains(text_ptr) || !reply[text_ptr].is_string())
      throw GeneratorError(GeneratorError::Kind::kMalformedResponse, "endpoint returned no completion");
    if (!reply.contains(usage_ptr) || !reply[usage_ptr].is_number_unsigned())
      throw GeneratorError(GeneratorError::Kind::kMalformedResponse, "endpoint returned no token usage");

    TruncatedChunk chunk = apply_stop(reply[text_ptr].get<std::string>(), params);
    Action action;
    action.text = std::move(chunk.text);
    action.token_count = std::min(reply[usage_ptr].get<std::size_t>(), params.max_action_tokens);
    return action;
  }
  throw GeneratorError(GeneratorError::Kind::kEndpointUnreachable,
                       "endpoint " + endpoint_.base_url + " unreachable: " + last_error);
}

}  // namespace vermcts
