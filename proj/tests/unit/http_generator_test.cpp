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

#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <gtest/gtest.h>
#include <json.hpp>

#include "vermcts/errors.hpp"
#include "vermcts/generator.hpp"

namespace vermcts {
namespace {

using nlohmann::json;

/// Local completion endpoint with a scripted reply.
class FakeEndpoint {
 public:
  using Reply = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit FakeEndpoint(Reply reply) : reply_(std::move(reply)) {
    server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard<std::mutex> lock(mutex_);
        bodies_.push_back(req.body);
        auth_ = req.get_header_value("Authorization");
      }
      ++requests_;
      reply_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  HttpEndpoint endpoint() const {
    HttpEndpoint e;
    e.base_url = "http://127.0.0.1:" + std::to_string(port_);
    e.initial_backoff = std::chrono::milliseconds(1);
    e.request_timeout = std::chrono::milliseconds(5000);
    return e;
  }
  int requests() const { return requests_; }
  json last_body() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return json::parse(bodies_.back());
  }
  std::string auth() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return auth_;
  }

 private:
  Reply reply_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> requests_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> bodies_;
  std::string auth_;
};

void completion(httplib::Response& res, const std::string& text, int tokens) {
  res.set_content(json{{"choices", {{{"text", text}}}}, {"usage", {{"completion_tokens", tokens}}}}.dump(),
                  "application/json");
}

GeneratorError::Kind error_kind(HttpGenerator& g, const State& s, const SamplingParams& p) {
  try {
    g.next_chunk(s, p);
  } catch (const GeneratorError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no GeneratorError";
  return GeneratorError::Kind::kExhausted;
}

TEST(HttpGenerator, ReturnsTruncatedChunkWithReportedUsage) {
  FakeEndpoint server([](const httplib::Request&, httplib::Response& res) {
    completion(res, "def a = 1;\ndef b = 2;\n", 9);
  });
  HttpEndpoint ep = server.endpoint();
  ep.api_key = "secret";
  ep.model = "tiny";
  HttpGenerator g(ep);
  SamplingParams p;
  p.temperature = 0.7;
  p.seed = 123;
  const Action a = g.next_chunk(State::from_prompt("Write toy code.\n"), p);
  EXPECT_EQ(a.text, "def a = 1;\n");
  EXPECT_EQ(a.token_count, 9u);

  const json body = server.last_body();
  EXPECT_EQ(body["prompt"], "Write toy code.\n");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.7);
  EXPECT_DOUBLE_EQ(body["top_p"].get<double>(), 0.95);
  EXPECT_EQ(body["max_tokens"], 64);
  EXPECT_EQ(body["seed"], 123);
  EXPECT_EQ(body["model"], "tiny");
  EXPECT_TRUE(body["stop"].empty());
  EXPECT_EQ(server.auth(), "Bearer secret");
}

TEST(HttpGenerator, UsageIsCappedAtActionLimit) {
  FakeEndpoint server([](const httplib::Request&, httplib::Response& res) {
    completion(res, "a b c d e f", 500);
  });
  HttpGenerator g(server.endpoint());
  SamplingParams p;
  p.max_action_tokens = 4;
  const Action a = g.next_chunk(State::from_prompt("x"), p);
  EXPECT_EQ(a.text, "a b c d");
  EXPECT_EQ(a.token_count, 4u);
}

TEST(HttpGenerator, ServerSideStopListIsOptIn) {
  HttpEndpoint ep;
  ep.base_url = "http://127.0.0.1:1";
  ep.server_side_stop = true;
  HttpGenerator g(ep);
  SamplingParams p;
  json body = json::parse(g.request_body(State::from_prompt("x"), p));
  EXPECT_EQ(body["stop"], json::array({"\n", "```"}));
  p.stop = StopKind::kDot;
  body = json::parse(g.request_body(State::from_prompt("x"), p));
  EXPECT_EQ(body["stop"][0], ". ");
  EXPECT_FALSE(body.contains("model"));
}

TEST(HttpGenerator, RetriesServerErrorsWithBackoff) {
  std::atomic<int> calls{0};
  FakeEndpoint server([&](const httplib::Request&, httplib::Response& res) {
    if (++calls < 3) {
      res.status = calls == 1 ? 503 : 429;
      return;
    }
    completion(res, "qed;\n", 1);
  });
  HttpGenerator g(server.endpoint());
  EXPECT_EQ(g.next_chunk(State::from_prompt("x"), {}).text, "qed;\n");
  EXPECT_EQ(server.requests(), 3);
}

TEST(HttpGenerator, GivesUpAfterMaxRetries) {
  FakeEndpoint server([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  HttpEndpoint ep = server.endpoint();
  ep.max_retries = 1;
  HttpGenerator g(ep);
  EXPECT_EQ(error_kind(g, State::from_prompt("x"), {}), GeneratorError::Kind::kEndpointUnreachable);
  EXPECT_EQ(server.requests(), 2);
}

TEST(HttpGenerator, ClientErrorsAreNotRetried) {
  FakeEndpoint server([](const httplib::Request&, httplib::Response& res) { res.status = 404; });
  HttpGenerator g(server.endpoint());
  EXPECT_EQ(error_kind(g, State::from_prompt("x"), {}), GeneratorError::Kind::kMalformedResponse);
  EXPECT_EQ(server.requests(), 1);
}

TEST(HttpGenerator, MalformedReplies) {
  FakeEndpoint bad_json([](const httplib::Request&, httplib::Response& res) {
    res.set_content("{not json", "application/json");
  });
  HttpGenerator g1(bad_json.endpoint());
  EXPECT_EQ(error_kind(g1, State::from_prompt("x"), {}), GeneratorError::Kind::kMalformedResponse);

  FakeEndpoint no_usage([](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"choices", {{{"text", "x"}}}}}.dump(), "application/json");
  });
  HttpGenerator g2(no_usage.endpoint());
  EXPECT_EQ(error_kind(g2, State::from_prompt("x"), {}), GeneratorError::Kind::kMalformedResponse);

  FakeEndpoint no_text([](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"usage", {{"completion_tokens", 1}}}}.dump(), "application/json");
  });
  HttpGenerator g3(no_text.endpoint());
  EXPECT_EQ(error_kind(g3, State::from_prompt("x"), {}), GeneratorError::Kind::kMalformedResponse);
}

TEST(HttpGenerator, CustomResponsePointers) {
  FakeEndpoint server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"output", "lemma X() {}\n"}, {"n", 3}}.dump(), "application/json");
  });
  HttpEndpoint ep = server.endpoint();
  ep.text_pointer = "/output";
  ep.usage_pointer = "/n";
  HttpGenerator g(ep);
  const Action a = g.next_chunk(State::from_prompt("x"), {});
  EXPECT_EQ(a.text, "lemma X() {}\n");
  EXPECT_EQ(a.token_count, 3u);
}

TEST(HttpGenerator, UnreachableEndpoint) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpEndpoint ep;
  ep.base_url = "http://127.0.0.1:" + std::to_string(port);
  ep.max_retries = 0;
  ep.request_timeout = std::chrono::milliseconds(2000);
  HttpGenerator g(ep);
  EXPECT_EQ(error_kind(g, State::from_prompt("x"), {}), GeneratorError::Kind::kEndpointUnreachable);
}

TEST(HttpGenerator, RejectsEmptyPrefixAndMissingUrl) {
  HttpEndpoint ep;
  EXPECT_THROW(HttpGenerator{ep}, ConfigError);
  ep.base_url = "http://127.0.0.1:1";
  HttpGenerator g(ep);
  EXPECT_THROW(g.next_chunk(State{}, {}), std::invalid_argument);
}

TEST(HttpGenerator, EnvironmentFillsEmptyFields) {
  ::setenv("VERMCTS_ENDPOINT", "http://example.invalid:9", 1);
  ::setenv("VERMCTS_API_KEY", "k", 1);
  HttpEndpoint e = endpoint_from_env({});
  EXPECT_EQ(e.base_url, "http://example.invalid:9");
  EXPECT_EQ(e.api_key, "k");
  HttpEndpoint given;
  given.base_url = "http://kept";
  EXPECT_EQ(endpoint_from_env(given).base_url, "http://kept");
  ::unsetenv("VERMCTS_ENDPOINT");
  ::unsetenv("VERMCTS_API_KEY");
}

}  // namespace
}  // namespace vermcts
