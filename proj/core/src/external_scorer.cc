// Copyright 2026 The ginsign Authors.
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

#include "ginsign/external_scorer.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include <httplib.h>

namespace ginsign {
namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

[[noreturn]] void Violation(const std::string &what) {
  throw Error(ErrorKind::kProtocolViolation, what);
}

Json ParseDocument(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    Violation(std::string("malformed response document: ") + e.what());
  }
}

void CheckId(const Json &doc, std::uint64_t id) {
  if (!doc.is_object()) Violation("response must be a JSON object");
  if (doc.contains("error")) {
    throw Error(ErrorKind::kScorerFailure, "scorer reported: " + doc["error"].dump());
  }
  if (!doc.contains("id") || !doc["id"].is_number_unsigned() || doc["id"].get<std::uint64_t>() != id) {
    Violation("response id does not match request id " + std::to_string(id));
  }
}

Json MakeEnvelope(std::span<const ScoreRequest> requests, std::uint64_t id) {
  Json doc = Json::object();
  doc["id"] = id;
  if (requests.size() == 1) {
    Json single = RequestToJson(requests[0]);
    for (auto &[k, v] : single.items()) doc[k] = v;
    return doc;
  }
  doc["batch"] = Json::array();
  for (const auto &r : requests) doc["batch"].push_back(RequestToJson(r));
  return doc;
}

std::vector<ScoreResponse> OpenEnvelope(std::span<const ScoreRequest> requests, const Json &doc,
                                        std::uint64_t id) {
  CheckId(doc, id);
  if (requests.size() == 1) return {ResponseFromJson(requests[0], doc)};
  if (!doc.contains("responses") || !doc["responses"].is_array()) {
    Violation("batch response lacks a 'responses' array");
  }
  const Json &items = doc["responses"];
  if (items.size() != requests.size()) {
    Violation("batch response has " + std::to_string(items.size()) + " entries for " +
              std::to_string(requests.size()) + " requests");
  }
  std::vector<ScoreResponse> out;
  for (std::size_t i = 0; i < requests.size(); ++i) out.push_back(ResponseFromJson(requests[i], items[i]));
  return out;
}

template <typename Fn>
std::vector<ScoreResponse> InChunks(std::span<const ScoreRequest> requests, std::size_t max_batch,
                                    Fn &&round_trip) {
  for (const auto &r : requests) r.Validate();
  std::vector<ScoreResponse> out;
  out.reserve(requests.size());
  const std::size_t step = std::max<std::size_t>(1, max_batch);
  for (std::size_t begin = 0; begin < requests.size(); begin += step) {
    auto chunk = requests.subspan(begin, std::min(step, requests.size() - begin));
    auto responses = round_trip(chunk);
    out.insert(out.end(), responses.begin(), responses.end());
  }
  return out;
}

}  // namespace

ProcessScorer::ProcessScorer(std::string command, ExternalScorerOptions options)
    : command_(std::move(command)), options_(options) {
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { ::signal(SIGPIPE, SIG_IGN); });

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw Error(ErrorKind::kTransport, "pipe: " + std::string(std::strerror(errno)));
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw Error(ErrorKind::kTransport, "pipe: " + std::string(std::strerror(errno)));
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw Error(ErrorKind::kTransport, "fork: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
}

ProcessScorer::~ProcessScorer() { Shutdown(); }

void ProcessScorer::Shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    // Closing stdin asks a well-behaved scorer to exit; give it a moment.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) != 0) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
}

void ProcessScorer::WriteLine(const std::string &line) {
  std::string data = line + "\n";
  std::size_t written = 0;
  while (written < data.size()) {
    ssize_t n = ::write(to_child_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw Error(ErrorKind::kTransport, "write to scorer failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::string ProcessScorer::ReadLine() {
  const auto deadline = Clock::now() + options_.timeout;
  while (true) {
    if (auto pos = buffer_.find('\n'); pos != std::string::npos) {
      std::string line = buffer_.substr(0, pos);
      buffer_.erase(0, pos + 1);
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) {
      broken_ = true;
      throw Error(ErrorKind::kTimeout, "scorer did not answer within " +
                                           std::to_string(options_.timeout.count()) + " ms");
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw Error(ErrorKind::kTransport, "poll failed: " + std::string(std::strerror(errno)));
    }
    if (ready == 0) continue;
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      broken_ = true;
      throw Error(ErrorKind::kTransport, "scorer process closed its output");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Json ProcessScorer::RoundTrip(const Json &doc) {
  if (broken_ || to_child_ < 0) throw Error(ErrorKind::kTransport, "scorer channel is closed");
  WriteLine(doc.dump());
  return ParseDocument(ReadLine());
}

ScoreResponse ProcessScorer::Score(const ScoreRequest &request) {
  return ScoreBatch(std::span<const ScoreRequest>(&request, 1)).front();
}

std::vector<ScoreResponse> ProcessScorer::ScoreBatch(std::span<const ScoreRequest> requests) {
  std::lock_guard lock(mu_);
  return InChunks(requests, options_.max_batch, [&](std::span<const ScoreRequest> chunk) {
    std::uint64_t id = next_id_++;
    return OpenEnvelope(chunk, RoundTrip(MakeEnvelope(chunk, id)), id);
  });
}

HttpScorer::HttpScorer(std::string url, ExternalScorerOptions options)
    : url_(std::move(url)), options_(options) {
  std::string rest = url_;
  std::string scheme = "http://";
  if (auto pos = rest.find("://"); pos != std::string::npos) {
    scheme = rest.substr(0, pos + 3);
    rest = rest.substr(pos + 3);
  }
  auto slash = rest.find('/');
  host_ = scheme + rest.substr(0, slash);
  path_ = slash == std::string::npos ? "" : rest.substr(slash);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  if (!path_.ends_with("/score")) path_ += "/score";
}

Json HttpScorer::Post(const Json &doc) {
  httplib::Client client(host_);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  auto start = Clock::now();
  auto result = client.Post(path_, doc.dump(), "application/json");
  if (!result) {
    bool timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                     Clock::now() - start >= options_.timeout;
    throw Error(timed_out ? ErrorKind::kTimeout : ErrorKind::kTransport,
                "POST " + host_ + path_ + ": " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorKind::kTransport,
                "POST " + host_ + path_ + " returned HTTP " + std::to_string(result->status));
  }
  return ParseDocument(result->body);
}

ScoreResponse HttpScorer::Score(const ScoreRequest &request) {
  return ScoreBatch(std::span<const ScoreRequest>(&request, 1)).front();
}

std::vector<ScoreResponse> HttpScorer::ScoreBatch(std::span<const ScoreRequest> requests) {
  return InChunks(requests, options_.max_batch, [&](std::span<const ScoreRequest> chunk) {
    std::uint64_t id;
    {
      std::lock_guard lock(mu_);
      id = next_id_++;
    }
    return OpenEnvelope(chunk, Post(MakeEnvelope(chunk, id)), id);
  });
}

std::unique_ptr<SpanScorer> MakeScorer(std::string_view spec, ExternalScorerOptions options) {
  if (spec == "lexical") return std::make_unique<LexicalScorer>();
  if (spec == "first") return std::make_unique<FirstCandidateScorer>();
  if (spec.starts_with("external:")) {
    return std::make_unique<ProcessScorer>(std::string(spec.substr(9)), options);
  }
  if (spec.starts_with("http:")) {
    std::string url(spec.substr(5));
    // Accept both `http:host:port` and `http:http://host:port`.
    if (url.find("://") == std::string::npos) url = "http://" + url;
    return std::make_unique<HttpScorer>(url, options);
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown scorer spec '" + std::string(spec) + "'");
}

Json HandleScoreDocument(SpanScorer &scorer, const Json &doc) {
  Json reply = Json::object();
  if (doc.is_object() && doc.contains("id")) reply["id"] = doc["id"];
  try {
    if (!doc.is_object()) throw Error(ErrorKind::kSchema, "request must be a JSON object");
    if (doc.contains("batch")) {
      std::vector<ScoreRequest> requests;
      for (const auto &item : doc["batch"]) requests.push_back(RequestFromJson(item));
      for (const auto &r : requests) r.Validate();
      auto responses = scorer.ScoreBatch(requests);
      reply["responses"] = Json::array();
      for (const auto &r : responses) reply["responses"].push_back(ResponseToJson(r));
      return reply;
    }
    ScoreRequest request = RequestFromJson(doc);
    request.Validate();
    Json response = ResponseToJson(scorer.Score(request));
    for (auto &[k, v] : response.items()) reply[k] = v;
    return reply;
  } catch (const std::exception &e) {
    Json error = Json::object();
    if (reply.contains("id")) error["id"] = reply["id"];
    error["error"] = e.what();
    return error;
  }
}

}  // namespace ginsign
