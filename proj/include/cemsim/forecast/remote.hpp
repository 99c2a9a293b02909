#pragma once

// Effort estimates from an HTTP endpoint.
//
//   POST <path>   Content-Type: application/json
//   request:  {"text": "<job description>"}
//   response: {"effort": <finite number >= 0>}
//
// Any status other than 200 is an error. There is no silent fallback; a
// caller that wants one catches RemoteEstimatorError.

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "cemsim/forecast/effort.hpp"

namespace cemsim::forecast {

struct RemoteEndpoint {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string path = "/effort";
  double timeout_seconds = 5.0;  // connect, read and write each

  /// Parses "http://host:port/path"; port defaults to 80, path to "/effort".
  /// Throws ConfigError.
  static RemoteEndpoint parse(std::string_view url);
};

class RemoteEstimatorError : public std::runtime_error {
 public:
  enum class Kind { Connection, Status, Parse };
  RemoteEstimatorError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

double estimate_effort_remote(std::string_view text, const RemoteEndpoint& endpoint);

class RemoteEffortEstimator final : public EffortEstimator {
 public:
  explicit RemoteEffortEstimator(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  double estimate(std::string_view text) override { return estimate_effort_remote(text, endpoint_); }

 private:
  RemoteEndpoint endpoint_;
};

}  // namespace cemsim::forecast
