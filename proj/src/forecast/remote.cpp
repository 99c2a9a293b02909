#include "cemsim/forecast/remote.hpp"

#include <chrono>
#include <cmath>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cemsim/errors.hpp"

namespace cemsim::forecast {

RemoteEndpoint RemoteEndpoint::parse(std::string_view url) {
  static const std::regex kUrl(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::cmatch m;
  if (!std::regex_match(url.data(), url.data() + url.size(), m, kUrl)) {
    throw ConfigError("remote estimator: expected http://host[:port][/path], got '" +
                      std::string(url) + "'");
  }
  RemoteEndpoint e;
  e.host = m[1].str();
  e.port = m[2].matched ? std::stoi(m[2].str()) : 80;
  if (m[3].matched) e.path = m[3].str();
  if (e.port < 1 || e.port > 65535) throw ConfigError("remote estimator: port out of range");
  return e;
}

double estimate_effort_remote(std::string_view text, const RemoteEndpoint& endpoint) {
  using Kind = RemoteEstimatorError::Kind;
  httplib::Client client(endpoint.host, endpoint.port);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(endpoint.timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const std::string body = nlohmann::json{{"text", std::string(text)}}.dump();
  const auto res = client.Post(endpoint.path, body, "application/json");
  if (!res) {
    throw RemoteEstimatorError(Kind::Connection, "remote estimator: " + endpoint.host + ":" +
                                                     std::to_string(endpoint.port) + ": " +
                                                     httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw RemoteEstimatorError(Kind::Status,
                               "remote estimator: HTTP status " + std::to_string(res->status));
  }
  const auto parsed = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (!parsed.is_object() || !parsed.contains("effort") || !parsed["effort"].is_number()) {
    throw RemoteEstimatorError(Kind::Parse, "remote estimator: response lacks a numeric 'effort'");
  }
  const double effort = parsed["effort"].get<double>();
  if (!std::isfinite(effort) || effort < 0.0) {
    throw RemoteEstimatorError(Kind::Parse, "remote estimator: effort must be finite and >= 0");
  }
  return effort;
}

}  // namespace cemsim::forecast
