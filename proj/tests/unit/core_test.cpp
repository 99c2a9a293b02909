#include <doctest.h>

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

#include "cemsim/clock.hpp"
#include "cemsim/context.hpp"
#include "cemsim/errors.hpp"
#include "cemsim/numeric.hpp"
#include "oracles/context_oracle.hpp"

using namespace cemsim;

namespace {

constexpr std::int64_t kSec = Clock::kNanosPerSecond;
constexpr std::int64_t kHour = 3600 * kSec;

ContextRecord rec(std::int64_t recorded, std::int64_t begins, std::int64_t ends,
                  const char* text = "job") {
  return make_context_record(Clock(recorded), Clock(begins), Clock(ends), 1,
                             nlohmann::json{{"text", text}});
}

}  // namespace

TEST_CASE("clock advance is exact integer arithmetic") {
  CHECK(Clock(0).advance(60).epoch_ns() == 60'000'000'000LL);

  const Clock big(1'000'000'000'000'000'000LL);
  CHECK(big.advance(120).epoch_ns() == 1'000'000'000'000'000'000LL + 120'000'000'000LL);
  CHECK(big.advance(120).resolution_ns() == kSec);

  const Clock c(12345, 1000);
  CHECK(c.advance(7).advance(11) == c.advance(18));
  CHECK(c.advance(7).epoch_ns() == 12345 + 7000);
}

TEST_CASE("clock rejects bad input") {
  CHECK_THROWS_AS(Clock(-1), DomainError);
  CHECK_THROWS_AS(Clock(0, 0), DomainError);
  CHECK_THROWS_AS(Clock(0).advance(0), DomainError);
  CHECK_THROWS_AS(Clock(std::numeric_limits<std::int64_t>::max() - 10).advance(1),
                  std::overflow_error);
}

TEST_CASE("clock seconds round trip at its resolution") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto s = static_cast<std::int64_t>(rng() % 4'000'000'000ULL);
    const Clock c(s * kSec);
    CHECK(Clock::from_seconds(c.seconds_since_epoch()) == c);
  }
  CHECK(Clock(0).ticks_to_seconds(120) == 120.0);
  CHECK(Clock(0, 1'000'000).ticks_to_seconds(1500) == 1.5);
}

TEST_CASE("reactive power") {
  CHECK(reactive_power(5, 3) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(reactive_power(7, 7) == 0.0);
  CHECK(reactive_power(230, 0) == 230.0);
  CHECK_THROWS_AS(reactive_power(3, 5), DomainError);
  CHECK_THROWS_AS(reactive_power(-1, -2), DomainError);
}

TEST_CASE("compensated sum keeps small terms") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}

TEST_CASE("context records enforce their interval invariants") {
  CHECK_THROWS_AS(rec(0, 10 * kHour, 10 * kHour), ValidationError);
  CHECK_THROWS_AS(rec(0, 11 * kHour, 10 * kHour), ValidationError);
  CHECK_THROWS_AS(rec(13 * kHour, 10 * kHour, 12 * kHour), ValidationError);
  // Logged mid-event is fine.
  CHECK_NOTHROW(rec(11 * kHour, 10 * kHour, 12 * kHour));
}

TEST_CASE("context query semantics") {
  const auto r = rec(10 * kHour, 12 * kHour, 13 * kHour);
  const std::vector<ContextRecord> records{r};

  SUBCASE("known and still applying") {
    const auto out = context_query(records, Clock(11 * kHour));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == r);
  }
  SUBCASE("expired") { CHECK(context_query(records, Clock(13 * kHour + kHour / 2)).empty()); }
  SUBCASE("end is exclusive") { CHECK(context_query(records, Clock(13 * kHour)).empty()); }
  SUBCASE("recorded time is inclusive") { CHECK(context_query(records, Clock(10 * kHour)).size() == 1); }
  SUBCASE("not yet recorded") {
    const std::vector<ContextRecord> future{rec(14 * kHour, 15 * kHour, 16 * kHour)};
    CHECK(context_query(future, Clock(11 * kHour)).empty());
  }
  SUBCASE("empty input") { CHECK(context_query({}, Clock(0)).empty()); }
}

TEST_CASE("context query ordering and ties") {
  const std::vector<ContextRecord> records{
      rec(2 * kHour, 5 * kHour, 9 * kHour, "late-begin"),
      rec(1 * kHour, 3 * kHour, 9 * kHour, "b"),
      rec(0, 3 * kHour, 9 * kHour, "a"),
      rec(1 * kHour, 3 * kHour, 9 * kHour, "c"),
  };
  const auto out = context_query(records, Clock(4 * kHour));
  REQUIRE(out.size() == 4);
  CHECK(out[0].text() == "a");
  CHECK(out[1].text() == "b");
  CHECK(out[2].text() == "c");
  CHECK(out[3].text() == "late-begin");
}

TEST_CASE("context query matches the brute-force filter") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ContextRecord> records;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      const std::int64_t b = static_cast<std::int64_t>(rng() % 10) * kHour;
      const std::int64_t e = b + static_cast<std::int64_t>(1 + rng() % 6) * kHour;
      const std::int64_t r = static_cast<std::int64_t>(rng() % 10) * kHour;
      if (r >= e) continue;
      records.push_back(rec(r, b, e, std::to_string(i).c_str()));
    }
    const Clock now(static_cast<std::int64_t>(rng() % 16) * kHour);
    CHECK(context_query(records, now) == oracles::brute_force_context_query(records, now));
  }
}
