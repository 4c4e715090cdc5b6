#include <doctest.h>

#include <random>
#include <sstream>

#include "lvhba/trace_io.hpp"

using namespace lvhba;

namespace {

Trace random_trace(std::uint64_t seed, int rows) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::uniform_real_distribution<double> tiny(0, 1);
  Trace t;
  for (int i = 0; i < rows; ++i) {
    TraceRecord r;
    r.k = i;
    r.c_k = std::pow(i + 1.0, 0.3);
    r.F = u(rng);
    r.f = u(rng) * 1e-12;
    if (i % 3 == 0) {
      r.gap = tiny(rng);
      r.residual = u(rng);
      if (i % 6 == 0) r.merit = u(rng) / 3.0;
    }
    r.dxy = tiny(rng);
    r.dz = tiny(rng) * 1e-300;  // subnormal-adjacent magnitudes survive
    r.dtl = tiny(rng);
    r.sec = tiny(rng);
    t.records.push_back(r);
  }
  t.meta.problem_name = "merely_convex";
  t.meta.seed = seed;
  return t;
}

}  // namespace

TEST_CASE("csv round trip is exact") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const Trace t = random_trace(seed, 40);
    const Trace back = parse_trace_csv(trace_csv(t));
    REQUIRE(back.records.size() == t.records.size());
    for (std::size_t i = 0; i < t.records.size(); ++i) {
      const auto& a = t.records[i];
      const auto& b = back.records[i];
      CHECK(a.k == b.k);
      CHECK(a.c_k == b.c_k);  // 17 significant digits: bitwise round trip
      CHECK(a.F == b.F);
      CHECK(a.f == b.f);
      CHECK(a.gap == b.gap);
      CHECK(a.residual == b.residual);
      CHECK(a.merit == b.merit);
      CHECK(a.dxy == b.dxy);
      CHECK(a.dz == b.dz);
      CHECK(a.dtl == b.dtl);
      CHECK(a.sec == b.sec);
    }
  }
}

TEST_CASE("csv write twice gives identical bytes") {
  const Trace t = random_trace(9, 25);
  CHECK(trace_csv(t) == trace_csv(t));
}

TEST_CASE("csv parser rejects malformed input") {
  CHECK_THROWS_AS(parse_trace_csv(std::string("nonsense\n")),
                  std::invalid_argument);
  const std::string header = "k,c_k,F,f,gap,residual,merit,dxy,dz,dtl,sec\n";
  CHECK_THROWS_AS(parse_trace_csv(header + "1,2,3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_trace_csv(header + "1,2,3,4,,,abc,5,6,7,8\n"),
                  std::invalid_argument);
  CHECK_NOTHROW(parse_trace_csv(header + "1,2,3,4,,,,5,6,7,8\n"));
}

TEST_CASE("json carries records and the full effective config") {
  Trace t = random_trace(4, 6);
  t.meta.config.rtol = 1e-3;
  const std::string js = trace_json(t);
  for (const char* key :
       {"\"gamma1\"", "\"gamma2\"", "\"r\"", "\"alpha\"", "\"beta\"",
        "\"eta\"", "\"c_bar\"", "\"p_exp\"", "\"max_iters\"",
        "\"saddle_oracle_tol\"", "\"residual_every\"", "\"record_every\"",
        "\"rtol\"", "\"records\"", "\"seed\"", "\"warnings\""}) {
    INFO(key);
    CHECK(js.find(key) != std::string::npos);
  }
}
