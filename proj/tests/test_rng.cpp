#include "doctest.h"

#include "swabsim/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace swabsim;

TEST_CASE("same seed and label replay the same sequence") {
  RngStream a(42, "head");
  RngStream b(42, "head");
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different labels give independent sequences") {
  RngStream a(42, "head");
  RngStream b(42, "vision");
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("different seeds give different sequences") {
  RngStream a(42, "head");
  RngStream b(43, "head");
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("empty label is rejected") {
  CHECK_THROWS_AS(RngStream(1, ""), std::invalid_argument);
}

TEST_CASE("uniform stays in [0,1) and normal has sane moments") {
  RngStream r(7, "moments");
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = r.normal();
    sum += g;
    sum2 += g * g;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}
