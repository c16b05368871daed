#include "doctest.h"

#include "swabsim/matrix.hpp"
#include "swabsim/measures.hpp"
#include "swabsim/rng.hpp"
#include "swabsim/stats.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

using namespace swabsim;

TEST_CASE("oscillation coefficient: DC, on-bin sine, out-of-band sine") {
  const double rate = 100.0;
  const int n = 1500;  // 15 s

  std::vector<double> dc(n, 0.42);
  CHECK(oscillation_coefficient(dc, rate) == doctest::Approx(0.0).epsilon(1e-9));

  std::vector<double> in_band(n), out_band(n);
  for (int i = 0; i < n; ++i) {
    in_band[static_cast<std::size_t>(i)] = std::sin(2.0 * M_PI * 2.0 * i / rate);
    out_band[static_cast<std::size_t>(i)] = std::sin(2.0 * M_PI * 10.0 * i / rate);
  }
  // a 2 Hz unit sine lands on bin 30 exactly: magnitude n/2
  CHECK(oscillation_coefficient(in_band, rate) == doctest::Approx(750.0).epsilon(1e-3));
  CHECK(oscillation_coefficient(out_band, rate) == doctest::Approx(0.0).epsilon(1e-6));

  std::vector<double> too_short(150, 1.0);
  CHECK_THROWS_AS(oscillation_coefficient(too_short, rate), std::invalid_argument);
}

namespace {

TrialRecord synthetic_record(bool with_collect, const Vec3& f_insert) {
  TrialRecord rec;
  rec.spec.controller = "D2.0";
  rec.np_depth = 0.0931;
  rec.transitions.push_back({StageId::Sentry, 0.0});
  rec.transitions.push_back({StageId::Approach, 0.01});
  rec.transitions.push_back({StageId::Insert, 2.0});
  const double t_collect = 14.0;
  if (with_collect) {
    rec.transitions.push_back({StageId::Collect, t_collect});
    rec.transitions.push_back({StageId::Extract, t_collect + 15.0});
    rec.transitions.push_back({StageId::Done, t_collect + 28.0});
    rec.reached = true;
  } else {
    rec.transitions.push_back({StageId::Extract, t_collect});
    rec.transitions.push_back({StageId::Done, t_collect + 12.0});
  }
  const double dt = 0.01;
  for (double t = dt; t <= (with_collect ? 42.0 : 26.0) + 1e-9; t += dt) {
    Sample s;
    s.t = t;
    if (t >= 2.0 && t < 14.0) {
      s.stage = StageId::Insert;
      s.force_raw = f_insert;
    } else if (with_collect && t >= t_collect && t < t_collect + 15.0) {
      s.stage = StageId::Collect;
      s.force_raw = Vec3(0.05 * std::sin(2.0 * M_PI * 2.0 * t), 0.0, 0.4);
    }
    rec.series.push_back(s);
  }
  return rec;
}

}  // namespace

TEST_CASE("trial measures from a synthetic record") {
  SUBCASE("constant insertion force gives the hand-computed means") {
    const TrialRecord rec = synthetic_record(true, Vec3(0.03, 0.04, 0.1));
    const MeasureSet m = compute_measures(rec);
    REQUIRE(m.s1_transverse.has_value());
    CHECK(*m.s1_transverse == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(*m.s1_axial == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(m.reached);
    REQUIRE(m.time_to_np.has_value());
    CHECK(*m.time_to_np == doctest::Approx(12.0));
    REQUIRE(m.s2_axial.has_value());
    CHECK(*m.s2_axial == doctest::Approx(0.4).epsilon(1e-6));
    REQUIRE(m.oscillation.has_value());
    CHECK(*m.oscillation > 0.0);
  }

  SUBCASE("no collection stage: collection measures are absent") {
    const TrialRecord rec = synthetic_record(false, Vec3(0.03, 0.04, 0.1));
    const MeasureSet m = compute_measures(rec);
    CHECK_FALSE(m.reached);
    CHECK_FALSE(m.time_to_np.has_value());
    CHECK_FALSE(m.s2_transverse.has_value());
    CHECK_FALSE(m.oscillation.has_value());
  }
}

namespace {

double oneway_f_oracle(const std::vector<std::vector<double>>& groups) {
  double grand = 0.0;
  int n = 0;
  for (const auto& g : groups)
    for (double v : g) {
      grand += v;
      ++n;
    }
  grand /= n;
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    ssb += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double v : g) ssw += (v - mean) * (v - mean);
  }
  return (ssb / (static_cast<double>(groups.size()) - 1.0)) /
         (ssw / (n - static_cast<double>(groups.size())));
}

}  // namespace

TEST_CASE("anova4 matches the closed-form one-way F on single-factor data") {
  RngStream rng(17, "anova");
  std::vector<std::vector<double>> groups(3);
  std::vector<AnovaRow> rows;
  const char* names[3] = {"p", "q", "r"};
  for (int g = 0; g < 3; ++g) {
    const int size = 7 + 3 * g;  // unbalanced on purpose
    for (int i = 0; i < size; ++i) {
      const double v = g * 1.5 + rng.normal();
      groups[static_cast<std::size_t>(g)].push_back(v);
      rows.push_back({{names[g], "k", "k", "k"}, v});
    }
  }
  const auto tests = anova4(rows, {"A", "B", "C", "D"});
  CHECK(tests[0].statistic == doctest::Approx(oneway_f_oracle(groups)).epsilon(1e-9));
  CHECK(tests[1].excluded);
  CHECK(tests[2].excluded);
  CHECK(tests[3].excluded);
}

TEST_CASE("anova4 flags a strong factor and leaves null factors insignificant") {
  double null_p_sum = 0.0;
  int null_count = 0;
  for (int seed = 0; seed < 10; ++seed) {
    RngStream rng(static_cast<std::uint64_t>(seed), "anova-null");
    std::vector<AnovaRow> rows;
    for (int i = 0; i < 120; ++i) {
      const std::string a = (i % 2 == 0) ? "a0" : "a1";
      const std::string b = (i % 3 == 0) ? "b0" : "b1";
      const std::string c = (i % 5 == 0) ? "c0" : "c1";
      const std::string d = (i % 7 == 0) ? "d0" : "d1";
      // only factor A moves the mean, by ten standard deviations
      const double v = (a == "a1" ? 10.0 : 0.0) + rng.normal();
      rows.push_back({{a, b, c, d}, v});
    }
    const auto tests = anova4(rows, {"A", "B", "C", "D"});
    CHECK(tests[0].p < 1e-6);
    for (int f = 1; f < 4; ++f) {
      null_p_sum += tests[static_cast<std::size_t>(f)].p;
      ++null_count;
    }
  }
  CHECK(null_p_sum / null_count > 0.1);
}

TEST_CASE("anova on identical constants degrades to zero F") {
  std::vector<AnovaRow> rows;
  for (int i = 0; i < 24; ++i)
    rows.push_back({{i % 2 ? "a" : "b", i % 3 ? "x" : "y", "k", "k"}, 3.5});
  const auto tests = anova4(rows, {"A", "B", "C", "D"});
  CHECK(tests[0].statistic == 0.0);
  CHECK(tests[1].statistic == 0.0);
}

TEST_CASE("anova p-values are invariant to relabelling and constant shifts") {
  RngStream rng(23, "anova-invariance");
  std::vector<AnovaRow> base;
  for (int i = 0; i < 60; ++i) {
    const std::string a = (i % 2 == 0) ? "a0" : "a1";
    const std::string b = (i % 3 == 0) ? "b0" : (i % 3 == 1 ? "b1" : "b2");
    base.push_back({{a, b, "k", "k"}, (a == "a1" ? 0.8 : 0.0) + rng.normal()});
  }
  std::vector<AnovaRow> shifted = base;
  for (auto& r : shifted) r.value += 42.0;
  std::vector<AnovaRow> relabelled = base;
  for (auto& r : relabelled) {
    r.factors[0] = (r.factors[0] == "a0") ? "zz" : "aa";
    r.factors[1] = "L" + r.factors[1];
  }
  const auto t0 = anova4(base, {"A", "B", "C", "D"});
  const auto t1 = anova4(shifted, {"A", "B", "C", "D"});
  const auto t2 = anova4(relabelled, {"A", "B", "C", "D"});
  for (int f = 0; f < 2; ++f) {
    CHECK(t0[static_cast<std::size_t>(f)].p ==
          doctest::Approx(t1[static_cast<std::size_t>(f)].p).epsilon(1e-9));
    CHECK(t0[static_cast<std::size_t>(f)].p ==
          doctest::Approx(t2[static_cast<std::size_t>(f)].p).epsilon(1e-9));
  }
}

TEST_CASE("chi-square independence test") {
  // perfectly proportional table: no association at all
  const auto indep = chi2_independence({{10, 20}, {30, 60}});
  CHECK(indep.chi2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(indep.p == doctest::Approx(1.0));

  const auto diag = chi2_independence({{50, 0}, {0, 50}});
  CHECK(diag.chi2 == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(diag.dof == 1);
  CHECK(diag.p < 1e-12);

  CHECK_THROWS_AS(chi2_independence({{0, 0}, {10, 20}}), std::invalid_argument);
  CHECK_THROWS_AS(chi2_independence({{5, 0}, {10, 0}}), std::invalid_argument);
}

TEST_CASE("bonferroni-corrected critical p value") {
  CHECK(kBonferroniCritical == 0.0125);
}

TEST_CASE("matrix composition matches the published factorial") {
  MatrixConfig mc;
  const auto specs = build_matrix_specs(mc);
  CHECK(specs.size() == 564);  // 540 factorial trials plus 24 no-motion refs
  int none = 0, left = 0, right = 0;
  for (const auto& s : specs) {
    if (s.motion == MotionLevel::None) ++none;
    if (s.motion != MotionLevel::None && s.side == Side::Left) ++left;
    if (s.motion != MotionLevel::None && s.side == Side::Right) ++right;
  }
  CHECK(none == 24);
  CHECK(left == 360);   // 6 controllers x 3 motions x 2 phantoms x 10
  CHECK(right == 180);  // 6 controllers x 3 motions x 2 phantoms x 5
  // per-trial seeds are stable and unique
  std::set<std::uint64_t> seeds;
  for (const auto& s : specs) seeds.insert(s.seed);
  CHECK(seeds.size() == specs.size());
}

TEST_CASE("measures CSV round trip preserves the result rows") {
  MatrixResult r;
  TrialResult a;
  a.spec = {"S1.5", MotionLevel::Medium, PhantomId::B, Side::Right, 99, 3};
  a.outcome = Outcome::ReachedNP;
  a.reached = true;
  a.measures.reached = true;
  a.measures.s1_transverse = 0.123456789;
  a.measures.s1_axial = 0.2;
  a.measures.time_to_np = 12.5;
  a.measures.s2_transverse = 0.07;
  a.measures.s2_axial = 0.66;
  a.measures.oscillation = 512.25;
  TrialResult b;
  b.spec = {"D1.0", MotionLevel::Heavy, PhantomId::A, Side::Left, 7, 0};
  b.outcome = Outcome::Stuck;
  r.trials = {a, b};

  const auto parsed = parse_measures_csv(r.measures_csv());
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].spec.controller == "S1.5");
  CHECK(parsed[0].spec.seed == 99);
  CHECK(parsed[0].reached);
  CHECK(*parsed[0].measures.oscillation == doctest::Approx(512.25));
  CHECK(parsed[1].spec.controller == "D1.0");
  CHECK_FALSE(parsed[1].measures.s2_transverse.has_value());
  CHECK(parsed[1].outcome == Outcome::Stuck);
}
