#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rubric/sampler.hpp"
#include "rubric/zipf.hpp"
#include "test_util.hpp"

using namespace rubric;

namespace {

FrequencyTable table_of(std::vector<std::pair<std::string, double>> entries) {
  std::vector<FrequencyEntry> out;
  for (auto& [p, w] : entries) out.push_back(FrequencyEntry{p, w});
  return FrequencyTable(std::move(out));
}

// Entries p0..p(n-1) with weight(i) from the callback.
template <class F>
FrequencyTable numbered(int n, F weight) {
  std::vector<FrequencyEntry> out;
  for (int i = 0; i < n; ++i) out.push_back(FrequencyEntry{"p" + std::to_string(i), weight(i)});
  return FrequencyTable(std::move(out));
}

}  // namespace

TEST_CASE("ranking breaks ties by text and merges duplicates") {
  const FrequencyTable t = table_of({{"b", 2}, {"a", 2}, {"c", 5}, {"b", 1}});
  REQUIRE(t.size() == 3);
  CHECK(t.ranked()[0].program == "c");
  CHECK(t.ranked()[1].program == "b");
  CHECK(t.ranked()[1].weight == 3);
  CHECK(t.ranked()[2].program == "a");
  CHECK(*t.rank("a") == 3);
  CHECK_FALSE(t.rank("zzz"));
  CHECK(t.total() == 10);
  CHECK(error_of([] { table_of({{"a", -1}}); }) == ErrorCode::kNonPositiveWeight);
  CHECK(error_of([] { table_of({{"a", NAN}}); }) == ErrorCode::kNonPositiveWeight);
}

TEST_CASE("split boundaries") {
  // 30 entries: ranks 1..20 weight 100, rank 21..24 weight 4, 25..30 weight 3.
  const FrequencyTable t = numbered(30, [](int i) { return i < 20 ? 100.0 - i : (i < 24 ? 4.0 : 3.0); });
  const ZipfSplit s = split_zipf(t);
  CHECK(s.head.size() == 20);
  CHECK(s.body.size() == 4);
  CHECK(s.tail.size() == 6);
  CHECK(s.head.size() + s.body.size() + s.tail.size() == t.size());
  CHECK(zipf_region(t, t.ranked()[19].program) == ZipfRegion::kHead);
  CHECK(zipf_region(t, t.ranked()[20].program) == ZipfRegion::kBody);
  CHECK(zipf_region(t, t.ranked()[24].program) == ZipfRegion::kTail);
  CHECK(zipf_region(t, "never seen") == ZipfRegion::kTail);

  // A weight-4 entry at rank 25 is body; a weight-3 entry is tail.
  const FrequencyTable u = numbered(26, [](int i) { return i < 24 ? 50.0 : (i == 24 ? 4.0 : 3.0); });
  CHECK(zipf_region(u, u.ranked()[24].program) == ZipfRegion::kBody);
  CHECK(zipf_region(u, u.ranked()[25].program) == ZipfRegion::kTail);
  // A very frequent program is head even if the table is tiny.
  CHECK(zipf_region(table_of({{"x", 1}}), "x") == ZipfRegion::kHead);
}

TEST_CASE("zipf fit on constructed data") {
  const ZipfFit exact = fit_zipf(numbered(100, [](int i) { return 1000.0 / (i + 1); }));
  CHECK(std::abs(exact.slope + 1.0) < 1e-6);
  CHECK(exact.r2 > 0.999999);

  const ZipfFit flat = fit_zipf(numbered(50, [](int) { return 7.0; }));
  CHECK(std::abs(flat.slope) < 1e-9);

  CHECK(error_of([] { fit_zipf(table_of({{"a", 1}, {"b", 2}})); }) == ErrorCode::kTooFewEntries);
}

TEST_CASE("sampled reference corpus is zipf shaped") {
  const RubricGrammar g = load_rubric(rubric_path("p1.rubric"));
  const auto corpus = sample_corpus(g, 200'000, false, 3);
  std::vector<Program> programs;
  for (const auto& e : corpus) programs.push_back(e.program);
  const FrequencyTable t = build_frequency(programs);
  CHECK(t.size() < corpus.size());
  const ZipfFit fit = fit_zipf(t);
  CHECK(fit.slope < -0.5);
  CHECK(fit.r2 > 0.9);
}

TEST_CASE("log and exp transforms") {
  const FrequencyTable t = table_of({{"one", 1}, {"e3", std::exp(3.0)}, {"two", 2}});
  const FrequencyTable l = log_zipf(t);
  CHECK(l.weight("one") == 1.0);
  CHECK(l.weight("e3") == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(l.weight("two") == 1.0);  // ln 2 < 1
  CHECK(l.size() == t.size());

  const FrequencyTable round = exp_zipf(log_zipf(table_of({{"a", 10}, {"b", 100}, {"c", 1000}})));
  for (auto [p, w] : {std::pair{"a", 10.0}, {"b", 100.0}, {"c", 1000.0}}) {
    CHECK(std::abs(round.weight(p) - w) / w < 1e-9);
  }
  CHECK(exp_zipf(table_of({{"x", 3}})).weight("x") == doctest::Approx(std::exp(3.0)));
  CHECK(exp_zipf(log_zipf(table_of({{"x", 1}}))).weight("x") == doctest::Approx(std::exp(1.0)));
  CHECK(error_of([] { log_zipf(table_of({{"a", 0.5}})); }) == ErrorCode::kNonPositiveWeight);
}

TEST_CASE("log_zipf keeps the order of entries above e") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> w(1.0, 1e6);
  std::vector<FrequencyEntry> entries;
  for (int i = 0; i < 500; ++i) entries.push_back({"p" + std::to_string(i), w(rng)});
  const FrequencyTable t(entries);
  const FrequencyTable l = log_zipf(t);
  for (const auto& a : t.ranked()) {
    CHECK(l.weight(a.program) <= std::max(1.0, std::log(a.weight)) + 1e-15);
  }
  std::vector<std::string> above_t, above_l;
  for (const auto& e : t.ranked()) {
    if (e.weight > std::exp(1.0)) above_t.push_back(e.program);
  }
  for (const auto& e : l.ranked()) {
    if (t.weight(e.program) > std::exp(1.0)) above_l.push_back(e.program);
  }
  CHECK(above_t == above_l);
}

TEST_CASE("rank order distance") {
  const FrequencyTable a = table_of({{"x", 5}, {"y", 3}, {"z", 1}});
  CHECK(rank_order_distance(a, a) == 0.0);
  CHECK(rank_order_distance(table_of({{"p", 5}}), table_of({{"q", 5}})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));

  const FrequencyTable b = table_of({{"y", 9}, {"x", 3}, {"w", 1}});
  CHECK(rank_order_distance(a, b) == doctest::Approx(rank_order_distance(b, a)).epsilon(1e-14));
  CHECK(rank_order_distance(a, b) > 0);

  // Same rank order with different weights is distance 0.
  CHECK(rank_order_distance(a, table_of({{"x", 50}, {"y", 20}, {"z", 2}})) == 0.0);

  CHECK(error_of([&] { rank_order_distance(a, FrequencyTable{}); }) == ErrorCode::kEmptyTable);
}

TEST_CASE("rank order distance by hand") {
  // a: x1 y2; b: y1 z2. Union {x, y, z}; missing rank = 3 in both.
  const FrequencyTable a = table_of({{"x", 2}, {"y", 1}});
  const FrequencyTable b = table_of({{"y", 2}, {"z", 1}});
  const double dx = std::log(1.0) - std::log(3.0);
  const double dy = std::log(2.0) - std::log(1.0);
  const double dz = std::log(3.0) - std::log(2.0);
  CHECK(rank_order_distance(a, b) ==
        doctest::Approx(std::sqrt((dx * dx + dy * dy + dz * dz) / 3.0)).epsilon(1e-14));
}
