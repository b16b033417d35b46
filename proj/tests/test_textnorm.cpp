#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "fixture.hpp"
#include "oracles.hpp"
#include "qvar/textnorm.hpp"
#include "qvar/util.hpp"

using namespace qvar;

TEST_CASE("normalization levels") {
  SUBCASE("T1 strips punctuation and lowercases") {
    CHECK(normalize("Windsor knot, wiki", NormLevel::T1).canonical ==
          "windsor knot wiki");
  }
  SUBCASE("T2 stems word forms") {
    CHECK(normalize("hiking trails", NormLevel::T2).canonical == "hike trail");
  }
  SUBCASE("T3 drops stop words") {
    CHECK(normalize("to tie a tie", NormLevel::T3).canonical ==
          normalize("tie tie", NormLevel::T3).canonical);
  }
  SUBCASE("T3 keeps the T2 form when everything is a stop word") {
    auto q = normalize("to be or not to be", NormLevel::T3);
    CHECK(q.canonical == normalize("to be or not to be", NormLevel::T2).canonical);
  }
  SUBCASE("T4 is order-insensitive") {
    CHECK(normalize("knot windsor", NormLevel::T4).canonical ==
          normalize("windsor knot", NormLevel::T4).canonical);
    CHECK(normalize("knot windsor", NormLevel::T0).canonical !=
          normalize("windsor knot", NormLevel::T0).canonical);
  }
  SUBCASE("T0 lowercases by default, keeps case when asked") {
    CHECK(normalize("Tie A Knot", NormLevel::T0).canonical == "tie a knot");
    NormOptions opts;
    opts.t0_case_sensitive = true;
    CHECK(normalize("Tie A Knot", NormLevel::T0, opts).canonical == "Tie A Knot");
  }
  SUBCASE("empty input is an error") {
    CHECK_THROWS(normalize("", NormLevel::T0));
    CHECK_THROWS(normalize("   ", NormLevel::T1));
  }
}

TEST_CASE("normalization is idempotent at every level") {
  qvar::Rng rng(101);
  const auto& vocab = fixture::vocabulary();
  for (int i = 0; i < 200; ++i) {
    std::string q;
    std::size_t len = 1 + rng.below(6);
    for (std::size_t w = 0; w < len; ++w) {
      if (w) q += ' ';
      q += vocab[rng.below(vocab.size())];
      if (rng.below(4) == 0) q += 's';
      if (rng.below(5) == 0) q += ',';
    }
    for (NormLevel level : all_norm_levels()) {
      auto once = normalize(q, level).canonical;
      if (once.empty()) continue;
      CAPTURE(q);
      CHECK(normalize(once, level).canonical == once);
    }
  }
}

TEST_CASE("unique canonical sets") {
  VariantSet set;
  set.label = "human";
  set.entries["1"] = {"tie a tie", "Tie a tie!"};
  set.entries["2"] = {"a b", "b a"};

  CHECK(unique_canonical(set, "1", NormLevel::T1) ==
        std::set<std::string>{"tie a tie"});
  CHECK(unique_canonical(set, "2", NormLevel::T0).size() == 2);
  CHECK(unique_canonical(set, "2", NormLevel::T4).size() == 1);
  CHECK_THROWS(unique_canonical(set, "missing", NormLevel::T0));

  SUBCASE("57 raw variants with 3 exact duplicates give 54 canonical forms") {
    VariantSet big;
    big.label = "x";
    for (int i = 0; i < 54; ++i)
      big.entries["t"].push_back("query" + std::to_string(i) + " words");
    for (int i = 0; i < 3; ++i)
      big.entries["t"].push_back("query" + std::to_string(i) + " words");
    CHECK(big.entries["t"].size() == 57);
    CHECK(unique_canonical(big, "t", NormLevel::T0).size() == 54);
  }
}

TEST_CASE("jaccard and coverage") {
  std::set<std::string> abc{"a", "b", "c"};
  std::set<std::string> bcd{"b", "c", "d"};
  CHECK(jaccard(abc, bcd) == doctest::Approx(0.5));
  CHECK(jaccard(abc, abc) == doctest::Approx(1.0));
  CHECK(jaccard(abc, {"x"}) == doctest::Approx(0.0));
  CHECK(jaccard({}, {}) == doctest::Approx(1.0));

  std::set<std::string> ref{"q1", "q2", "q3", "q4"};
  CHECK(coverage_ratio(ref, {"q2", "q4", "q9"}) == doctest::Approx(0.5));
  CHECK(coverage_ratio(ref, {"q1", "q2", "q3", "q4", "q5"}) ==
        doctest::Approx(1.0));
  CHECK(coverage_ratio(ref, {"x"}) == doctest::Approx(0.0));
  CHECK_THROWS(coverage_ratio({}, {"x"}));
}

namespace {

VariantSet random_set(qvar::Rng& rng, const std::string& label,
                      std::size_t topics) {
  const auto& vocab = fixture::vocabulary();
  VariantSet set;
  set.label = label;
  for (std::size_t t = 0; t < topics; ++t) {
    std::string topic = std::to_string(t + 1);
    std::size_t n = 2 + rng.below(5);
    for (std::size_t q = 0; q < n; ++q) {
      std::string query;
      std::size_t len = 1 + rng.below(4);
      for (std::size_t w = 0; w < len; ++w) {
        if (w) query += ' ';
        query += vocab[rng.below(12)];  // small pool forces overlap
        if (rng.below(3) == 0) query += 's';
      }
      if (rng.below(4) == 0) query += '!';
      set.entries[topic].push_back(query);
    }
  }
  return set;
}

}  // namespace

TEST_CASE("cascade comparison") {
  SUBCASE("identical sets are fully similar at every level") {
    qvar::Rng rng(5);
    auto set = random_set(rng, "human", 3);
    auto other = set;
    other.label = "gpt-t0";
    for (const auto& sim : cascade_compare(set, other, all_norm_levels())) {
      CHECK(sim.jaccard == doctest::Approx(1.0));
      CHECK(sim.coverage == doctest::Approx(1.0));
    }
  }

  SUBCASE("order-only differences converge exactly at T4") {
    VariantSet human, other;
    human.label = "human";
    other.label = "gpt-t0";
    human.entries["1"] = {"windsor knot wiki"};
    other.entries["1"] = {"wiki windsor knot"};
    auto sims = cascade_compare(human, other, all_norm_levels());
    REQUIRE(sims.size() == 5);
    for (const auto& sim : sims) {
      if (sim.level == NormLevel::T4)
        CHECK(sim.jaccard == doctest::Approx(1.0));
      else
        CHECK(sim.jaccard == doctest::Approx(0.0));
    }
  }

  SUBCASE("topic mismatch is an error") {
    VariantSet human, other;
    human.label = "human";
    other.label = "x";
    human.entries["1"] = {"a b"};
    human.entries["2"] = {"c d"};
    other.entries["1"] = {"a b"};
    CHECK_THROWS(cascade_compare(human, other, all_norm_levels()));
  }

  SUBCASE("randomized fixture matches the set-arithmetic oracle") {
    qvar::Rng rng(77);
    auto human = random_set(rng, "human", 5);
    auto other = random_set(rng, "gpt-t1", 5);
    auto sims = cascade_compare(human, other, all_norm_levels());
    REQUIRE(sims.size() == 5);
    for (const auto& sim : sims) {
      double jac_sum = 0.0, cov_sum = 0.0;
      for (const auto& [topic, queries] : human.entries) {
        // Brute force: group the T0-unique queries of both sides into
        // canonical classes at this level and count the shared ones.
        auto h0 = unique_canonical(human, topic, NormLevel::T0);
        auto o0 = unique_canonical(other, topic, NormLevel::T0);
        std::set<std::string> shared;  // canonical classes hit by both sides
        for (const auto& a : h0)
          for (const auto& b : o0)
            if (normalize(a, sim.level).canonical ==
                normalize(b, sim.level).canonical)
              shared.insert(normalize(a, sim.level).canonical);
        std::set<std::string> universe = h0;
        universe.insert(o0.begin(), o0.end());
        std::size_t matched_union = 0;
        for (const auto& q : universe)
          if (shared.contains(normalize(q, sim.level).canonical))
            ++matched_union;
        std::size_t matched_human = 0;
        for (const auto& q : h0)
          if (shared.contains(normalize(q, sim.level).canonical))
            ++matched_human;
        double j = static_cast<double>(matched_union) /
                   static_cast<double>(universe.size());
        double c = static_cast<double>(matched_human) /
                   static_cast<double>(h0.size());
        CHECK(sim.per_topic.at(topic).jaccard == doctest::Approx(j).epsilon(1e-12));
        CHECK(sim.per_topic.at(topic).coverage ==
              doctest::Approx(c).epsilon(1e-12));
        jac_sum += j;
        cov_sum += c;
      }
      auto n = static_cast<double>(human.entries.size());
      CHECK(sim.jaccard == doctest::Approx(jac_sum / n).epsilon(1e-12));
      CHECK(sim.coverage == doctest::Approx(cov_sum / n).epsilon(1e-12));
    }
  }

  SUBCASE("same-side merges never lower similarity") {
    VariantSet human, other;
    human.label = "human";
    other.label = "gpt-t0";
    human.entries["1"] = {"dog", "dogs", "cat"};
    other.entries["1"] = {"dog", "dogs", "fish"};
    auto sims = cascade_compare(human, other,
                                {NormLevel::T0, NormLevel::T2});
    REQUIRE(sims.size() == 2);
    CHECK(sims[0].jaccard == doctest::Approx(0.5));   // {dog,dogs} of 4
    CHECK(sims[1].jaccard >= sims[0].jaccard - 1e-12);
    CHECK(sims[1].coverage >= sims[0].coverage - 1e-12);
  }
}

TEST_CASE("similarity is monotone across the cascade") {
  qvar::Rng rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    auto human = random_set(rng, "human", 2);
    auto other = random_set(rng, "gpt-t0.5", 2);
    auto sims = cascade_compare(human, other, all_norm_levels());
    for (std::size_t i = 1; i < sims.size(); ++i) {
      CHECK(sims[i].jaccard >= sims[i - 1].jaccard - 1e-12);
      CHECK(sims[i].coverage >= sims[i - 1].coverage - 1e-12);
    }
  }
}
