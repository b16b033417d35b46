#include <doctest.h>

#include "qvar/analysis.hpp"

using namespace qvar;

TEST_CASE("porter stemmer matches the reference behavior") {
  const std::pair<const char*, const char*> cases[] = {
      {"caresses", "caress"},   {"ponies", "poni"},
      {"ties", "ti"},           {"cats", "cat"},
      {"feed", "feed"},         {"agreed", "agre"},
      {"plastered", "plaster"}, {"bled", "bled"},
      {"motoring", "motor"},    {"sing", "sing"},
      {"troubled", "troubl"},   {"filing", "file"},
      {"hopping", "hop"},       {"falling", "fall"},
      {"happy", "happi"},       {"sky", "sky"},
      {"relational", "relat"},  {"conditional", "condit"},
      {"rational", "ration"},   {"valenci", "valenc"},
      {"digitizer", "digit"},   {"conformabli", "conform"},
      {"radicalli", "radic"},   {"differentli", "differ"},
      {"vileli", "vile"},       {"analogousli", "analog"},
      {"operator", "oper"},     {"feudalism", "feudal"},
      {"decisiveness", "decis"},{"hopefulness", "hope"},
      {"formaliti", "formal"},  {"sensitiviti", "sensit"},
      {"sensibiliti", "sensibl"},{"triplicate", "triplic"},
      {"formative", "form"},    {"formalize", "formal"},
      {"electriciti", "electr"},{"hopeful", "hope"},
      {"goodness", "good"},     {"generalizations", "gener"},
      {"oscillators", "oscil"}, {"hiking", "hike"},
      {"trails", "trail"},      {"controll", "control"},
      {"roll", "roll"}};
  for (const auto& [in, expected] : cases) {
    CAPTURE(in);
    CHECK(porter_stem(in) == expected);
  }
}

TEST_CASE("porter stemmer leaves short and non-alpha words alone") {
  CHECK(porter_stem("a") == "a");
  CHECK(porter_stem("at") == "at");
  CHECK(porter_stem("x17") == "x17");
  CHECK(porter_stem("") == "");
}

TEST_CASE("stop word list is the pinned 33-word set") {
  CHECK(stop_words().size() == 33);
  CHECK(is_stop_word("the"));
  CHECK(is_stop_word("was"));
  CHECK(is_stop_word("will"));
  CHECK_FALSE(is_stop_word("cat"));
  // stemmed forms ("this" -> "thi") are in the stemmed set
  CHECK(stemmed_stop_words().contains(porter_stem("this")));
  CHECK(stemmed_stop_words().contains("the"));
}

TEST_CASE("analyzer lowercases, splits, drops stop words and stems") {
  CHECK(analyze("The Cats are hiking!") ==
        std::vector<std::string>{"cat", "hike"});
  CHECK(analyze("Cats cats") == std::vector<std::string>{"cat", "cat"});
  CHECK(analyze("to be or not to be").empty());
  CHECK(analyze("") == std::vector<std::string>{});
  // digits survive; punctuation splits tokens
  CHECK(analyze("windsor-knot 101") ==
        std::vector<std::string>{"windsor", "knot", "101"});
}

TEST_CASE("strip_punctuation removes punctuation and collapses whitespace") {
  CHECK(strip_punctuation("Windsor knot, wiki") == "Windsor knot wiki");
  CHECK(strip_punctuation("tie!  a --- tie?") == "tie a tie");
  CHECK(strip_punctuation("no punctuation") == "no punctuation");
  CHECK(strip_punctuation("\"quoted\"") == "quoted");
  // unicode punctuation is removed without introducing spaces
  CHECK(strip_punctuation("rock—paper") == "rockpaper");
  CHECK(strip_punctuation("it’s") == "its");
}

TEST_CASE("analyzer fingerprint is stable") {
  CHECK(analyzer_fingerprint() == analyzer_fingerprint());
  CHECK(analyzer_fingerprint() != 0);
}
