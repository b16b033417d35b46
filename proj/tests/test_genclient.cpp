#include <doctest.h>

#include <cctype>
#include <filesystem>

#include "fixture.hpp"
#include "qvar/genclient.hpp"
#include "qvar/util.hpp"

using namespace qvar;

namespace {

PromptTemplate sample_template() {
  PromptTemplate t;
  t.task_description =
      "Write {num_variants} queries of about {avg_words} words each.";
  t.example_backstory = {"275", "You want to tie a windsor knot for a party."};
  t.example_variants = {"tie windsor knot", "windsor knot how to"};
  t.expected_variants = 5;
  t.avg_words_per_query = 3.0;
  return t;
}

class FailingBackend : public TextBackend {
 public:
  std::string name() const override { return "failing"; }
  std::string complete(const std::string&, const GenerationConfig&) override {
    ++calls;
    throw std::runtime_error("boom");
  }
  int calls = 0;
};

class EmptyBackend : public TextBackend {
 public:
  std::string name() const override { return "empty"; }
  std::string complete(const std::string&, const GenerationConfig&) override {
    return "   \n\n";
  }
};

}  // namespace

TEST_CASE("build_prompt") {
  auto tmpl = sample_template();
  TopicBackstory target{"301", "You are curious about glacier moraines."};

  SUBCASE("sections appear in order with placeholders substituted") {
    auto prompt = build_prompt(tmpl, target);
    auto task_pos = prompt.find("Write 5 queries of about 3 words each.");
    auto example_pos = prompt.find(tmpl.example_backstory.text);
    auto variant_pos = prompt.find("tie windsor knot");
    auto target_pos = prompt.find(target.text);
    REQUIRE(task_pos != std::string::npos);
    REQUIRE(example_pos != std::string::npos);
    REQUIRE(variant_pos != std::string::npos);
    REQUIRE(target_pos != std::string::npos);
    CHECK(task_pos < example_pos);
    CHECK(example_pos < variant_pos);
    CHECK(variant_pos < target_pos);
  }
  SUBCASE("deterministic") {
    CHECK(build_prompt(tmpl, target) == build_prompt(tmpl, target));
  }
  SUBCASE("target equal to the example topic is a leakage error") {
    TopicBackstory leak{"275", "something"};
    CHECK_THROWS(build_prompt(tmpl, leak));
  }
}

TEST_CASE("parse_response") {
  SUBCASE("numbered list") {
    CHECK(parse_response("1. tie windsor knot\n2. windsor knot how to") ==
          std::vector<std::string>{"tie windsor knot", "windsor knot how to"});
  }
  SUBCASE("bullets keep duplicates") {
    CHECK(parse_response("- q1\n\n- q1") ==
          std::vector<std::string>{"q1", "q1"});
  }
  SUBCASE("paren numbering and stars") {
    CHECK(parse_response("1) first\n* second") ==
          std::vector<std::string>{"first", "second"});
  }
  SUBCASE("whitespace-only is an error") {
    CHECK_THROWS(parse_response("   \n\n"));
  }
}

TEST_CASE("mock backend") {
  MockBackend mock(42);
  GenerationConfig cfg;
  auto tmpl = sample_template();
  TopicBackstory target{"301", "You are curious about glacier moraines."};
  auto prompt = build_prompt(tmpl, target);

  SUBCASE("deterministic given seed, prompt, temperature") {
    cfg.temperature = 0.5;
    CHECK(mock.complete(prompt, cfg) == mock.complete(prompt, cfg));
    MockBackend other(42);
    CHECK(other.complete(prompt, cfg) == mock.complete(prompt, cfg));
    MockBackend reseeded(43);
    CHECK(reseeded.complete(prompt, cfg) != mock.complete(prompt, cfg));
  }
  SUBCASE("output parses into queries built from backstory words") {
    auto vars = parse_response(mock.complete(prompt, cfg));
    CHECK(vars.size() >= 8);
    std::string lowered;
    for (char c : target.text)
      lowered.push_back(static_cast<char>(std::tolower(
          static_cast<unsigned char>(c))));
    for (const auto& v : vars) {
      CAPTURE(v);
      for (const auto& word : split_ws(v))
        CHECK(lowered.find(word) != std::string::npos);
    }
  }
}

TEST_CASE("generate_variants") {
  auto tmpl = sample_template();
  std::vector<TopicBackstory> targets{
      {"301", "You are curious about glacier moraines."},
      {"302", "You want to grow tomatoes in a small garden."},
      {"303", "You are learning piano chords as an adult."}};
  std::vector<double> temps{0.0, 0.5, 1.0};
  GenerationConfig cfg;
  cfg.retries = 0;

  SUBCASE("3 backstories x 3 temperatures give 9 records") {
    auto dir = fixture::temp_dir("genclient-nine");
    MockBackend mock(7);
    auto records =
        generate_variants(targets, tmpl, cfg, temps, mock, dir / "r.jsonl");
    CHECK(records.size() == 9);
    for (const auto& r : records) {
      CHECK(r.success);
      CHECK_FALSE(r.parsed_variants.empty());
      CHECK(r.backend == "mock");
    }
    // persisted as JSONL, one record per line
    CHECK(load_records(dir / "r.jsonl").size() == 9);
  }
  SUBCASE("mock results are deterministic across invocations") {
    auto d1 = fixture::temp_dir("genclient-det1");
    auto d2 = fixture::temp_dir("genclient-det2");
    MockBackend m1(7), m2(7);
    auto r1 = generate_variants(targets, tmpl, cfg, temps, m1, d1 / "r.jsonl");
    auto r2 = generate_variants(targets, tmpl, cfg, temps, m2, d2 / "r.jsonl");
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
      CHECK(r1[i].topic_id == r2[i].topic_id);
      CHECK(r1[i].parsed_variants == r2[i].parsed_variants);
    }
  }
  SUBCASE("example topic in the input is a leakage error") {
    auto dir = fixture::temp_dir("genclient-leak");
    MockBackend mock(7);
    auto bad = targets;
    bad.push_back(tmpl.example_backstory);
    CHECK_THROWS(
        generate_variants(bad, tmpl, cfg, temps, mock, dir / "r.jsonl"));
  }
  SUBCASE("empty responses become failure records") {
    auto dir = fixture::temp_dir("genclient-empty");
    EmptyBackend backend;
    CHECK_THROWS(  // every request fails -> batch error
        generate_variants(targets, tmpl, cfg, temps, backend, dir / "r.jsonl"));
    auto records = load_records(dir / "r.jsonl");
    CHECK(records.size() == 9);
    for (const auto& r : records) {
      CHECK_FALSE(r.success);
      CHECK(r.error.find("empty response") != std::string::npos);
    }
  }
  SUBCASE("failed requests are retried") {
    auto dir = fixture::temp_dir("genclient-retry");
    FailingBackend backend;
    GenerationConfig retry_cfg;
    retry_cfg.retries = 2;
    CHECK_THROWS(generate_variants({targets[0]}, tmpl, retry_cfg, {0.0},
                                   backend, dir / "r.jsonl"));
    CHECK(backend.calls == 3);  // initial try + 2 retries
  }
  SUBCASE("successful records are skipped on resume") {
    auto dir = fixture::temp_dir("genclient-resume");
    MockBackend mock(7);
    auto first = generate_variants({targets[0]}, tmpl, cfg, temps, mock,
                                   dir / "r.jsonl");
    CHECK(first.size() == 3);
    auto resumed = generate_variants(targets, tmpl, cfg, temps, mock,
                                     dir / "r.jsonl");
    CHECK(resumed.size() == 9);  // 3 loaded + 6 fresh
    CHECK(load_records(dir / "r.jsonl").size() == 9);
  }
}

TEST_CASE("records to variant sets") {
  GenerationRecord ok1{"1", 0.5, "raw", {"q a", "q b"}, "", "mock", true, ""};
  GenerationRecord ok2{"2", 0.5, "raw", {"q c"}, "", "mock", true, ""};
  GenerationRecord other_temp{"3", 1.0, "raw", {"q d"}, "", "mock", true, ""};
  GenerationRecord failed{"4", 0.5, "", {}, "", "mock", false, "boom"};

  SUBCASE("labels follow the temperature") {
    CHECK(variant_set_label(0.0) == "gpt-t0");
    CHECK(variant_set_label(0.5) == "gpt-t0.5");
    CHECK(variant_set_label(1.0) == "gpt-t1");
  }
  SUBCASE("only matching temperature, failures skipped") {
    auto set = records_to_variant_set({ok1, ok2, other_temp, failed}, 0.5);
    CHECK(set.label == "gpt-t0.5");
    REQUIRE(set.entries.size() == 2);
    CHECK(set.entries.at("1") == std::vector<std::string>{"q a", "q b"});
    CHECK(set.entries.at("2") == std::vector<std::string>{"q c"});
  }
  SUBCASE("all failures is an error") {
    CHECK_THROWS(records_to_variant_set({failed}, 0.5));
  }
}

TEST_CASE("prompt template file round trip") {
  auto dir = fixture::temp_dir("genclient-template");
  atomic_write(dir / "t.json", R"({
    "task_description": "Make {num_variants} queries.",
    "example_topic_id": "275",
    "example_backstory": "You want to tie a windsor knot.",
    "example_variants": ["tie windsor knot"],
    "expected_variants": 7,
    "avg_words_per_query": 4.5
  })");
  auto t = PromptTemplate::from_file(dir / "t.json");
  CHECK(t.example_backstory.topic_id == "275");
  CHECK(t.expected_variants == 7);
  CHECK(t.avg_words_per_query == doctest::Approx(4.5));
  CHECK(t.hash() == PromptTemplate::from_file(dir / "t.json").hash());
  CHECK(t.hash() != sample_template().hash());
}
