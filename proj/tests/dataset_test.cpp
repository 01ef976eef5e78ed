#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>

#include "aicrowd/csv.hpp"
#include "aicrowd/dataset.hpp"
#include "aicrowd/error.hpp"
#include "aicrowd/log.hpp"

using namespace aicrowd;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "aicrowd_dataset_test";
    fs::create_directories(p);
    set_log_quiet(true);
    return p;
  }();
  return dir;
}

std::string write_fixture(const std::string& name, const std::vector<CsvRow>& rows) {
  fs::path p = temp_dir() / name;
  write_csv_file(p.string(), rows);
  return p.string();
}

const LabelSchema& topic_schema() {
  static LabelSchema schema("topic", {"A", "B", "C"});
  return schema;
}

}  // namespace

TEST_CASE("clean_text strips complete tags and collapses whitespace") {
  CHECK(clean_text("<p>Hello</p>   world", 100) == "Hello world");
  CHECK(clean_text("a\n\t b\r\nc", 100) == "a b c");
  CHECK(clean_text("<div class=\"x\">kept</div>", 100) == "kept");
  CHECK(clean_text("one two three four", 2) == "one two");
  CHECK(clean_text("exact", 1) == "exact");
}

TEST_CASE("clean_text keeps a lone '<' and drops control characters") {
  CHECK(clean_text("a < b", 100) == "a < b");
  CHECK(clean_text("2 <never closed", 100) == "2 <never closed");
  CHECK(clean_text("a\x01odd\x7F b", 100) == "aodd b");
  CHECK(clean_text("bell\x07s", 100) == "bells");
}

TEST_CASE("clean_text is idempotent") {
  std::mt19937_64 rng(31);
  const std::string alphabet = "ab <>\t\n\x01\x7Fc/=\"";
  for (int trial = 0; trial < 400; ++trial) {
    std::string s;
    std::size_t len = 1 + rng() % 40;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    std::string once;
    try {
      once = clean_text(s, 10);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyAfterCleaning);
      continue;
    }
    CHECK(clean_text(once, 10) == once);
  }
}

TEST_CASE("clean_text error cases") {
  CHECK_THROWS_AS(clean_text("   ", 100), Error);
  CHECK_THROWS_AS(clean_text("<only><tags>", 100), Error);
  CHECK_THROWS_AS(clean_text("fine", 0), Error);
  try {
    clean_text("\x01\x02", 100);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyAfterCleaning);
  }
}

TEST_CASE("load_dataset reads id, text and optional gold") {
  auto path = write_fixture("basic.csv", {
      {"instance_id", "text", "gold_label"},
      {"x1", "first text", "A"},
      {"x2", "second text", " B "},
      {"x3", "third text", ""},
  });
  Dataset d = load_dataset(path, topic_schema(), "demo");
  CHECK(d.name() == "demo");
  REQUIRE(d.size() == 3);
  CHECK(d.instances()[0].id == "x1");
  CHECK(d.instances()[1].gold == "B");  // trimmed before schema lookup
  CHECK_FALSE(d.instances()[2].gold.has_value());
}

TEST_CASE("load_dataset falls back to row-index ids") {
  auto path = write_fixture("noid.csv", {
      {"text"},
      {"alpha"},
      {"beta"},
  });
  Dataset d = load_dataset(path, topic_schema(), "demo");
  REQUIRE(d.size() == 2);
  CHECK(d.instances()[0].id == "0");
  CHECK(d.instances()[1].id == "1");
}

TEST_CASE("load_dataset honors a custom column map") {
  auto path = write_fixture("custom.csv", {
      {"key", "body", "truth"},
      {"k1", "content here", "C"},
  });
  ColumnMap columns;
  columns.id = "key";
  columns.text = "body";
  columns.gold = "truth";
  Dataset d = load_dataset(path, topic_schema(), "demo", columns);
  CHECK(d.instances()[0].id == "k1");
  CHECK(d.instances()[0].gold == "C");
}

TEST_CASE("load_dataset error cases") {
  auto no_text = write_fixture("no_text.csv", {{"instance_id"}, {"x"}});
  CHECK_THROWS_AS(load_dataset(no_text, topic_schema(), "d"), Error);

  auto dup = write_fixture("dup.csv", {
      {"instance_id", "text"}, {"x", "a"}, {"x", "b"}});
  try {
    load_dataset(dup, topic_schema(), "d");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateId);
  }

  auto headers_only = write_fixture("headers_only.csv", {{"instance_id", "text"}});
  try {
    load_dataset(headers_only, topic_schema(), "d");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyFile);
  }

  auto bad_gold = write_fixture("bad_gold.csv", {
      {"text", "gold_label"}, {"t", "Z"}});
  try {
    load_dataset(bad_gold, topic_schema(), "d");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownLabel);
  }

  auto ragged = write_fixture("ragged.csv", {
      {"instance_id", "text"}, {"x", "a", "extra"}});
  try {
    load_dataset(ragged, topic_schema(), "d");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

namespace {

Dataset make_gold_dataset(const std::vector<std::pair<Label, int>>& class_counts) {
  std::vector<Instance> instances;
  int serial = 0;
  // Interleave classes so strata are not contiguous in corpus order.
  bool remaining = true;
  std::size_t round = 0;
  while (remaining) {
    remaining = false;
    for (const auto& [label, count] : class_counts) {
      if (round < static_cast<std::size_t>(count)) {
        Instance inst;
        inst.id = "i" + std::to_string(serial++);
        inst.text = "text " + std::to_string(serial);
        inst.gold = label;
        instances.push_back(std::move(inst));
        remaining = true;
      }
    }
    ++round;
  }
  return Dataset("demo", topic_schema(), std::move(instances));
}

std::map<Label, std::size_t> gold_counts(const Dataset& d) {
  std::map<Label, std::size_t> counts;
  for (const Instance& inst : d.instances()) ++counts[*inst.gold];
  return counts;
}

}  // namespace

TEST_CASE("stratified_sample apportions 9 of {A:5, B:3, C:2} as 4/3/2") {
  Dataset d = make_gold_dataset({{"A", 5}, {"B", 3}, {"C", 2}});
  Dataset s = stratified_sample(d, 9, 17);
  auto counts = gold_counts(s);
  CHECK(counts["A"] == 4);
  CHECK(counts["B"] == 3);
  CHECK(counts["C"] == 2);
}

TEST_CASE("stratified_sample quotas stay within one of the exact share") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<Label, int>> classes = {
        {"A", 1 + static_cast<int>(rng() % 40)},
        {"B", 1 + static_cast<int>(rng() % 40)},
        {"C", 1 + static_cast<int>(rng() % 40)},
    };
    Dataset d = make_gold_dataset(classes);
    std::size_t n = 1 + rng() % d.size();
    Dataset s = stratified_sample(d, n, rng());
    CHECK(s.size() == n);
    auto counts = gold_counts(s);
    auto full = gold_counts(d);
    for (const auto& [label, m] : full) {
      double exact = static_cast<double>(n) * static_cast<double>(m) /
                     static_cast<double>(d.size());
      CHECK(std::abs(static_cast<double>(counts[label]) - exact) < 1.0);
    }
  }
}

TEST_CASE("stratified_sample is seed-deterministic and keeps corpus order") {
  Dataset d = make_gold_dataset({{"A", 20}, {"B", 12}, {"C", 8}});
  Dataset s1 = stratified_sample(d, 15, 99);
  Dataset s2 = stratified_sample(d, 15, 99);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1.instances()[i].id == s2.instances()[i].id);
  }

  // Sampled ids appear in the same relative order as the corpus.
  std::map<std::string, std::size_t> corpus_pos;
  for (std::size_t i = 0; i < d.size(); ++i) corpus_pos[d.instances()[i].id] = i;
  for (std::size_t i = 1; i < s1.size(); ++i) {
    CHECK(corpus_pos[s1.instances()[i - 1].id] < corpus_pos[s1.instances()[i].id]);
  }

  Dataset s3 = stratified_sample(d, 15, 100);
  bool any_difference = false;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (s1.instances()[i].id != s3.instances()[i].id) any_difference = true;
  }
  CHECK(any_difference);  // a different seed draws a different sample
}

TEST_CASE("stratified_sample falls back to SRS without any gold labels") {
  std::vector<Instance> instances;
  for (int i = 0; i < 30; ++i) {
    instances.push_back({"i" + std::to_string(i), "t" + std::to_string(i), std::nullopt});
  }
  Dataset d("demo", topic_schema(), std::move(instances));
  Dataset s1 = stratified_sample(d, 10, 7);
  Dataset s2 = stratified_sample(d, 10, 7);
  CHECK(s1.size() == 10);
  for (std::size_t i = 0; i < s1.size(); ++i) {
    CHECK(s1.instances()[i].id == s2.instances()[i].id);
  }
}

TEST_CASE("stratified_sample error cases") {
  Dataset d = make_gold_dataset({{"A", 4}, {"B", 4}});
  CHECK_THROWS_AS(stratified_sample(d, 0, 1), Error);
  try {
    stratified_sample(d, 9, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SampleTooLarge);
  }

  // One unlabeled instance poisons the stratum key.
  std::vector<Instance> instances = d.instances();
  instances.push_back({"odd", "text", std::nullopt});
  Dataset partial("demo", topic_schema(), std::move(instances));
  try {
    stratified_sample(partial, 3, 1);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingStratumKey);
  }
}

TEST_CASE("Dataset constructor validation") {
  CHECK_THROWS_AS(Dataset("", topic_schema(), {{"i", "t", std::nullopt}}), Error);
  CHECK_THROWS_AS(Dataset("d", topic_schema(), {{"i", "", std::nullopt}}), Error);
  CHECK_THROWS_AS(Dataset("d", topic_schema(), {{"i", "t", Label("nope")}}), Error);
  CHECK_THROWS_AS(
      Dataset("d", topic_schema(), {{"i", "t", std::nullopt}, {"i", "u", std::nullopt}}),
      Error);
}
