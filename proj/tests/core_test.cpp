#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "aicrowd/core.hpp"
#include "aicrowd/error.hpp"

using namespace aicrowd;

TEST_CASE("trim strips surrounding whitespace only") {
  CHECK(trim("  hello  ") == "hello");
  CHECK(trim("\t a b \r\n") == "a b");
  CHECK(trim("") == "");
  CHECK(trim("   ") == "");
  CHECK(trim("x") == "x");
}

TEST_CASE("to_lower_ascii folds ASCII and leaves other bytes alone") {
  CHECK(to_lower_ascii("AbC") == "abc");
  CHECK(to_lower_ascii("MIXED case 123") == "mixed case 123");
  CHECK(to_lower_ascii("\xC3\x89") == "\xC3\x89");  // U+00C9 untouched
}

TEST_CASE("LabelSchema validates its label set") {
  LabelSchema schema("topic", {"Sports", "Politics", "Tech"});
  CHECK(schema.variable_name() == "topic");
  CHECK(schema.label_count() == 3);
  CHECK(schema.index_of("Politics") == 1);
  CHECK(schema.index_of(" Politics ") == 1);  // trimmed before matching
  CHECK_FALSE(schema.index_of("politics").has_value());
  CHECK(schema.contains("Tech"));
  CHECK_FALSE(schema.contains("tech"));

  CHECK_THROWS_AS(LabelSchema("v", {"only"}), Error);
  CHECK_THROWS_AS(LabelSchema("v", {}), Error);
  CHECK_THROWS_AS(LabelSchema("v", {"A", "A"}), Error);
  CHECK_THROWS_AS(LabelSchema("v", {"A", " A "}), Error);  // duplicates after trim
  try {
    LabelSchema("v", {"solo"});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}

TEST_CASE("fold_index_of requires a unique case-insensitive match") {
  LabelSchema schema("v", {"Sports", "politics"});
  CHECK(schema.fold_index_of("SPORTS") == 0);
  CHECK(schema.fold_index_of("Politics") == 1);
  CHECK_FALSE(schema.fold_index_of("music").has_value());

  // "lhs" and "LHS" collide under folding: no unique winner.
  LabelSchema clash("v", {"lhs", "LHS", "rhs"});
  CHECK_FALSE(clash.fold_index_of("Lhs").has_value());
  CHECK(clash.fold_index_of("RHS") == 2);
  // Exact matching still distinguishes them.
  CHECK(clash.index_of("LHS") == 1);
}

TEST_CASE("Codebook enforces exactly one placeholder") {
  LabelSchema schema("v", {"A", "B"});
  CHECK_NOTHROW(Codebook(schema, "label this: {text}"));
  CHECK_THROWS_AS(Codebook(schema, "no placeholder"), Error);
  CHECK_THROWS_AS(Codebook(schema, "{text} twice {text}"), Error);
  try {
    Codebook(schema, "nothing here");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PlaceholderMissing);
  }
}

TEST_CASE("Codebook category definitions must name schema labels") {
  LabelSchema schema("v", {"A", "B"});
  CHECK_NOTHROW(Codebook(schema, "{text}", {{"A", "first"}}, "note"));
  CHECK_THROWS_AS(Codebook(schema, "{text}", {{"C", "stray"}}, ""), Error);
}

TEST_CASE("Annotation kinds and accessors") {
  Annotation missing = Annotation::missing();
  CHECK(missing.is_missing());
  CHECK_FALSE(missing.is_labeled());
  CHECK_THROWS_AS(missing.label(), std::logic_error);
  CHECK_THROWS_AS(missing.reason(), std::logic_error);

  Annotation labeled = Annotation::labeled("Sports");
  CHECK(labeled.is_labeled());
  CHECK(labeled.label() == "Sports");
  CHECK_THROWS_AS(labeled.reason(), std::logic_error);

  Annotation err = Annotation::response_error("refusal");
  CHECK(err.is_error());
  CHECK(err.reason() == "refusal");
  CHECK_THROWS_AS(err.label(), std::logic_error);
  CHECK_THROWS_AS(Annotation::response_error(""), Error);

  CHECK(labeled == Annotation::labeled("Sports"));
  CHECK(labeled != Annotation::labeled("Politics"));
  CHECK(missing == Annotation());
}

TEST_CASE("AnnotationMatrix indexing and bounds") {
  AnnotationMatrix m({"i0", "i1", "i2"}, {"a", "b"});
  CHECK(m.instance_count() == 3);
  CHECK(m.annotator_count() == 2);
  CHECK(m.instance_index("i1") == 1);
  CHECK(m.annotator_index("b") == 1);
  CHECK_FALSE(m.instance_index("nope").has_value());

  CHECK(m.at(2, 1).is_missing());
  m.set(2, 1, Annotation::labeled("A"));
  CHECK(m.at(2, 1).label() == "A");
  CHECK(m.at(0, 0).is_missing());

  CHECK_THROWS(m.at(3, 0));
  CHECK_THROWS(m.at(0, 2));

  CHECK_THROWS_AS(AnnotationMatrix({"dup", "dup"}, {"a"}), Error);
  CHECK_THROWS_AS(AnnotationMatrix({"i"}, {"a", "a"}), Error);
}

TEST_CASE("validate_matrix flags labels outside the schema") {
  LabelSchema schema("v", {"A", "B"});
  AnnotationMatrix m({"i0", "i1"}, {"x"});
  m.set(0, 0, Annotation::labeled("A"));
  m.set(1, 0, Annotation::response_error("refusal"));  // errors are fine
  CHECK_NOTHROW(validate_matrix(m, schema));

  m.set(1, 0, Annotation::labeled("C"));
  try {
    validate_matrix(m, schema);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownLabel);
  }
}

TEST_CASE("error_code_name covers the enum") {
  CHECK(std::string(error_code_name(ErrorCode::UnknownLabel)) == "UnknownLabel");
  CHECK(std::string(error_code_name(ErrorCode::GateInsufficient)) == "GateInsufficient");
  CHECK(std::string(error_code_name(ErrorCode::ConfigError)) == "ConfigError");
  Error e(ErrorCode::IoError, "boom");
  CHECK(std::string(e.what()) == "IoError: boom");
  CHECK(e.code() == ErrorCode::IoError);
}
