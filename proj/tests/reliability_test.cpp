#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "aicrowd/error.hpp"
#include "aicrowd/random.hpp"
#include "aicrowd/reliability.hpp"

using namespace aicrowd;

namespace {

AnnotationMatrix matrix_from_rows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::string> instances, annotators;
  for (std::size_t i = 0; i < rows.size(); ++i) instances.push_back("u" + std::to_string(i));
  for (std::size_t a = 0; a < rows[0].size(); ++a) annotators.push_back("r" + std::to_string(a));
  AnnotationMatrix m(instances, annotators);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t a = 0; a < rows[i].size(); ++a) {
      const std::string& cell = rows[i][a];
      if (cell.empty()) continue;
      if (cell == "!") {
        m.set(i, a, Annotation::response_error("refusal"));
      } else {
        m.set(i, a, Annotation::labeled(cell));
      }
    }
  }
  return m;
}

struct OracleAlpha {
  bool insufficient = false;
  bool degenerate = false;
  double alpha = 0.0;
};

// Direct pairwise-coincidence computation: observed disagreement is the
// fraction of ordered within-unit pairs that differ (each pair weighted by
// 1/(m_u - 1)); expected disagreement comes from the pooled label counts.
OracleAlpha oracle_alpha(const AnnotationMatrix& m) {
  std::vector<std::vector<Label>> units;
  for (std::size_t i = 0; i < m.instance_count(); ++i) {
    std::vector<Label> values;
    for (std::size_t a = 0; a < m.annotator_count(); ++a) {
      if (m.at(i, a).is_labeled()) values.push_back(m.at(i, a).label());
    }
    if (values.size() >= 2) units.push_back(std::move(values));
  }
  OracleAlpha result;
  if (units.empty()) {
    result.insufficient = true;
    return result;
  }

  double n = 0.0;
  std::map<Label, double> pooled;
  double do_sum = 0.0;
  for (const auto& values : units) {
    const double m_u = static_cast<double>(values.size());
    n += m_u;
    for (const Label& v : values) pooled[v] += 1.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (i == j) continue;
        if (values[i] != values[j]) do_sum += 1.0 / (m_u - 1.0);
      }
    }
  }
  const double d_o = do_sum / n;

  double de_sum = 0.0;
  for (const auto& [c, n_c] : pooled) {
    for (const auto& [k, n_k] : pooled) {
      if (c != k) de_sum += n_c * n_k;
    }
  }
  const double d_e = de_sum / (n * (n - 1.0));
  if (d_e == 0.0) {
    result.degenerate = true;
    result.alpha = 1.0;
    return result;
  }
  result.alpha = 1.0 - d_o / d_e;
  return result;
}

}  // namespace

TEST_CASE("the four-unit two-annotator fixture gives alpha = 0.125") {
  auto m = matrix_from_rows({{"A", "A"}, {"B", "B"}, {"A", "B"}, {"B", "A"}});
  CHECK(krippendorff_alpha(m) == doctest::Approx(0.125).epsilon(1e-9));
  // The closed form over integer marginals is exact here.
  CHECK(krippendorff_alpha(m) == 0.125);
}

TEST_CASE("perfect agreement is degenerate and reports exactly 1.0") {
  auto m = matrix_from_rows({{"A", "A", "A"}, {"A", "A", "A"}});
  AlphaResult r = krippendorff_alpha_detail(m);
  CHECK(r.value == 1.0);
  CHECK(r.degenerate);

  // Two labels, still perfectly matched within every unit: not degenerate.
  auto m2 = matrix_from_rows({{"A", "A"}, {"B", "B"}});
  AlphaResult r2 = krippendorff_alpha_detail(m2);
  CHECK(r2.value == 1.0);
  CHECK_FALSE(r2.degenerate);
}

TEST_CASE("unpairable units and error cells do not affect alpha") {
  auto base = matrix_from_rows({{"A", "A"}, {"B", "B"}, {"A", "B"}, {"B", "A"}});
  auto padded = matrix_from_rows({{"A", "A"},
                                  {"B", "B"},
                                  {"A", "B"},
                                  {"B", "A"},
                                  {"A", ""},      // one value: no pairs
                                  {"", ""},       // empty unit
                                  {"!", "!"}});   // refusals only
  CHECK(krippendorff_alpha(padded) == krippendorff_alpha(base));
}

TEST_CASE("alpha throws when no unit is pairable") {
  auto m = matrix_from_rows({{"A", ""}, {"", "B"}, {"!", "A"}});
  try {
    krippendorff_alpha(m);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientPairs);
  }
}

TEST_CASE("alpha matches the brute-force oracle on 200 random matrices") {
  std::mt19937_64 rng(60601);
  int degenerate_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t annotators = 2 + rng() % 7;   // <= 8
    const std::size_t labels = 2 + rng() % 4;       // <= 5
    const std::size_t instances = 2 + rng() % 29;   // <= 30

    std::vector<std::vector<std::string>> rows(instances,
                                               std::vector<std::string>(annotators));
    for (std::size_t i = 0; i < instances; ++i) {
      for (std::size_t a = 0; a < annotators; ++a) {
        const std::uint64_t roll = rng() % 100;
        if (roll < 15) {
          rows[i][a] = "";  // missing
        } else if (roll < 20) {
          rows[i][a] = "!";  // response error, must act like missing
        } else {
          rows[i][a] = "L" + std::to_string(rng() % labels);
        }
      }
    }
    // Guarantee at least one pairable unit.
    rows[0][0] = "L0";
    rows[0][1] = "L" + std::to_string(rng() % labels);

    auto m = matrix_from_rows(rows);
    OracleAlpha expected = oracle_alpha(m);
    REQUIRE_FALSE(expected.insufficient);
    AlphaResult actual = krippendorff_alpha_detail(m);
    CHECK(actual.degenerate == expected.degenerate);
    CHECK(actual.value == doctest::Approx(expected.alpha).epsilon(1e-12));
    if (expected.degenerate) ++degenerate_seen;
  }
  CHECK(degenerate_seen < 20);  // sanity: the generator mostly makes live cases
}

TEST_CASE("alpha is invariant under unit and annotator permutation") {
  std::mt19937_64 rng(17);
  std::vector<std::vector<std::string>> rows(12, std::vector<std::string>(5));
  for (auto& row : rows) {
    for (auto& cell : row) {
      cell = (rng() % 10 < 2) ? "" : "L" + std::to_string(rng() % 3);
    }
  }
  rows[0] = {"L0", "L1", "L0", "L1", "L2"};
  auto m = matrix_from_rows(rows);
  const double base = krippendorff_alpha(m);

  std::vector<std::size_t> iperm(rows.size()), aperm(rows[0].size());
  for (std::size_t i = 0; i < iperm.size(); ++i) iperm[i] = i;
  for (std::size_t a = 0; a < aperm.size(); ++a) aperm[a] = a;
  for (int shuffle = 0; shuffle < 10; ++shuffle) {
    for (std::size_t i = iperm.size(); i > 1; --i) {
      std::swap(iperm[i - 1], iperm[uniform_below(rng, i)]);
    }
    for (std::size_t a = aperm.size(); a > 1; --a) {
      std::swap(aperm[a - 1], aperm[uniform_below(rng, a)]);
    }
    std::vector<std::vector<std::string>> shuffled(rows.size(),
                                                   std::vector<std::string>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t a = 0; a < rows[0].size(); ++a) {
        shuffled[i][a] = rows[iperm[i]][aperm[a]];
      }
    }
    CHECK(krippendorff_alpha(matrix_from_rows(shuffled)) ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("alpha is invariant under label renaming") {
  std::mt19937_64 rng(23);
  std::vector<std::vector<std::string>> rows(15, std::vector<std::string>(4));
  for (auto& row : rows) {
    for (auto& cell : row) cell = "L" + std::to_string(rng() % 4);
  }
  auto renamed = rows;
  for (auto& row : renamed) {
    for (auto& cell : row) cell = "renamed_" + cell;
  }
  CHECK(krippendorff_alpha(matrix_from_rows(rows)) ==
        doctest::Approx(krippendorff_alpha(matrix_from_rows(renamed))).epsilon(1e-12));
}

TEST_CASE("gate thresholds sit at 0.6 and 0.8 exclusive") {
  CHECK(gate_for_alpha(0.95) == ReliabilityGate::Strong);
  CHECK(gate_for_alpha(0.8000001) == ReliabilityGate::Strong);
  CHECK(gate_for_alpha(0.8) == ReliabilityGate::Moderate);
  CHECK(gate_for_alpha(0.7) == ReliabilityGate::Moderate);
  CHECK(gate_for_alpha(0.6000001) == ReliabilityGate::Moderate);
  CHECK(gate_for_alpha(0.6) == ReliabilityGate::Insufficient);
  CHECK(gate_for_alpha(0.0) == ReliabilityGate::Insufficient);
  CHECK(gate_for_alpha(-0.4) == ReliabilityGate::Insufficient);
}

TEST_CASE("gate names round-trip") {
  for (ReliabilityGate g : {ReliabilityGate::Strong, ReliabilityGate::Moderate,
                            ReliabilityGate::Insufficient}) {
    CHECK(parse_gate(gate_name(g)) == g);
  }
  CHECK_THROWS_AS(parse_gate("great"), Error);
}

TEST_CASE("reliability_report bootstraps alpha and applies the gate") {
  // Strong agreement with a pinch of noise: alpha should gate strong.
  std::mt19937_64 rng(91);
  std::vector<std::vector<std::string>> rows(60, std::vector<std::string>(5));
  for (auto& row : rows) {
    std::string truth = "L" + std::to_string(rng() % 3);
    for (auto& cell : row) {
      cell = (rng() % 20 == 0) ? "L" + std::to_string(rng() % 3) : truth;
    }
  }
  auto m = matrix_from_rows(rows);
  BootstrapConfig cfg;
  cfg.n_resamples = 300;
  cfg.seed = 6;
  ReliabilityRecord record = reliability_report(m, cfg, 4);
  CHECK(record.alpha.point == krippendorff_alpha(m));
  CHECK(record.alpha.n_resamples == 300);
  CHECK(record.gate == gate_for_alpha(record.alpha.point));
  CHECK(record.alpha.lower <= record.alpha.point);
  CHECK(record.alpha.point <= record.alpha.upper);
  CHECK_FALSE(record.degenerate);

  ReliabilityRecord again = reliability_report(m, cfg, 1);
  CHECK(again.alpha == record.alpha);  // thread count cannot matter
}
