#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "aicrowd/consensus.hpp"
#include "aicrowd/diagnostics.hpp"
#include "aicrowd/error.hpp"
#include "aicrowd/log.hpp"

using namespace aicrowd;

namespace {

AnnotationMatrix matrix_from_rows(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::string> instances, annotators;
  for (std::size_t i = 0; i < rows.size(); ++i) instances.push_back("u" + std::to_string(i));
  for (std::size_t a = 0; a < rows[0].size(); ++a) annotators.push_back("r" + std::to_string(a));
  AnnotationMatrix m(instances, annotators);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t a = 0; a < rows[i].size(); ++a) {
      if (!rows[i][a].empty()) m.set(i, a, Annotation::labeled(rows[i][a]));
    }
  }
  return m;
}

BootstrapConfig quick_cfg() {
  BootstrapConfig cfg;
  cfg.n_resamples = 200;
  cfg.seed = 9;
  return cfg;
}

using Votes = std::map<Label, std::vector<std::string>>;
using Skills = std::map<std::string, double>;

}  // namespace

TEST_CASE("skills measure agreement with the consensus") {
  set_log_quiet(true);
  // Consensus per row: A, A, B, A. r1 matches all four, r0 three, r2 one.
  auto m = matrix_from_rows({
      {"A", "A", "B"},
      {"A", "A", "B"},
      {"B", "B", "A"},
      {"B", "A", "A"},
  });
  ConsensusTable consensus = majority_vote(m);
  auto skills = annotator_skills(m, consensus, quick_cfg(), 2);
  REQUIRE(skills.size() == 3);

  // Sorted by descending skill point, ties on id.
  CHECK(skills[0].annotator_id == "r1");
  CHECK(skills[0].skill.point == 1.0);
  CHECK(skills[0].rank == 1);
  CHECK(skills[0].scored == 4);
  CHECK(skills[1].annotator_id == "r0");
  CHECK(skills[1].skill.point == 0.75);
  CHECK(skills[1].rank == 2);
  CHECK(skills[2].annotator_id == "r2");
  CHECK(skills[2].skill.point == 0.25);
  CHECK(skills[2].rank == 3);
}

TEST_CASE("equal skill points rank by annotator id") {
  auto m = matrix_from_rows({{"A", "A"}, {"B", "B"}});
  ConsensusTable consensus = majority_vote(m);
  auto skills = annotator_skills(m, consensus, quick_cfg());
  REQUIRE(skills.size() == 2);
  CHECK(skills[0].annotator_id == "r0");
  CHECK(skills[0].skill.point == 1.0);
  CHECK(skills[1].annotator_id == "r1");
  CHECK(skills[1].rank == 2);
}

TEST_CASE("an annotator with no labeled cell is omitted") {
  set_log_quiet(true);
  auto m = matrix_from_rows({{"A", ""}, {"A", ""}});
  ConsensusTable consensus = majority_vote(m);
  auto skills = annotator_skills(m, consensus, quick_cfg());
  REQUIRE(skills.size() == 1);
  CHECK(skills[0].annotator_id == "r0");
}

TEST_CASE("skills only count instances the annotator labeled") {
  auto m = matrix_from_rows({
      {"A", "A"},
      {"A", ""},
      {"B", "A"},
  });
  ConsensusTable consensus = majority_vote(m);
  auto skills = annotator_skills(m, consensus, quick_cfg());
  // r1 labeled two instances; consensus is A on rows 0 and 2.
  for (const auto& record : skills) {
    if (record.annotator_id == "r1") {
      CHECK(record.scored == 2);
      CHECK(record.skill.point == 1.0);
    }
  }
  CHECK_THROWS_AS(annotator_skills(m, ConsensusTable{}, quick_cfg()), Error);
}

TEST_CASE("unanimous votes have zero entropy") {
  Votes votes = {{"X", {"a", "b", "c"}}};
  Skills skills = {{"a", 0.4}, {"b", 0.9}, {"c", 0.1}};
  CHECK(instance_entropy(votes, skills) == 0.0);
}

TEST_CASE("an equal-skill 50/50 split has exactly one bit of entropy") {
  Votes votes = {{"X", {"a"}}, {"Y", {"b"}}};
  Skills skills = {{"a", 0.7}, {"b", 0.7}};
  CHECK(instance_entropy(votes, skills) == 1.0);
}

TEST_CASE("the weighted fixture {0.9, 0.9} vs {0.2} gives 0.4690 bits") {
  Votes votes = {{"X", {"a", "b"}}, {"Y", {"c"}}};
  Skills skills = {{"a", 0.9}, {"b", 0.9}, {"c", 0.2}};
  const double h = instance_entropy(votes, skills);
  CHECK(h == doctest::Approx(0.4690).epsilon(1e-3));
  CHECK(h == doctest::Approx(0.46899559358928117).epsilon(1e-12));
}

TEST_CASE("entropy is invariant under a global skill rescale") {
  Votes votes = {{"X", {"a", "b"}}, {"Y", {"c"}}, {"Z", {"d", "e"}}};
  Skills skills = {{"a", 0.9}, {"b", 0.42}, {"c", 0.2}, {"d", 0.66}, {"e", 0.31}};
  Skills scaled;
  for (const auto& [id, s] : skills) scaled[id] = s * 7.3;
  CHECK(instance_entropy(votes, scaled) ==
        doctest::Approx(instance_entropy(votes, skills)).epsilon(1e-12));
}

TEST_CASE("entropy stays within [0, log2 K] on random inputs") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    Votes votes;
    Skills skills;
    const std::size_t k = 1 + rng() % 6;
    int voter = 0;
    std::size_t atoms = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t n_votes = rng() % 3;
      if (n_votes > 0) ++atoms;
      for (std::size_t v = 0; v < n_votes; ++v) {
        std::string id = "ann" + std::to_string(voter++);
        votes["L" + std::to_string(c)].push_back(id);
        skills[id] = static_cast<double>(rng() % 1000) / 999.0;
      }
    }
    if (voter == 0) continue;
    const double h = instance_entropy(votes, skills);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(std::max<std::size_t>(atoms, 1))) + 0.0);
  }
}

TEST_CASE("zero skills fall back to plain vote counts") {
  Votes votes = {{"X", {"a", "b"}}, {"Y", {"c"}}};
  Skills zero = {{"a", 0.0}, {"b", 0.0}, {"c", 0.0}};
  VoteDistribution dist = vote_distribution(votes, zero);
  CHECK(dist.zero_skill_fallback);
  CHECK(dist.probabilities.at("X") == doctest::Approx(2.0 / 3.0));
  CHECK(dist.probabilities.at("Y") == doctest::Approx(1.0 / 3.0));

  // Voters the skill table does not know weigh zero; all unknown -> fallback.
  VoteDistribution unknown = vote_distribution(votes, Skills{});
  CHECK(unknown.zero_skill_fallback);
}

TEST_CASE("equal nonzero skills reproduce the unweighted distribution") {
  Votes votes = {{"X", {"a", "b", "c"}}, {"Y", {"d"}}};
  Skills equal = {{"a", 0.5}, {"b", 0.5}, {"c", 0.5}, {"d", 0.5}};
  Skills zero = {{"a", 0.0}, {"b", 0.0}, {"c", 0.0}, {"d", 0.0}};
  VoteDistribution weighted = vote_distribution(votes, equal);
  VoteDistribution unweighted = vote_distribution(votes, zero);
  for (const auto& [label, p] : weighted.probabilities) {
    CHECK(p == doctest::Approx(unweighted.probabilities.at(label)).epsilon(1e-12));
  }
}

TEST_CASE("vote_distribution validation") {
  CHECK_THROWS_AS(vote_distribution(Votes{}, Skills{}), Error);
  Votes votes = {{"X", {"a"}}};
  Skills negative = {{"a", -0.1}};
  try {
    vote_distribution(votes, negative);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }

  VoteDistribution dist = vote_distribution(
      Votes{{"X", {"a"}}, {"Y", {"b", "c"}}}, Skills{{"a", 0.3}, {"b", 0.5}, {"c", 0.1}});
  double sum = 0.0;
  for (const auto& [label, p] : dist.probabilities) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("task_uncertainty averages per-instance entropies") {
  set_log_quiet(true);
  auto m = matrix_from_rows({
      {"A", "A", "A"},   // unanimous: 0 bits
      {"A", "B", ""},    // split between two equally skilled raters
      {"B", "B", "A"},
  });
  ConsensusTable consensus = majority_vote(m);
  auto skills = annotator_skills(m, consensus, quick_cfg());
  UncertaintyRecord record = task_uncertainty(m, skills, quick_cfg(), 2);
  REQUIRE(record.per_instance.size() == 3);
  CHECK(record.per_instance[0] == 0.0);
  CHECK(record.per_instance[1] > 0.0);

  double mean = (record.per_instance[0] + record.per_instance[1] + record.per_instance[2]) / 3.0;
  CHECK(record.mean_entropy.point == doctest::Approx(mean).epsilon(1e-12));
  CHECK(record.mean_entropy.lower <= record.mean_entropy.point);
  CHECK(record.mean_entropy.point <= record.mean_entropy.upper);
  CHECK_FALSE(record.all_zero_skills);

  // Instance without a single label is an error.
  auto empty_row = matrix_from_rows({{"A", "A"}, {"", ""}});
  CHECK_THROWS_AS(task_uncertainty(empty_row, skills, quick_cfg()), Error);
}
