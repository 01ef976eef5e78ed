#pragma once

#include <cstdint>
#include <map>

#include "aicrowd/bootstrap.hpp"
#include "aicrowd/consensus.hpp"
#include "aicrowd/core.hpp"

namespace aicrowd {

struct SkillRecord {
  std::string annotator_id;
  EstimateWithCI skill;
  std::uint32_t rank = 0;        // 1-based, by (-skill.point, annotator_id)
  std::uint64_t scored = 0;      // instances where this annotator produced a label

  bool operator==(const SkillRecord&) const = default;
};

// Per-annotator agreement with the consensus label: matches / labeled cells,
// bootstrapped over instances. Annotators without a single labeled cell have
// no defined skill; they are omitted from the result with a warning.
std::vector<SkillRecord> annotator_skills(const AnnotationMatrix& matrix,
                                          const ConsensusTable& consensus,
                                          const BootstrapConfig& cfg,
                                          int threads = 1);

// Skill-weighted share of each label's votes for one instance. `votes` maps
// label -> annotator ids that cast it, `skills` maps annotator id -> skill
// point. When every relevant skill is zero the weights fall back to plain
// vote counts (callers log the warning once per run).
struct VoteDistribution {
  std::map<Label, double> probabilities;  // sums to 1
  bool zero_skill_fallback = false;
};
VoteDistribution vote_distribution(const std::map<Label, std::vector<std::string>>& votes,
                                   const std::map<std::string, double>& skills);

// Base-2 Shannon entropy of the distribution above, in [0, log2(K)].
double instance_entropy(const std::map<Label, std::vector<std::string>>& votes,
                        const std::map<std::string, double>& skills);

struct UncertaintyRecord {
  EstimateWithCI mean_entropy;
  std::vector<double> per_instance;  // matrix row order
  bool all_zero_skills = false;      // fallback was used on some instance
};

UncertaintyRecord task_uncertainty(const AnnotationMatrix& matrix,
                                   const std::vector<SkillRecord>& skills,
                                   const BootstrapConfig& cfg,
                                   int threads = 1);

}  // namespace aicrowd
