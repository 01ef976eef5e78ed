#include "aicrowd/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "aicrowd/error.hpp"
#include "aicrowd/log.hpp"

namespace aicrowd {

std::vector<SkillRecord> annotator_skills(const AnnotationMatrix& matrix,
                                          const ConsensusTable& consensus,
                                          const BootstrapConfig& cfg, int threads) {
  if (consensus.records.size() != matrix.instance_count()) {
    throw Error(ErrorCode::LengthMismatch,
                "consensus table does not cover the matrix instances");
  }

  std::vector<SkillRecord> records;
  records.reserve(matrix.annotator_count());
  for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
    // Per-instance indicators; resamples recompute matches/labeled over them.
    std::vector<unsigned char> labeled(matrix.instance_count(), 0);
    std::vector<unsigned char> match(matrix.instance_count(), 0);
    std::uint64_t scored = 0;
    std::uint64_t matches = 0;
    for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
      const Annotation& cell = matrix.at(i, a);
      if (!cell.is_labeled()) continue;
      labeled[i] = 1;
      ++scored;
      if (cell.label() == consensus.records[i].label) {
        match[i] = 1;
        ++matches;
      }
    }

    if (scored == 0) {
      log_warn("annotator '" + matrix.annotator_ids()[a] +
               "' has no labeled cell; skill undefined, omitted");
      continue;
    }

    const double point =
        static_cast<double>(matches) / static_cast<double>(scored);
    auto statistic = [&](const std::vector<std::size_t>& chosen) {
      std::uint64_t m = 0;
      std::uint64_t l = 0;
      for (std::size_t idx : chosen) {
        m += match[idx];
        l += labeled[idx];
      }
      // A replicate that resamples away every labeled cell carries no
      // information; impute the full-sample point.
      if (l == 0) return point;
      return static_cast<double>(m) / static_cast<double>(l);
    };

    SkillRecord record;
    record.annotator_id = matrix.annotator_ids()[a];
    record.skill = bootstrap(matrix.instance_count(), statistic, cfg, threads);
    record.scored = scored;
    records.push_back(std::move(record));
  }

  std::sort(records.begin(), records.end(), [](const SkillRecord& a, const SkillRecord& b) {
    if (a.skill.point != b.skill.point) return a.skill.point > b.skill.point;
    return a.annotator_id < b.annotator_id;
  });
  for (std::size_t r = 0; r < records.size(); ++r) {
    records[r].rank = static_cast<std::uint32_t>(r + 1);
  }
  return records;
}

VoteDistribution vote_distribution(const std::map<Label, std::vector<std::string>>& votes,
                                   const std::map<std::string, double>& skills) {
  std::size_t voters = 0;
  for (const auto& [label, ids] : votes) {
    (void)label;
    voters += ids.size();
  }
  if (voters == 0) {
    throw Error(ErrorCode::EmptyInput, "vote distribution needs at least one vote");
  }

  auto weight_of = [&](const std::string& annotator_id) {
    const auto it = skills.find(annotator_id);
    return it == skills.end() ? 0.0 : it->second;
  };

  double total = 0.0;
  for (const auto& [label, ids] : votes) {
    (void)label;
    for (const std::string& id : ids) {
      const double w = weight_of(id);
      if (w < 0.0) {
        throw Error(ErrorCode::ConfigError, "skill weights must be >= 0");
      }
      total += w;
    }
  }

  VoteDistribution dist;
  dist.zero_skill_fallback = total == 0.0;
  for (const auto& [label, ids] : votes) {
    double mass = 0.0;
    if (dist.zero_skill_fallback) {
      mass = static_cast<double>(ids.size()) / static_cast<double>(voters);
    } else {
      for (const std::string& id : ids) mass += weight_of(id);
      mass /= total;
    }
    if (!ids.empty()) dist.probabilities[label] = mass;
  }
  return dist;
}

double instance_entropy(const std::map<Label, std::vector<std::string>>& votes,
                        const std::map<std::string, double>& skills) {
  const VoteDistribution dist = vote_distribution(votes, skills);
  double h = 0.0;
  std::size_t atoms = 0;
  for (const auto& [label, p] : dist.probabilities) {
    (void)label;
    if (p <= 0.0) continue;
    h -= p * std::log2(p);
    ++atoms;
  }
  // The exact value lies in [0, log2(atoms)]; clamp away FP overshoot so the
  // bound invariant holds verbatim.
  const double upper = atoms > 1 ? std::log2(static_cast<double>(atoms)) : 0.0;
  return std::min(std::max(h, 0.0), upper);
}

UncertaintyRecord task_uncertainty(const AnnotationMatrix& matrix,
                                   const std::vector<SkillRecord>& skills,
                                   const BootstrapConfig& cfg, int threads) {
  std::map<std::string, double> skill_points;
  for (const SkillRecord& record : skills) {
    skill_points[record.annotator_id] = record.skill.point;
  }

  UncertaintyRecord out;
  out.per_instance.reserve(matrix.instance_count());
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    std::map<Label, std::vector<std::string>> votes;
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      const Annotation& cell = matrix.at(i, a);
      if (!cell.is_labeled()) continue;
      votes[cell.label()].push_back(matrix.annotator_ids()[a]);
    }
    if (votes.empty()) {
      throw Error(ErrorCode::NoValidVotes,
                  "instance '" + matrix.instance_ids()[i] + "' has no labeled cell");
    }
    const VoteDistribution dist = vote_distribution(votes, skill_points);
    out.all_zero_skills = out.all_zero_skills || dist.zero_skill_fallback;
    out.per_instance.push_back(instance_entropy(votes, skill_points));
  }
  if (out.all_zero_skills) {
    log_warn("all voting annotators had zero skill on some instances; "
             "entropy weights fell back to plain vote counts there");
  }

  const std::vector<double>& h = out.per_instance;
  auto statistic = [&](const std::vector<std::size_t>& chosen) {
    double sum = 0.0;
    for (std::size_t idx : chosen) sum += h[idx];
    return sum / static_cast<double>(chosen.size());
  };
  out.mean_entropy = bootstrap(matrix.instance_count(), statistic, cfg, threads);
  return out;
}

}  // namespace aicrowd
