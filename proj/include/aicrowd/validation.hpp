#pragma once

#include <cstdint>
#include <string_view>

#include "aicrowd/bootstrap.hpp"
#include "aicrowd/consensus.hpp"
#include "aicrowd/core.hpp"

namespace aicrowd {

// Reserved subject name for the consensus row of the leaderboard. Annotator
// ids may not collide with it.
inline constexpr std::string_view kMajorityVoteSubject = "MajorityVote";

// Fraction of instances where the prediction is Labeled and equals gold.
// Missing / error predictions count as wrong. Throws LengthMismatch or
// EmptyInput.
double accuracy(const std::vector<Annotation>& predictions,
                const std::vector<Label>& gold);

// Macro-averaged F1 over the union of classes seen in gold or in labeled
// predictions. A class with zero predicted positives has precision 0; zero
// actual positives gives recall 0; P + R == 0 gives F1 0.
double macro_f1(const std::vector<Annotation>& predictions,
                const std::vector<Label>& gold);

struct LeaderboardRow {
  std::string subject;  // annotator id or kMajorityVoteSubject
  EstimateWithCI accuracy;
  EstimateWithCI macro_f1;
  std::uint32_t rank = 0;

  bool operator==(const LeaderboardRow&) const = default;
};

// Scores every annotator plus the consensus against gold labels, with
// bootstrap CIs over instances. Rows sorted by (-macro_f1.point,
// -accuracy.point, subject); rank is 1-based position after the sort.
// Throws MissingGold when any instance lacks a gold label.
std::vector<LeaderboardRow> evaluate_crowd(const AnnotationMatrix& matrix,
                                           const ConsensusTable& consensus,
                                           const std::vector<std::optional<Label>>& gold,
                                           const BootstrapConfig& cfg,
                                           int threads = 1);

}  // namespace aicrowd
