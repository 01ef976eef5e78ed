#pragma once

#include <cstdint>

#include "aicrowd/core.hpp"

namespace aicrowd {

struct ConsensusRecord {
  std::string instance_id;
  Label label;
  // Normalized margin (c1 - c2) / valid_votes between the top two vote
  // counts; 1 for unanimity, 0 for a tie.
  double consistency = 0.0;
  bool tie = false;
  std::uint32_t valid_votes = 0;

  bool operator==(const ConsensusRecord&) const = default;
};

struct ConsensusTable {
  std::vector<ConsensusRecord> records;  // matrix row order

  bool operator==(const ConsensusTable&) const = default;
};

// Majority vote per instance over Labeled cells only; ties resolved by the
// byte-wise lowest label text. Throws NoValidVotes when an instance has no
// labeled cell.
ConsensusTable majority_vote(const AnnotationMatrix& matrix);

double tie_rate(const ConsensusTable& table);

}  // namespace aicrowd
