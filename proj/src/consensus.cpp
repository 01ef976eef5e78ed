#include "aicrowd/consensus.hpp"

#include <map>

#include "aicrowd/error.hpp"

namespace aicrowd {

ConsensusTable majority_vote(const AnnotationMatrix& matrix) {
  ConsensusTable table;
  table.records.reserve(matrix.instance_count());

  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    // std::map keeps labels in byte order, so the first max-count entry is
    // already the lexicographic tie winner.
    std::map<Label, std::uint32_t> counts;
    std::uint32_t valid = 0;
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      const Annotation& cell = matrix.at(i, a);
      if (!cell.is_labeled()) continue;
      ++counts[cell.label()];
      ++valid;
    }
    if (valid == 0) {
      throw Error(ErrorCode::NoValidVotes,
                  "instance '" + matrix.instance_ids()[i] + "' has no labeled cell");
    }

    const Label* winner = nullptr;
    std::uint32_t c1 = 0;  // winning count
    std::uint32_t c2 = 0;  // second-highest count
    bool tie = false;
    for (const auto& [label, count] : counts) {
      if (count > c1) {
        c2 = c1;
        c1 = count;
        winner = &label;
        tie = false;
      } else if (count == c1) {
        tie = true;
        c2 = count;
      } else if (count > c2) {
        c2 = count;
      }
    }

    ConsensusRecord record;
    record.instance_id = matrix.instance_ids()[i];
    record.label = *winner;
    record.consistency = static_cast<double>(c1 - c2) / static_cast<double>(valid);
    record.tie = tie;
    record.valid_votes = valid;
    table.records.push_back(std::move(record));
  }
  return table;
}

double tie_rate(const ConsensusTable& table) {
  if (table.records.empty()) {
    throw Error(ErrorCode::EmptyTable, "tie rate of an empty consensus table");
  }
  std::size_t ties = 0;
  for (const ConsensusRecord& record : table.records) {
    if (record.tie) ++ties;
  }
  return static_cast<double>(ties) / static_cast<double>(table.records.size());
}

}  // namespace aicrowd
