#include "aicrowd/reliability.hpp"

#include <unordered_map>

#include "aicrowd/error.hpp"

namespace aicrowd {

const char* gate_name(ReliabilityGate gate) {
  switch (gate) {
    case ReliabilityGate::Strong: return "strong";
    case ReliabilityGate::Moderate: return "moderate";
    case ReliabilityGate::Insufficient: return "insufficient";
  }
  return "insufficient";
}

ReliabilityGate parse_gate(std::string_view name) {
  if (name == "strong") return ReliabilityGate::Strong;
  if (name == "moderate") return ReliabilityGate::Moderate;
  if (name == "insufficient") return ReliabilityGate::Insufficient;
  throw Error(ErrorCode::ParseError, "unknown gate '" + std::string(name) + "'");
}

ReliabilityGate gate_for_alpha(double alpha_point) {
  if (alpha_point > 0.8) return ReliabilityGate::Strong;
  if (alpha_point > 0.6) return ReliabilityGate::Moderate;
  return ReliabilityGate::Insufficient;
}

namespace {

// Labeled-cell counts of one instance over the distinct labels seen in the
// matrix. total < 2 means the unit contributes no pairs.
struct UnitCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

std::vector<UnitCounts> collect_units(const AnnotationMatrix& matrix,
                                      std::size_t* label_count) {
  std::unordered_map<std::string, std::size_t> label_index;
  std::vector<UnitCounts> units(matrix.instance_count());
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    UnitCounts& unit = units[i];
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      const Annotation& cell = matrix.at(i, a);
      if (!cell.is_labeled()) continue;
      auto [it, inserted] =
          label_index.emplace(cell.label(), label_index.size());
      const std::size_t idx = it->second;
      (void)inserted;
      if (unit.counts.size() <= idx) unit.counts.resize(label_index.size(), 0);
      ++unit.counts[idx];
      ++unit.total;
    }
  }
  *label_count = label_index.size();
  for (UnitCounts& unit : units) unit.counts.resize(*label_count, 0);
  return units;
}

struct AlphaComputation {
  bool insufficient = false;  // no unit with >= 2 labeled values
  bool degenerate = false;    // expected disagreement zero (one label overall)
  double alpha = 0.0;
};

// Closed form of the coincidence-matrix alpha: each pairable unit adds
// (m_u^2 - sum_c m_uc^2)/(m_u - 1) observed disagreement, and the expected
// term comes from the integer marginals, so
//   alpha = 1 - (n - 1) * disagreement / (n^2 - sum_c n_c^2).
AlphaComputation alpha_over(const std::vector<UnitCounts>& units,
                            const std::vector<std::size_t>& chosen,
                            std::size_t label_count) {
  double disagreement = 0.0;
  std::vector<std::uint64_t> marginals(label_count, 0);
  std::uint64_t n = 0;
  bool any = false;
  for (std::size_t idx : chosen) {
    const UnitCounts& unit = units[idx];
    if (unit.total < 2) continue;
    any = true;
    n += unit.total;
    std::uint64_t sum_sq = 0;
    for (std::size_t c = 0; c < label_count; ++c) {
      marginals[c] += unit.counts[c];
      sum_sq += unit.counts[c] * unit.counts[c];
    }
    disagreement += static_cast<double>(unit.total * unit.total - sum_sq) /
                    static_cast<double>(unit.total - 1);
  }
  if (!any) return {true, false, 0.0};

  std::uint64_t marginal_sq = 0;
  for (std::uint64_t m : marginals) marginal_sq += m * m;
  const std::uint64_t expected_pairs = n * n - marginal_sq;
  if (expected_pairs == 0) return {false, true, 1.0};

  AlphaComputation out;
  out.alpha = 1.0 - static_cast<double>(n - 1) * disagreement /
                        static_cast<double>(expected_pairs);
  return out;
}

std::vector<std::size_t> all_indices(std::size_t count) {
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  return idx;
}

}  // namespace

AlphaResult krippendorff_alpha_detail(const AnnotationMatrix& matrix) {
  std::size_t label_count = 0;
  const auto units = collect_units(matrix, &label_count);
  const auto comp = alpha_over(units, all_indices(units.size()), label_count);
  if (comp.insufficient) {
    throw Error(ErrorCode::InsufficientPairs,
                "no instance has two or more labeled values");
  }
  return {comp.alpha, comp.degenerate};
}

double krippendorff_alpha(const AnnotationMatrix& matrix) {
  return krippendorff_alpha_detail(matrix).value;
}

ReliabilityRecord reliability_report(const AnnotationMatrix& matrix,
                                     const BootstrapConfig& cfg, int threads) {
  std::size_t label_count = 0;
  const auto units = collect_units(matrix, &label_count);
  const AlphaResult detail = krippendorff_alpha_detail(matrix);

  // Replicates that resample away every pairable unit carry no information;
  // they are imputed with the full-sample point so the CI stays defined.
  auto statistic = [&](const std::vector<std::size_t>& chosen) {
    const auto comp = alpha_over(units, chosen, label_count);
    if (comp.insufficient) return detail.value;
    return comp.alpha;
  };

  ReliabilityRecord record;
  record.alpha = bootstrap(matrix.instance_count(), statistic, cfg, threads);
  record.gate = gate_for_alpha(record.alpha.point);
  record.degenerate = detail.degenerate;
  return record;
}

}  // namespace aicrowd
