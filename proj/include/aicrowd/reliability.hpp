#pragma once

#include <string_view>

#include "aicrowd/bootstrap.hpp"
#include "aicrowd/core.hpp"

namespace aicrowd {

// Protocol gate on the alpha point estimate: proceed to aggregation only
// above 0.6, with 0.8 the strong-reliability mark.
enum class ReliabilityGate { Strong, Moderate, Insufficient };

const char* gate_name(ReliabilityGate gate);
ReliabilityGate parse_gate(std::string_view name);
ReliabilityGate gate_for_alpha(double alpha_point);

struct AlphaResult {
  double value = 0.0;
  // All pairable values were a single label (expected disagreement zero);
  // reported as 1.0 with this flag instead of NaN.
  bool degenerate = false;
};

// Krippendorff's alpha, nominal level, over the Labeled cells of the matrix.
// ResponseError and Missing cells are excluded from pairing; instances with
// fewer than two labeled values are dropped. Throws InsufficientPairs when
// no instance is pairable.
double krippendorff_alpha(const AnnotationMatrix& matrix);
AlphaResult krippendorff_alpha_detail(const AnnotationMatrix& matrix);

struct ReliabilityRecord {
  EstimateWithCI alpha;
  ReliabilityGate gate = ReliabilityGate::Insufficient;
  bool degenerate = false;
};

// Alpha with an instance-level bootstrap CI and the gate decision.
ReliabilityRecord reliability_report(const AnnotationMatrix& matrix,
                                     const BootstrapConfig& cfg,
                                     int threads = 1);

}  // namespace aicrowd
