#include "aicrowd/validation.hpp"

#include <algorithm>
#include <map>

#include "aicrowd/error.hpp"

namespace aicrowd {

namespace {

void check_aligned(std::size_t pred, std::size_t gold) {
  if (pred != gold) {
    throw Error(ErrorCode::LengthMismatch,
                "predictions (" + std::to_string(pred) + ") and gold (" +
                    std::to_string(gold) + ") are not aligned");
  }
  if (pred == 0) {
    throw Error(ErrorCode::EmptyInput, "no instances to score");
  }
}

// Encoded view of one prediction column: class index per instance, -1 for
// error/missing cells, plus the gold indices over a shared class universe.
struct EncodedPredictions {
  std::vector<int> pred;
  std::vector<int> gold;
  std::size_t class_count = 0;
};

EncodedPredictions encode(const std::vector<Annotation>& predictions,
                          const std::vector<Label>& gold) {
  check_aligned(predictions.size(), gold.size());
  EncodedPredictions enc;
  std::map<Label, int> classes;
  auto class_of = [&](const Label& label) {
    const auto [it, inserted] = classes.emplace(label, static_cast<int>(classes.size()));
    (void)inserted;
    return it->second;
  };
  enc.pred.reserve(predictions.size());
  enc.gold.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    enc.gold.push_back(class_of(gold[i]));
    enc.pred.push_back(predictions[i].is_labeled() ? class_of(predictions[i].label()) : -1);
  }
  enc.class_count = classes.size();
  return enc;
}

double macro_f1_over(const EncodedPredictions& enc, const std::vector<std::size_t>& chosen) {
  std::vector<std::uint64_t> tp(enc.class_count, 0);
  std::vector<std::uint64_t> fp(enc.class_count, 0);
  std::vector<std::uint64_t> fn(enc.class_count, 0);
  for (std::size_t idx : chosen) {
    const int p = enc.pred[idx];
    const int g = enc.gold[idx];
    if (p == g) {
      ++tp[g];
    } else {
      ++fn[g];
      if (p >= 0) ++fp[p];
    }
  }

  // Average F1 over the union of classes observed in gold or in a labeled
  // prediction; a class outside the union has tp+fp+fn == 0.
  double sum = 0.0;
  std::size_t observed = 0;
  for (std::size_t c = 0; c < enc.class_count; ++c) {
    if (tp[c] + fp[c] + fn[c] == 0) continue;
    ++observed;
    const double precision =
        tp[c] + fp[c] ? static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]) : 0.0;
    const double recall =
        tp[c] + fn[c] ? static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c]) : 0.0;
    if (precision + recall > 0.0) {
      sum += 2.0 * precision * recall / (precision + recall);
    }
  }
  return observed ? sum / static_cast<double>(observed) : 0.0;
}

std::vector<std::size_t> all_indices(std::size_t count) {
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  return idx;
}

}  // namespace

double accuracy(const std::vector<Annotation>& predictions, const std::vector<Label>& gold) {
  check_aligned(predictions.size(), gold.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predictions[i].is_labeled() && predictions[i].label() == gold[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

double macro_f1(const std::vector<Annotation>& predictions, const std::vector<Label>& gold) {
  const EncodedPredictions enc = encode(predictions, gold);
  return macro_f1_over(enc, all_indices(gold.size()));
}

std::vector<LeaderboardRow> evaluate_crowd(const AnnotationMatrix& matrix,
                                           const ConsensusTable& consensus,
                                           const std::vector<std::optional<Label>>& gold,
                                           const BootstrapConfig& cfg, int threads) {
  if (gold.size() != matrix.instance_count() ||
      consensus.records.size() != matrix.instance_count()) {
    throw Error(ErrorCode::LengthMismatch,
                "gold and consensus must cover every matrix instance");
  }
  std::vector<Label> gold_labels;
  gold_labels.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold[i]) {
      throw Error(ErrorCode::MissingGold,
                  "instance '" + matrix.instance_ids()[i] + "' has no gold label");
    }
    gold_labels.push_back(*gold[i]);
  }

  struct Subject {
    std::string name;
    std::vector<Annotation> predictions;
  };
  std::vector<Subject> subjects;
  subjects.reserve(matrix.annotator_count() + 1);
  for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
    const std::string& id = matrix.annotator_ids()[a];
    if (id == kMajorityVoteSubject) {
      throw Error(ErrorCode::ConfigError,
                  "annotator id '" + id + "' collides with the reserved consensus row");
    }
    Subject subject{id, {}};
    subject.predictions.reserve(matrix.instance_count());
    for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
      subject.predictions.push_back(matrix.at(i, a));
    }
    subjects.push_back(std::move(subject));
  }
  Subject mv{std::string(kMajorityVoteSubject), {}};
  mv.predictions.reserve(matrix.instance_count());
  for (const ConsensusRecord& record : consensus.records) {
    mv.predictions.push_back(Annotation::labeled(record.label));
  }
  subjects.push_back(std::move(mv));

  std::vector<LeaderboardRow> rows;
  rows.reserve(subjects.size());
  for (const Subject& subject : subjects) {
    const EncodedPredictions enc = encode(subject.predictions, gold_labels);

    std::vector<unsigned char> hit(matrix.instance_count(), 0);
    for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
      hit[i] = enc.pred[i] >= 0 && enc.pred[i] == enc.gold[i];
    }
    auto accuracy_stat = [&](const std::vector<std::size_t>& chosen) {
      std::uint64_t hits = 0;
      for (std::size_t idx : chosen) hits += hit[idx];
      return static_cast<double>(hits) / static_cast<double>(chosen.size());
    };
    auto f1_stat = [&](const std::vector<std::size_t>& chosen) {
      return macro_f1_over(enc, chosen);
    };

    LeaderboardRow row;
    row.subject = subject.name;
    row.accuracy = bootstrap(matrix.instance_count(), accuracy_stat, cfg, threads);
    row.macro_f1 = bootstrap(matrix.instance_count(), f1_stat, cfg, threads);
    rows.push_back(std::move(row));
  }

  std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.macro_f1.point != b.macro_f1.point) return a.macro_f1.point > b.macro_f1.point;
    if (a.accuracy.point != b.accuracy.point) return a.accuracy.point > b.accuracy.point;
    return a.subject < b.subject;
  });
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r].rank = static_cast<std::uint32_t>(r + 1);
  }
  return rows;
}

}  // namespace aicrowd
