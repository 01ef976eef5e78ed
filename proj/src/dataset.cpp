#include "aicrowd/dataset.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "aicrowd/csv.hpp"
#include "aicrowd/error.hpp"
#include "aicrowd/log.hpp"
#include "aicrowd/random.hpp"

namespace aicrowd {

Dataset::Dataset(std::string name, LabelSchema schema, std::vector<Instance> instances)
    : name_(std::move(name)), schema_(std::move(schema)), instances_(std::move(instances)) {
  if (trim(name_).empty()) {
    throw Error(ErrorCode::ConfigError, "dataset name must be non-empty");
  }
  std::unordered_set<std::string> seen;
  seen.reserve(instances_.size());
  for (const Instance& inst : instances_) {
    if (!seen.insert(inst.id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate instance id '" + inst.id + "'");
    }
    if (inst.text.empty()) {
      throw Error(ErrorCode::EmptyAfterCleaning, "instance '" + inst.id + "' has empty text");
    }
    if (inst.gold && !schema_.contains(*inst.gold)) {
      throw Error(ErrorCode::UnknownLabel,
                  "gold label '" + *inst.gold + "' of instance '" + inst.id +
                      "' is not in the schema");
    }
  }
}

Dataset load_dataset(const std::string& path, const LabelSchema& schema,
                     std::string name, const ColumnMap& columns) {
  const std::vector<CsvRow> rows = read_csv_file(path);
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyFile, "'" + path + "' has no header row");
  }
  const CsvRow& header = rows.front();

  auto column_index = [&](const std::string& column) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == column) return i;
    }
    return std::nullopt;
  };

  const auto text_col = column_index(columns.text);
  if (!text_col) {
    throw Error(ErrorCode::MissingColumn,
                "'" + path + "' lacks required column '" + columns.text + "'");
  }
  const auto id_col = column_index(columns.id);      // row index when absent
  const auto gold_col = column_index(columns.gold);  // gold optional per row

  std::vector<Instance> instances;
  instances.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::ParseError,
                  "'" + path + "' row " + std::to_string(r) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    Instance inst;
    inst.id = id_col ? row[*id_col] : std::to_string(r - 1);
    inst.text = row[*text_col];
    if (gold_col) {
      const std::string_view gold = trim(row[*gold_col]);
      if (!gold.empty()) {
        const auto idx = schema.index_of(gold);
        if (!idx) {
          throw Error(ErrorCode::UnknownLabel,
                      "gold label '" + std::string(gold) + "' at row " + std::to_string(r) +
                          " is not in the schema");
        }
        inst.gold = schema.labels()[*idx];
      }
    }
    instances.push_back(std::move(inst));
  }
  if (instances.empty()) {
    throw Error(ErrorCode::EmptyFile, "'" + path + "' has no data rows");
  }
  return Dataset(std::move(name), schema, std::move(instances));
}

std::string clean_text(std::string_view raw, std::size_t max_units) {
  if (max_units == 0) {
    throw Error(ErrorCode::ConfigError, "max_units must be positive");
  }

  // Strip complete <...> tag spans (a lone '<' with no later '>' stays; a
  // second pass then finds nothing new, which keeps the function idempotent),
  // and drop control characters that are not whitespace.
  std::string stripped;
  stripped.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    const char c = raw[i];
    if (c == '<') {
      const std::size_t close = raw.find('>', i + 1);
      if (close != std::string_view::npos) {
        stripped += ' ';
        i = close + 1;
        continue;
      }
    }
    const unsigned char u = static_cast<unsigned char>(c);
    const bool is_ws = c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
    if ((u < 0x20 && !is_ws) || u == 0x7F) {
      ++i;
      continue;
    }
    stripped += c;
    ++i;
  }

  // Collapse whitespace runs and truncate on token boundaries.
  std::string out;
  out.reserve(stripped.size());
  std::size_t tokens = 0;
  std::size_t pos = 0;
  while (pos < stripped.size() && tokens < max_units) {
    while (pos < stripped.size() &&
           std::isspace(static_cast<unsigned char>(stripped[pos]))) {
      ++pos;
    }
    const std::size_t start = pos;
    while (pos < stripped.size() &&
           !std::isspace(static_cast<unsigned char>(stripped[pos]))) {
      ++pos;
    }
    if (pos == start) break;
    if (tokens) out += ' ';
    out.append(stripped, start, pos - start);
    ++tokens;
  }

  if (out.empty()) {
    throw Error(ErrorCode::EmptyAfterCleaning, "no text remains after cleaning");
  }
  return out;
}

namespace {

// Uniform draw of k distinct positions out of `pool` (selection sampling via
// partial Fisher-Yates; order of the draw is discarded by the caller).
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool,
                                                  std::size_t k, std::mt19937_64& rng) {
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t pick = j + static_cast<std::size_t>(
                                     uniform_below(rng, pool.size() - j));
    std::swap(pool[j], pool[pick]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

Dataset stratified_sample(const Dataset& dataset, std::size_t n, std::uint64_t seed) {
  const std::size_t total = dataset.size();
  if (n == 0) {
    throw Error(ErrorCode::ConfigError, "sample size must be positive");
  }
  if (n > total) {
    throw Error(ErrorCode::SampleTooLarge,
                "sample size " + std::to_string(n) + " exceeds dataset size " +
                    std::to_string(total));
  }

  std::size_t with_gold = 0;
  for (const Instance& inst : dataset.instances()) {
    if (inst.gold) ++with_gold;
  }

  std::vector<std::size_t> chosen;
  chosen.reserve(n);

  if (with_gold == 0) {
    log_warn("dataset '" + dataset.name() +
             "' has no gold labels; falling back to simple random sampling");
    std::vector<std::size_t> pool(total);
    for (std::size_t i = 0; i < total; ++i) pool[i] = i;
    std::mt19937_64 rng(mix64(seed));
    chosen = draw_without_replacement(std::move(pool), n, rng);
  } else if (with_gold < total) {
    throw Error(ErrorCode::MissingStratumKey,
                std::to_string(total - with_gold) +
                    " instances lack the gold label used as the stratum key");
  } else {
    // Class quotas by largest remainder, in integer arithmetic: quota_c is
    // floor(n * m_c / total) plus one of the leftover seats awarded by
    // descending remainder (label order breaks remainder ties).
    std::map<Label, std::vector<std::size_t>> strata;  // label -> indices, both ordered
    for (std::size_t i = 0; i < total; ++i) {
      strata[*dataset.instances()[i].gold].push_back(i);
    }

    struct Seat {
      std::size_t remainder;
      const Label* label;
    };
    std::map<Label, std::size_t> quota;
    std::vector<Seat> seats;
    std::size_t assigned = 0;
    for (const auto& [label, members] : strata) {
      const std::size_t num = n * members.size();
      quota[label] = num / total;
      assigned += num / total;
      seats.push_back({num % total, &label});
    }
    std::sort(seats.begin(), seats.end(), [](const Seat& a, const Seat& b) {
      if (a.remainder != b.remainder) return a.remainder > b.remainder;
      return *a.label < *b.label;
    });
    for (std::size_t s = 0; s < n - assigned; ++s) {
      ++quota[*seats[s].label];
    }

    for (const auto& [label, members] : strata) {
      std::mt19937_64 rng(mix64(seed ^ mix64(fnv1a64(label))));
      auto picks = draw_without_replacement(members, quota[label], rng);
      chosen.insert(chosen.end(), picks.begin(), picks.end());
    }
  }

  // Keep the corpus order regardless of how classes were visited.
  std::sort(chosen.begin(), chosen.end());
  std::vector<Instance> sample;
  sample.reserve(n);
  for (std::size_t idx : chosen) {
    sample.push_back(dataset.instances()[idx]);
  }
  return Dataset(dataset.name(), dataset.schema(), std::move(sample));
}

}  // namespace aicrowd
