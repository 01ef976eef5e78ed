#pragma once

#include <cstdint>
#include <string>

#include "aicrowd/core.hpp"

namespace aicrowd {

class Dataset {
 public:
  Dataset(std::string name, LabelSchema schema, std::vector<Instance> instances);

  const std::string& name() const { return name_; }
  const LabelSchema& schema() const { return schema_; }
  const std::vector<Instance>& instances() const { return instances_; }
  std::size_t size() const { return instances_.size(); }

 private:
  std::string name_;
  LabelSchema schema_;
  std::vector<Instance> instances_;
};

// Maps CSV header names to instance roles. The id column is optional (row
// index is used when absent); the gold column is optional per row.
struct ColumnMap {
  std::string text = "text";
  std::string id = "instance_id";
  std::string gold = "gold_label";
};

Dataset load_dataset(const std::string& path, const LabelSchema& schema,
                     std::string name, const ColumnMap& columns = {});

// Strips HTML/XML tags, drops non-whitespace control characters, collapses
// whitespace runs to single spaces and truncates to at most max_units
// whitespace-delimited tokens. Idempotent.
std::string clean_text(std::string_view raw, std::size_t max_units);

// Largest-remainder apportionment of n over gold-label proportions, then a
// uniform seeded draw without replacement inside each class. Output keeps
// the dataset's original instance order. Falls back to simple random
// sampling (same seed discipline, logged warning) when no instance has a
// gold label; a partially labeled dataset is an error.
Dataset stratified_sample(const Dataset& dataset, std::size_t n,
                          std::uint64_t seed);

}  // namespace aicrowd
