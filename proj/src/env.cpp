#include "scb/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>

#include <nlohmann/json.hpp>

namespace scb {

namespace {

// Minimal RFC-4180 reader: quoted fields may contain commas, newlines and
// doubled quotes. Returns one record per call; false at end of input.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string cell;
  bool in_quotes = false;
  bool saw_any = false;
  int c;
  while ((c = in.get()) != EOF) {
    saw_any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          cell.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cell));
      cell.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      break;
    } else {
      cell.push_back(ch);
    }
  }
  if (!saw_any) return false;
  fields.push_back(std::move(cell));
  return true;
}

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_missing(const std::string& cell) {
  const std::string t = trimmed(cell);
  return t.empty() || t == "?" || t == "NA" || t == "nan";
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trimmed(cell);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

Dataset dataset_from_rows(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& raw_rows,
                          const std::string& label_column,
                          const LoadOptions& options) {
  if (header.empty()) throw DataError("dataset: empty header");

  // Resolve the label column by name first, then as a 0-based index.
  int label_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trimmed(header[i]) == label_column) {
      label_idx = static_cast<int>(i);
      break;
    }
  }
  if (label_idx < 0) {
    char* end = nullptr;
    const long idx = std::strtol(label_column.c_str(), &end, 10);
    if (end == label_column.c_str() + label_column.size() && idx >= 0 &&
        idx < static_cast<long>(header.size())) {
      label_idx = static_cast<int>(idx);
    }
  }
  if (label_idx < 0) {
    throw DataError("dataset: label column '" + label_column + "' not found");
  }

  const std::size_t num_cols = header.size();

  // Drop rows with missing values or wrong arity.
  std::vector<const std::vector<std::string>*> rows;
  std::size_t dropped = 0;
  for (const auto& row : raw_rows) {
    if (row.size() != num_cols ||
        std::any_of(row.begin(), row.end(),
                    [](const std::string& c) { return is_missing(c); })) {
      ++dropped;
      continue;
    }
    rows.push_back(&row);
  }
  if (rows.empty()) throw DataError("dataset: no usable rows after dropping missing values");
  if (dropped > 0) {
    std::cerr << "dataset: dropped " << dropped << " rows with missing values\n";
  }

  // A feature column is numeric iff every retained value parses as a finite
  // real; otherwise it is categorical and will be one-hot encoded.
  std::vector<bool> numeric(num_cols, true);
  for (std::size_t c = 0; c < num_cols; ++c) {
    if (static_cast<int>(c) == label_idx) continue;
    double value;
    for (const auto* row : rows) {
      if (!parse_double((*row)[c], value)) {
        numeric[c] = false;
        break;
      }
    }
  }

  // Category vocabularies in first-appearance order.
  std::vector<std::vector<std::string>> categories(num_cols);
  for (std::size_t c = 0; c < num_cols; ++c) {
    if (static_cast<int>(c) == label_idx || numeric[c]) continue;
    for (const auto* row : rows) {
      const std::string value = trimmed((*row)[c]);
      if (std::find(categories[c].begin(), categories[c].end(), value) ==
          categories[c].end()) {
        categories[c].push_back(value);
      }
    }
  }

  Dataset ds;
  for (const auto* row : rows) {
    const std::string label = trimmed((*row)[static_cast<std::size_t>(label_idx)]);
    if (std::find(ds.label_mapping.begin(), ds.label_mapping.end(), label) ==
        ds.label_mapping.end()) {
      ds.label_mapping.push_back(label);
    }
  }
  ds.num_classes = static_cast<int>(ds.label_mapping.size());
  if (ds.num_classes < 2) {
    throw DataError("dataset: label column has fewer than 2 classes");
  }

  int dim = 0;
  for (std::size_t c = 0; c < num_cols; ++c) {
    if (static_cast<int>(c) == label_idx) continue;
    if (numeric[c]) {
      ds.feature_names.push_back(trimmed(header[c]));
      ++dim;
    } else {
      for (const std::string& v : categories[c]) {
        ds.feature_names.push_back(trimmed(header[c]) + "=" + v);
        ++dim;
      }
    }
  }

  const auto n = static_cast<std::int64_t>(rows.size());
  ds.contexts.resize(n, dim);
  ds.labels.resize(static_cast<std::size_t>(n));
  for (std::int64_t r = 0; r < n; ++r) {
    const auto& row = *rows[static_cast<std::size_t>(r)];
    int col = 0;
    for (std::size_t c = 0; c < num_cols; ++c) {
      if (static_cast<int>(c) == label_idx) continue;
      if (numeric[c]) {
        double value = 0.0;
        parse_double(row[c], value);
        ds.contexts(r, col++) = value;
      } else {
        const std::string value = trimmed(row[c]);
        for (const std::string& v : categories[c]) {
          ds.contexts(r, col++) = value == v ? 1.0 : 0.0;
        }
      }
    }
    const std::string label = trimmed(row[static_cast<std::size_t>(label_idx)]);
    const auto it = std::find(ds.label_mapping.begin(), ds.label_mapping.end(), label);
    ds.labels[static_cast<std::size_t>(r)] =
        static_cast<ArmId>(it - ds.label_mapping.begin());
  }
  ds.dropped_rows = dropped;

  if (options.standardize) {
    // z-score numeric passthrough columns only; indicators stay 0/1 and
    // zero-variance columns pass through unchanged (keeps constant features
    // such as intercept columns intact).
    int col = 0;
    for (std::size_t c = 0; c < num_cols; ++c) {
      if (static_cast<int>(c) == label_idx) continue;
      if (!numeric[c]) {
        col += static_cast<int>(categories[c].size());
        continue;
      }
      const double mean = ds.contexts.col(col).mean();
      const double var =
          (ds.contexts.col(col).array() - mean).square().sum() / static_cast<double>(n);
      const double sd = std::sqrt(var);
      if (sd > 0.0) {
        ds.contexts.col(col) = (ds.contexts.col(col).array() - mean) / sd;
      }
      ++col;
    }
  }
  return ds;
}

Dataset load_dataset(const std::string& path, const std::string& label_column,
                     const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("dataset: cannot open '" + path + "'");
  std::vector<std::string> header;
  if (!read_csv_record(in, header)) throw DataError("dataset: empty file");
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  while (read_csv_record(in, fields)) {
    if (fields.size() == 1 && trimmed(fields[0]).empty()) continue;  // blank line
    rows.push_back(fields);
  }
  return dataset_from_rows(header, rows, label_column, options);
}

void write_dataset_manifest(const Dataset& dataset, const std::string& path) {
  nlohmann::json j;
  j["n"] = dataset.size();
  j["K"] = dataset.num_classes;
  j["d"] = dataset.dim();
  j["label_mapping"] = dataset.label_mapping;
  j["dropped_rows"] = dataset.dropped_rows;
  j["feature_names"] = dataset.feature_names;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("manifest: cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

BanditEnv::BanditEnv(std::shared_ptr<const Dataset> dataset, std::int64_t horizon,
                     RngStream rng, SamplingMode mode)
    : dataset_(std::move(dataset)), horizon_(horizon), rng_(rng), mode_(mode) {
  if (!dataset_ || dataset_->size() == 0) throw ConfigError("env: dataset is empty");
  if (horizon_ <= 0) throw ConfigError("env: horizon must be positive");
  permutation_.resize(static_cast<std::size_t>(dataset_->size()));
  std::iota(permutation_.begin(), permutation_.end(), 0);
}

void BanditEnv::reshuffle() {
  // Fisher-Yates with the environment's own stream.
  for (std::int64_t i = static_cast<std::int64_t>(permutation_.size()) - 1; i > 0; --i) {
    const std::int64_t j = rng_.uniform_int(i + 1);
    std::swap(permutation_[static_cast<std::size_t>(i)],
              permutation_[static_cast<std::size_t>(j)]);
  }
}

Context BanditEnv::step() {
  if (t_ >= horizon_) throw ProtocolError("env: stepped past the horizon");
  if (reward_pending_) throw ProtocolError("env: reward() not called for previous step");
  const std::int64_t n = dataset_->size();
  if (mode_ == SamplingMode::IidWithReplacement) {
    current_row_ = rng_.uniform_int(n);
  } else {
    if (epoch_pos_ == 0) reshuffle();
    current_row_ = permutation_[static_cast<std::size_t>(epoch_pos_)];
    epoch_pos_ = (epoch_pos_ + 1) % n;
  }
  reward_pending_ = true;
  ++t_;
  return dataset_->contexts.row(current_row_).transpose();
}

int BanditEnv::reward(ArmId arm) {
  if (!reward_pending_) throw ProtocolError("env: reward() called without a pending step");
  if (arm < 0 || arm >= dataset_->num_classes) {
    throw DataError("env: arm out of range");
  }
  reward_pending_ = false;
  return dataset_->labels[static_cast<std::size_t>(current_row_)] == arm ? 1 : 0;
}

}  // namespace scb
