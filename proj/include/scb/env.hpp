#pragma once

#include <memory>
#include <string>
#include <vector>

#include "scb/rng.hpp"
#include "scb/types.hpp"

namespace scb {

struct LoadOptions {
  // z-score numeric passthrough columns with full-dataset statistics.
  // One-hot indicator columns and zero-variance columns are left untouched.
  bool standardize = true;
};

// Immutable multiclass dataset in bandit form: contexts are the encoded
// feature rows, labels are arm ids assigned by first appearance.
struct Dataset {
  Eigen::MatrixXd contexts;  // n x d
  std::vector<ArmId> labels;
  int num_classes = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_mapping;  // arm id -> original label
  std::size_t dropped_rows = 0;

  int dim() const { return static_cast<int>(contexts.cols()); }
  std::int64_t size() const { return static_cast<std::int64_t>(contexts.rows()); }
};

// Loads an RFC-4180 style CSV with a header row. The label column may be
// named or given as a 0-based index. Rows with missing values are dropped
// (count recorded on the dataset). Numeric feature columns pass through as
// reals; other columns are one-hot encoded with category order by first
// appearance. Labels map to arm ids by first appearance.
Dataset load_dataset(const std::string& path, const std::string& label_column,
                     const LoadOptions& options = {});

// Same pipeline over in-memory rows (header + string cells); used by tests
// and the synthetic generators.
Dataset dataset_from_rows(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows,
                          const std::string& label_column,
                          const LoadOptions& options = {});

// JSON manifest with n, K, d, label_mapping and dropped-row count.
void write_dataset_manifest(const Dataset& dataset, const std::string& path);

enum class SamplingMode { CycleShuffled, IidWithReplacement };

// Sequential bandit view of a dataset. step() emits the next context;
// reward(arm) must then be called exactly once and reveals only the chosen
// arm's reward. When the horizon outlives the dataset, traversal cycles with
// a fresh permutation per epoch (or samples rows i.i.d. with replacement).
class BanditEnv {
 public:
  BanditEnv(std::shared_ptr<const Dataset> dataset, std::int64_t horizon,
            RngStream rng, SamplingMode mode = SamplingMode::CycleShuffled);

  Context step();
  int reward(ArmId arm);

  std::int64_t horizon() const { return horizon_; }
  std::int64_t t() const { return t_; }
  bool done() const { return t_ >= horizon_; }
  const Dataset& dataset() const { return *dataset_; }

 private:
  void reshuffle();

  std::shared_ptr<const Dataset> dataset_;
  std::int64_t horizon_;
  RngStream rng_;
  SamplingMode mode_;
  std::vector<std::int64_t> permutation_;
  std::int64_t t_ = 0;
  std::int64_t epoch_pos_ = 0;
  std::int64_t current_row_ = -1;
  bool reward_pending_ = false;
};

}  // namespace scb
