#include "scb/metrics.hpp"

namespace scb {

namespace {

void check_binary(std::span<const int> rewards) {
  if (rewards.empty()) {
    throw DataError("regret: reward sequence must be non-empty");
  }
  for (int r : rewards) {
    if (r != 0 && r != 1) {
      throw DataError("regret: rewards must be 0 or 1");
    }
  }
}

}  // namespace

double normalized_cumulative_regret(std::span<const int> rewards) {
  check_binary(rewards);
  std::int64_t misses = 0;
  for (int r : rewards) misses += 1 - r;
  return static_cast<double>(misses) / static_cast<double>(rewards.size());
}

std::vector<double> regret_curve(std::span<const int> rewards) {
  check_binary(rewards);
  std::vector<double> curve(rewards.size());
  std::int64_t misses = 0;
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    misses += 1 - rewards[t];
    curve[t] = static_cast<double>(misses) / static_cast<double>(t + 1);
  }
  return curve;
}

double noncontextual_fraction(std::span<const DecisionRecord> records) {
  if (records.empty()) {
    throw DataError("noncontextual_fraction: record sequence must be non-empty");
  }
  std::int64_t nc = 0;
  for (const DecisionRecord& rec : records) {
    if (rec.provenance == Provenance::Noncontextual) ++nc;
  }
  return static_cast<double>(nc) / static_cast<double>(records.size());
}

}  // namespace scb
