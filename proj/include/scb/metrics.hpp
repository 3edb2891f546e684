#pragma once

#include <span>
#include <vector>

#include "scb/types.hpp"

namespace scb {

// Fraction of incorrect assignments so far: (1/n) * sum(1 - r_t). Equal to
// 1 minus the running mean reward. Rewards must be 0 or 1.
double normalized_cumulative_regret(std::span<const int> rewards);

// Prefix curve: element t is the normalized cumulative regret of the first
// t + 1 rewards.
std::vector<double> regret_curve(std::span<const int> rewards);

// Fraction of decisions whose provenance is Noncontextual. Agreement steps
// count in the denominator only: they carry no interpolation signal.
double noncontextual_fraction(std::span<const DecisionRecord> records);

}  // namespace scb
