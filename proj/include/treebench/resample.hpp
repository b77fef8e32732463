#pragma once

#include <cstdint>
#include <vector>

#include "treebench/dataset.hpp"

namespace treebench {

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Uniform random 80/20-style split (fraction configurable). Deterministic
// for fixed (n, fraction, seed). Optional stratification keeps the label
// ratio in both halves; off by default.
SplitIndices split(std::size_t n, double test_fraction, std::uint64_t seed);
SplitIndices split(const Dataset& ds, double test_fraction, std::uint64_t seed,
                   bool stratified = false);

// k folds partitioning 0..n-1; fold sizes differ by at most one and each
// index lands in exactly one test fold.
std::vector<SplitIndices> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

}  // namespace treebench
