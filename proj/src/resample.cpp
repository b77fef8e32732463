#include "treebench/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "treebench/rng.hpp"

namespace treebench {

SplitIndices split(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (n < 2) {
        throw std::invalid_argument("split: need at least 2 rows, got " + std::to_string(n));
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("split: test_fraction must be in (0,1)");
    }
    Rng rng(derive_seed(seed, 0x5317));
    auto perm = rng.permutation(n);
    const std::size_t n_test =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(
                                    test_fraction * static_cast<double>(n))),
                                1, n - 1);
    SplitIndices out;
    out.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    return out;
}

SplitIndices split(const Dataset& ds, double test_fraction, std::uint64_t seed,
                   bool stratified) {
    if (!stratified) return split(ds.n(), test_fraction, seed);

    // Split each class independently, then merge; keeps the label ratio in
    // both halves for imbalance experiments.
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < ds.n(); ++i) by_class[ds.labels[i]].push_back(i);
    SplitIndices out;
    for (int c = 0; c < 2; ++c) {
        if (by_class[c].size() < 2) {
            throw std::invalid_argument("split: class " + std::to_string(c) +
                                        " has fewer than 2 rows, cannot stratify");
        }
        const SplitIndices part =
            split(by_class[c].size(), test_fraction, derive_seed(seed, c));
        for (auto i : part.test) out.test.push_back(by_class[c][i]);
        for (auto i : part.train) out.train.push_back(by_class[c][i]);
    }
    std::sort(out.test.begin(), out.test.end());
    std::sort(out.train.begin(), out.train.end());
    return out;
}

std::vector<SplitIndices> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) {
        throw std::invalid_argument("kfold: need 2 <= k <= n, got k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n));
    }
    Rng rng(derive_seed(seed, 0xf01d5));
    auto perm = rng.permutation(n);

    std::vector<SplitIndices> folds(k);
    // First (n % k) folds take one extra element.
    std::size_t start = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n / k + (f < n % k ? 1 : 0);
        for (std::size_t i = 0; i < n; ++i) {
            const bool in_test = i >= start && i < start + size;
            (in_test ? folds[f].test : folds[f].train).push_back(perm[i]);
        }
        start += size;
    }
    return folds;
}

}  // namespace treebench
