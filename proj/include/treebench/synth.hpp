#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "treebench/dataset.hpp"

namespace treebench {

enum class LogicFn { XOR, NOT };

std::string to_string(LogicFn fn);
LogicFn logic_fn_from_string(const std::string& s);

// Full recipe for one synthetic dataset: two correlated Gaussian features,
// a logical labelling function, and a label-noise rate.
struct SyntheticSpec {
    LogicFn function = LogicFn::XOR;
    std::array<double, 2> mu{0.0, 0.0};
    double rho = 0.0;      // correlation in [0,1]; 1 is the degenerate case
    double epsilon = 0.0;  // label flip probability in [0,1]
    std::size_t n = 1000;
    std::uint64_t seed = 0;
};

// Stable human-readable identifier, e.g. "xor_r0.10_e0.25_n1000_s42".
// Doubles as the provenance tag of generated datasets.
std::string spec_digest(const SyntheticSpec& spec);

void validate(const SyntheticSpec& spec);

enum class GroundTruthMode { paper_literal, signal_scaled };

std::string to_string(GroundTruthMode mode);
GroundTruthMode ground_truth_mode_from_string(const std::string& s);

struct GroundTruthAttribution {
    std::array<double, 2> raw{0.0, 0.0};
    std::array<double, 2> normalized{0.0, 0.0};
    GroundTruthMode mode = GroundTruthMode::paper_literal;
    bool degenerate = false;  // raw was all-zero, normalized left as raw
};

// Draws the n x 2 feature matrix. X1 ~ N(mu1, 1) and
// X2 = mu2 + rho*(X1 - mu1) + sqrt(1 - rho^2) * Z, which gives unit
// marginal variances and correlation exactly rho, and stays well-defined
// at rho = 1 where the covariance matrix is singular.
Matrix sample_features(const SyntheticSpec& spec);

// Binarizes at zero (b_j = 1 iff x_j > 0) and applies the logic function:
// XOR -> b1 ^ b2, NOT -> 1 - b1.
std::vector<int> label(const Matrix& features, LogicFn fn);

// Flips each label independently with probability epsilon.
std::vector<int> apply_noise(const std::vector<int>& labels, double epsilon,
                             std::uint64_t seed);

// sample_features -> label -> apply_noise, with provenance set to the spec
// digest. Bit-reproducible under a fixed spec.
Dataset generate(const SyntheticSpec& spec);

// Analytic importance of the generating function. At epsilon = 0:
// XOR -> (0.5, 0.5), NOT -> (1, rho). With noise, paper_literal scales by
// epsilon and signal_scaled by (1 - epsilon).
GroundTruthAttribution ground_truth(const SyntheticSpec& spec,
                                    GroundTruthMode mode = GroundTruthMode::paper_literal);

// The full 24-spec benchmark grid: {XOR, NOT} x rho {0, 0.1, 0.9, 1.0} x
// epsilon {0, 0.25, 0.5}. mu is [0,1] for XOR and [1,0] for NOT; per-spec
// seeds are derived from base_seed and the grid position.
std::vector<SyntheticSpec> enumerate_grid(std::size_t n = 1000,
                                          std::uint64_t base_seed = 0);

}  // namespace treebench
