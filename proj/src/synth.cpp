#include "treebench/synth.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "treebench/rng.hpp"

namespace treebench {

std::string to_string(LogicFn fn) { return fn == LogicFn::XOR ? "xor" : "not"; }

LogicFn logic_fn_from_string(const std::string& s) {
    if (s == "xor" || s == "XOR") return LogicFn::XOR;
    if (s == "not" || s == "NOT") return LogicFn::NOT;
    throw std::invalid_argument("unknown logic function '" + s + "'");
}

std::string to_string(GroundTruthMode mode) {
    return mode == GroundTruthMode::paper_literal ? "paper-literal" : "signal-scaled";
}

GroundTruthMode ground_truth_mode_from_string(const std::string& s) {
    if (s == "paper-literal") return GroundTruthMode::paper_literal;
    if (s == "signal-scaled") return GroundTruthMode::signal_scaled;
    throw std::invalid_argument("unknown ground-truth mode '" + s + "'");
}

void validate(const SyntheticSpec& spec) {
    if (!(spec.rho >= 0.0 && spec.rho <= 1.0)) {
        throw std::invalid_argument("synthetic spec: rho must be in [0,1]");
    }
    if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) {
        throw std::invalid_argument("synthetic spec: epsilon must be in [0,1]");
    }
    if (spec.n < 1) {
        throw std::invalid_argument("synthetic spec: n must be >= 1");
    }
}

std::string spec_digest(const SyntheticSpec& spec) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s_r%.2f_e%.2f_n%zu_s%llu", to_string(spec.function).c_str(),
                  spec.rho, spec.epsilon, spec.n,
                  static_cast<unsigned long long>(spec.seed));
    return buf;
}

Matrix sample_features(const SyntheticSpec& spec) {
    validate(spec);
    Rng rng(derive_seed(spec.seed, 0xfea7));
    Matrix x(spec.n, 2);
    // Explicit linear construction instead of a covariance factorization:
    // gives unit marginal variances and correlation exactly rho, and the
    // rho = 1 case degenerates cleanly to X2 - mu2 = X1 - mu1.
    const double ortho = std::sqrt(1.0 - spec.rho * spec.rho);
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        x(i, 0) = spec.mu[0] + z1;
        x(i, 1) = spec.mu[1] + spec.rho * z1 + ortho * z2;
    }
    return x;
}

std::vector<int> label(const Matrix& features, LogicFn fn) {
    if (features.cols != 2) {
        throw std::invalid_argument("label: expected 2 feature columns, got " +
                                    std::to_string(features.cols));
    }
    std::vector<int> y(features.rows);
    for (std::size_t i = 0; i < features.rows; ++i) {
        const int b1 = features(i, 0) > 0.0 ? 1 : 0;
        const int b2 = features(i, 1) > 0.0 ? 1 : 0;
        y[i] = fn == LogicFn::XOR ? (b1 ^ b2) : (1 - b1);
    }
    return y;
}

std::vector<int> apply_noise(const std::vector<int>& labels, double epsilon,
                             std::uint64_t seed) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("apply_noise: epsilon must be in [0,1]");
    }
    std::vector<int> out = labels;
    if (epsilon == 0.0) return out;
    Rng rng(derive_seed(seed, 0x0153));
    for (auto& y : out) {
        if (rng.bernoulli(epsilon)) y = 1 - y;
    }
    return out;
}

Dataset generate(const SyntheticSpec& spec) {
    Dataset ds;
    ds.features = sample_features(spec);
    ds.labels = apply_noise(label(ds.features, spec.function), spec.epsilon, spec.seed);
    ds.feature_names = {"x1", "x2"};
    ds.feature_kinds = {FeatureKind::continuous, FeatureKind::continuous};
    ds.provenance = spec_digest(spec);
    return ds;
}

GroundTruthAttribution ground_truth(const SyntheticSpec& spec, GroundTruthMode mode) {
    validate(spec);
    GroundTruthAttribution gt;
    gt.mode = mode;

    if (spec.epsilon == 0.0) {
        gt.raw = spec.function == LogicFn::XOR ? std::array{0.5, 0.5}
                                               : std::array{1.0, spec.rho};
    } else {
        const double scale = mode == GroundTruthMode::paper_literal ? spec.epsilon
                                                                    : 1.0 - spec.epsilon;
        gt.raw = spec.function == LogicFn::XOR
                     ? std::array{0.5 * scale, 0.5 * scale}
                     : std::array{1.0 * scale, spec.rho * scale};
    }

    const double sum = gt.raw[0] + gt.raw[1];
    if (sum > 0.0) {
        gt.normalized = {gt.raw[0] / sum, gt.raw[1] / sum};
    } else {
        gt.normalized = gt.raw;
        gt.degenerate = true;
    }
    return gt;
}

std::vector<SyntheticSpec> enumerate_grid(std::size_t n, std::uint64_t base_seed) {
    static constexpr double kRhos[] = {0.0, 0.1, 0.9, 1.0};
    static constexpr double kEpsilons[] = {0.0, 0.25, 0.5};

    std::vector<SyntheticSpec> grid;
    grid.reserve(24);
    std::uint64_t index = 0;
    for (LogicFn fn : {LogicFn::XOR, LogicFn::NOT}) {
        for (double rho : kRhos) {
            for (double eps : kEpsilons) {
                SyntheticSpec spec;
                spec.function = fn;
                spec.mu = fn == LogicFn::XOR ? std::array{0.0, 1.0} : std::array{1.0, 0.0};
                spec.rho = rho;
                spec.epsilon = eps;
                spec.n = n;
                spec.seed = derive_seed(base_seed, index);
                grid.push_back(spec);
                ++index;
            }
        }
    }
    return grid;
}

}  // namespace treebench
