#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "flyby/error.hpp"
#include "flyby/network.hpp"
#include "flyby/physics.hpp"
#include "flyby/state.hpp"

namespace flyby {

/// Per-detector probabilities in detector declaration order.
class DetectionProbabilities {
public:
    using Entry = std::pair<std::string, double>;

    DetectionProbabilities() = default;
    explicit DetectionProbabilities(std::vector<Entry> entries) : entries_(std::move(entries)) {
        double sum = 0.0;
        for (const auto& [name, p] : entries_) {
            if (!(p >= -norm_tolerance && p <= 1.0 + norm_tolerance))
                throw InvalidArgument("probability for '" + name + "' outside [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > norm_tolerance)
            throw NumericalError("detection probabilities sum to " + std::to_string(sum));
    }

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    double at(const std::string& detector) const {
        for (const auto& [name, p] : entries_)
            if (name == detector)
                return p;
        throw InvalidArgument("unknown detector '" + detector + "'");
    }

private:
    std::vector<Entry> entries_;
};

/// Propagates `initial` through `network` and reads off each detector.
/// Throws NumericalError ("probability leakage") if more than 1e-9 of the
/// probability ends up on modes no detector watches.
inline DetectionProbabilities detection_probabilities(const Network& network, const PureState& initial) {
    if (network.detectors().empty())
        throw NetworkError("network declares no detectors");
    const PureState out = propagate(network, initial);
    std::vector<DetectionProbabilities::Entry> entries;
    double detected = 0.0;
    for (const auto& d : network.detectors()) {
        const double p = probability(d.mode, out);
        entries.emplace_back(d.name, p);
        detected += p;
    }
    const double leakage = out.norm_squared() - detected;
    if (leakage > norm_tolerance)
        throw NumericalError("probability leakage: " + std::to_string(leakage) +
                             " of the probability remains on non-detector modes");
    for (auto& e : entries)
        e.second /= detected;
    return DetectionProbabilities(std::move(entries));
}

/// Closed form for the Mach-Zehnder layout: D1 = cos^2(2 K omega), D2 = sin^2(2 K omega).
inline DetectionProbabilities probabilities_from_body(const RotatingBody& body, const BeamSource& beam) {
    const double half_phase = reduce_phase(phase_coefficient(body) * beam.angular_frequency());
    const double c = std::cos(half_phase);
    const double s = std::sin(half_phase);
    return DetectionProbabilities({{"D1", c * c}, {"D2", s * s}});
}

struct CountSample {
    std::vector<std::pair<std::string, std::uint64_t>> counts;
    std::uint64_t total = 0;
    std::uint64_t seed = 0;

    std::uint64_t at(const std::string& detector) const {
        for (const auto& [name, n] : counts)
            if (name == detector)
                return n;
        throw InvalidArgument("unknown detector '" + detector + "'");
    }
};

/// Name of the sampling algorithm, recorded in report metadata.
inline constexpr const char* sampler_algorithm = "mt19937_64+sequential-binomial";

/// Multinomial shot-noise draw: conditional binomials over detectors in
/// declaration order using std::mt19937_64 seeded with `seed`.
/// Reproducible for identical seed and standard library implementation.
inline CountSample sample_counts(const DetectionProbabilities& probs, std::uint64_t total, std::uint64_t seed) {
    if (total == 0)
        throw InvalidArgument("total must be >= 1");
    std::mt19937_64 rng(seed);
    CountSample sample;
    sample.total = total;
    sample.seed = seed;
    std::uint64_t remaining = total;
    double remaining_p = 1.0;
    const auto& entries = probs.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        std::uint64_t n = 0;
        if (i + 1 == entries.size()) {
            n = remaining;
        } else if (remaining > 0 && remaining_p > 0.0) {
            const double q = std::clamp(entries[i].second / remaining_p, 0.0, 1.0);
            if (q >= 1.0)
                n = remaining;
            else if (q > 0.0)
                n = std::binomial_distribution<std::uint64_t>(remaining, q)(rng);
        }
        sample.counts.emplace_back(entries[i].first, n);
        remaining -= n;
        remaining_p -= entries[i].second;
    }
    return sample;
}

/// Normal-approximation estimate of how many quanta are needed before the
/// expected D2 count N p exceeds z standard deviations sqrt(N p (1 - p)),
/// with p = sin^2(delta_phase / 2). Order-of-magnitude planning only.
inline std::uint64_t required_quanta(double delta_phase, double z) {
    if (!std::isfinite(z) || z <= 0.0)
        throw InvalidArgument("z must be finite and > 0");
    if (delta_phase == 0.0)
        throw NumericalError("unresolvable: zero signal");
    if (!(delta_phase > 0.0 && delta_phase <= std::numbers::pi))
        throw InvalidArgument("delta_phase must lie in (0, pi]");
    const double s = std::sin(delta_phase / 2.0);
    const double p = s * s;
    const double q = z * z * (1.0 - p) / p;
    if (!std::isfinite(q) || q >= 0x1p63)
        throw NumericalError("required quanta exceed the representable range");
    // sin^2 rounding can push an exact integer like 9 up to 9.000000000000004;
    // values within a few ulp of an integer are taken as that integer.
    const double nearest = std::round(q);
    const double n = std::abs(q - nearest) <= 4e-15 * std::max(1.0, q) ? nearest : std::ceil(q);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n));
}

/// Folds a phase into [0, pi], the range where sin^2(phase / 2) is monotone.
inline double fold_phase(double phase) {
    const double r = reduce_phase(phase);
    return r > std::numbers::pi ? two_pi - r : r;
}

} // namespace flyby
