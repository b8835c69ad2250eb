#pragma once

#include <cmath>
#include <complex>
#include <compare>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "flyby/error.hpp"

namespace flyby {

using Amplitude = std::complex<double>;

/// Name of a beam path, e.g. "a" .. "e" in the Mach-Zehnder layout.
class ModeLabel {
public:
    ModeLabel(std::string name) : name_(std::move(name)) {
        if (!is_valid(name_))
            throw InvalidArgument("invalid mode label '" + name_ + "'");
    }
    ModeLabel(const char* name) : ModeLabel(std::string(name)) {}

    const std::string& str() const noexcept { return name_; }

    /// Identifier grammar shared with element and detector names: [A-Za-z][A-Za-z0-9_]*
    static bool is_valid(std::string_view s) noexcept {
        if (s.empty() || !is_alpha(s.front()))
            return false;
        for (char ch : s)
            if (!is_alpha(ch) && !(ch >= '0' && ch <= '9') && ch != '_')
                return false;
        return true;
    }

    friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
    friend bool operator==(const ModeLabel&, const ModeLabel&) = default;

private:
    static constexpr bool is_alpha(char ch) noexcept {
        return (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z');
    }

    std::string name_;
};

inline constexpr double norm_tolerance = 1e-9;
inline constexpr double amplitude_tolerance = 1e-12;

/// Single-quantum pure state over named modes. Absent modes carry zero amplitude.
class PureState {
public:
    using Map = std::map<ModeLabel, Amplitude>;

    PureState(Map amplitudes) : amplitudes_(std::move(amplitudes)) {
        std::erase_if(amplitudes_, [](const auto& kv) { return kv.second == Amplitude{}; });
        for (const auto& [mode, amp] : amplitudes_)
            if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag()))
                throw NumericalError("non-finite amplitude on mode '" + mode.str() + "'");
        const double n = norm_squared();
        if (std::abs(n - 1.0) > norm_tolerance)
            throw NumericalError("state is not normalized: sum |amplitude|^2 = " + std::to_string(n));
    }
    PureState(std::initializer_list<Map::value_type> init) : PureState(Map(init)) {}

    Amplitude amplitude(const ModeLabel& mode) const {
        auto it = amplitudes_.find(mode);
        return it == amplitudes_.end() ? Amplitude{} : it->second;
    }

    double norm_squared() const noexcept {
        double s = 0.0;
        for (const auto& kv : amplitudes_)
            s += std::norm(kv.second);
        return s;
    }

    const Map& amplitudes() const noexcept { return amplitudes_; }
    auto begin() const noexcept { return amplitudes_.begin(); }
    auto end() const noexcept { return amplitudes_.end(); }

    /// Componentwise comparison with absolute tolerance on real and imaginary parts.
    bool approx_equal(const PureState& other, double tol = amplitude_tolerance) const {
        auto close = [tol](Amplitude x, Amplitude y) {
            return std::abs(x.real() - y.real()) <= tol && std::abs(x.imag() - y.imag()) <= tol;
        };
        for (const auto& [mode, amp] : amplitudes_)
            if (!close(amp, other.amplitude(mode)))
                return false;
        for (const auto& [mode, amp] : other.amplitudes_)
            if (!close(amp, amplitude(mode)))
                return false;
        return true;
    }

private:
    Map amplitudes_;
};

inline PureState unit_state(const ModeLabel& mode) { return PureState{{mode, Amplitude{1.0, 0.0}}}; }

/// Inner product of the basis vector for `reference_mode` with `state`.
inline Amplitude overlap(const ModeLabel& reference_mode, const PureState& state) {
    return state.amplitude(reference_mode);
}

inline double probability(const ModeLabel& reference_mode, const PureState& state) {
    return std::norm(overlap(reference_mode, state));
}

} // namespace flyby
