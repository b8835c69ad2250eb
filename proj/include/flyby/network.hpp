#pragma once

// Lossless optical elements applied to a PureState by successive substitution,
// plus the transfer-matrix composition used as an independent check.
//
// Phase convention: a 50/50 splitter transmits with coefficient 1/sqrt(2) and
// reflects with i/sqrt(2). A single-input splitter maps
//     in -> (t_out + i r_out) / sqrt(2)
// and a two-input splitter additionally maps
//     in2 -> (r_out + i t_out) / sqrt(2).
// Mirrors impart no phase.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "flyby/error.hpp"
#include "flyby/physics.hpp"
#include "flyby/state.hpp"

namespace flyby {

struct BeamSplitter {
    std::string name;
    ModeLabel input;
    std::optional<ModeLabel> second_input;
    ModeLabel transmit_out;
    ModeLabel reflect_out;
};

struct Mirror {
    std::string name;
    ModeLabel input;
    ModeLabel output;
};

struct PhaseShifter {
    std::string name;
    ModeLabel mode;
    double phase; ///< radians
};

/// Arm segment running parallel to the rotation axis of `body`. Acts as a
/// phase shifter with phase equal to the parallel flyby shift.
struct RotatingObjectSegment {
    std::string name;
    ModeLabel mode;
    RotatingBody body;
    BeamSource beam;

    /// 8 Omega R omega / c, reduced into [0, 2 pi).
    double phase() const { return reduce_phase(parallel_flyby_shift(body, beam)); }
};

using Element = std::variant<BeamSplitter, Mirror, PhaseShifter, RotatingObjectSegment>;

inline const std::string& element_name(const Element& e) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, e);
}

inline std::vector<ModeLabel> element_inputs(const Element& e) {
    return std::visit(
        [](const auto& x) -> std::vector<ModeLabel> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, BeamSplitter>) {
                if (x.second_input)
                    return {x.input, *x.second_input};
                return {x.input};
            } else if constexpr (std::is_same_v<T, Mirror>) {
                return {x.input};
            } else {
                return {x.mode};
            }
        },
        e);
}

inline std::vector<ModeLabel> element_outputs(const Element& e) {
    return std::visit(
        [](const auto& x) -> std::vector<ModeLabel> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, BeamSplitter>)
                return {x.transmit_out, x.reflect_out};
            else if constexpr (std::is_same_v<T, Mirror>)
                return {x.output};
            else
                return {x.mode};
        },
        e);
}

struct Detector {
    std::string name;
    ModeLabel mode;
};

/// A structural problem found while validating a network.
struct NetworkIssue {
    enum class Subject { modes, source, element, detector };
    Subject subject;
    std::size_t index = 0; ///< element or detector index, or mode index for `modes`
    std::string message;
    std::optional<ModeLabel> mode = std::nullopt; ///< offending mode, when there is one
};

namespace detail {

inline bool contains(const std::vector<ModeLabel>& v, const ModeLabel& m) {
    return std::find(v.begin(), v.end(), m) != v.end();
}

} // namespace detail

/// Collects every structural issue instead of stopping at the first one.
///
/// The single-assignment check walks the element list tracking which modes
/// may carry amplitude (initially only the source). An element may write a
/// mode only if that mode is one of its own inputs or is not live; its
/// outputs become live only when one of its inputs was.
inline std::vector<NetworkIssue> check_network(const std::vector<ModeLabel>& modes, const ModeLabel& source,
                                               const std::vector<Element>& elements,
                                               const std::vector<Detector>& detectors) {
    using S = NetworkIssue::Subject;
    std::vector<NetworkIssue> issues;

    if (modes.empty())
        issues.push_back({S::modes, 0, "no modes declared"});
    std::set<ModeLabel> declared;
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (!declared.insert(modes[i]).second)
            issues.push_back({S::modes, i, "duplicate mode '" + modes[i].str() + "'", modes[i]});

    if (!declared.contains(source))
        issues.push_back({S::source, 0, "undeclared mode '" + source.str() + "' used as source", source});

    std::map<ModeLabel, std::string> live{{source, "source"}};
    std::set<std::string> element_names;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const Element& el = elements[i];
        const std::string& name = element_name(el);
        const auto before = issues.size();
        if (!ModeLabel::is_valid(name))
            issues.push_back({S::element, i, "invalid element name '" + name + "'"});
        else if (!element_names.insert(name).second)
            issues.push_back({S::element, i, "duplicate element name '" + name + "'"});

        const auto inputs = element_inputs(el);
        const auto outputs = element_outputs(el);
        for (const auto& m : inputs)
            if (!declared.contains(m))
                issues.push_back({S::element, i, "undeclared mode '" + m.str() + "' in '" + name + "'", m});
        for (const auto& m : outputs)
            if (!declared.contains(m) && !detail::contains(inputs, m))
                issues.push_back({S::element, i, "undeclared mode '" + m.str() + "' in '" + name + "'", m});

        if (const auto* bs = std::get_if<BeamSplitter>(&el)) {
            if (bs->transmit_out == bs->reflect_out)
                issues.push_back({S::element, i, "splitter outputs must differ"});
            if (bs->second_input && *bs->second_input == bs->input)
                issues.push_back({S::element, i, "splitter inputs must differ"});
        }
        if (const auto* ps = std::get_if<PhaseShifter>(&el); ps && !std::isfinite(ps->phase))
            issues.push_back({S::element, i, "phase of '" + name + "' must be finite"});

        if (issues.size() != before)
            continue;
        for (const auto& out : outputs) {
            if (detail::contains(inputs, out))
                continue;
            if (auto it = live.find(out); it != live.end())
                issues.push_back({S::element, i,
                                  "single-assignment violation: '" + name + "' writes mode '" + out.str() +
                                      "' which still holds amplitude from '" + it->second + "'",
                                  out});
        }
        const bool fed = std::ranges::any_of(inputs, [&](const ModeLabel& in) { return live.contains(in); });
        for (const auto& in : inputs)
            live.erase(in);
        if (fed)
            for (const auto& out : outputs)
                live[out] = name;
    }

    std::set<std::string> detector_names;
    std::map<ModeLabel, std::string> detector_modes;
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        const auto& d = detectors[i];
        if (!ModeLabel::is_valid(d.name))
            issues.push_back({S::detector, i, "invalid detector name '" + d.name + "'"});
        else if (!detector_names.insert(d.name).second)
            issues.push_back({S::detector, i, "duplicate detector name '" + d.name + "'"});
        if (!declared.contains(d.mode))
            issues.push_back(
                {S::detector, i, "undeclared mode '" + d.mode.str() + "' in detector '" + d.name + "'", d.mode});
        else if (auto [it, fresh] = detector_modes.emplace(d.mode, d.name); !fresh)
            issues.push_back({S::detector, i,
                              "detectors '" + it->second + "' and '" + d.name + "' watch the same mode '" +
                                  d.mode.str() + "'"});
    }
    return issues;
}

/// Validated interferometer: declared modes, source, ordered elements, detectors.
class Network {
public:
    Network(std::vector<ModeLabel> modes, ModeLabel source, std::vector<Element> elements,
            std::vector<Detector> detectors)
        : modes_(std::move(modes)), source_(std::move(source)), elements_(std::move(elements)),
          detectors_(std::move(detectors)) {
        const auto issues = check_network(modes_, source_, elements_, detectors_);
        if (!issues.empty())
            throw NetworkError(issues.front().message);
    }

    const std::vector<ModeLabel>& modes() const noexcept { return modes_; }
    const ModeLabel& source() const noexcept { return source_; }
    const std::vector<Element>& elements() const noexcept { return elements_; }
    const std::vector<Detector>& detectors() const noexcept { return detectors_; }

    bool declares(const ModeLabel& m) const { return detail::contains(modes_, m); }

    std::size_t mode_index(const ModeLabel& m) const {
        auto it = std::find(modes_.begin(), modes_.end(), m);
        if (it == modes_.end())
            throw NetworkError("mode '" + m.str() + "' is not declared");
        return static_cast<std::size_t>(it - modes_.begin());
    }

private:
    std::vector<ModeLabel> modes_;
    ModeLabel source_;
    std::vector<Element> elements_;
    std::vector<Detector> detectors_;
};

namespace detail {

inline constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
inline constexpr Amplitude i_unit{0.0, 1.0};

inline Amplitude take(PureState::Map& m, const ModeLabel& mode) {
    auto it = m.find(mode);
    if (it == m.end())
        return {};
    Amplitude a = it->second;
    m.erase(it);
    return a;
}

inline void ensure_vacant(const PureState::Map& m, const ModeLabel& out, const std::vector<ModeLabel>& inputs,
                          const std::string& element) {
    if (contains(inputs, out))
        return;
    auto it = m.find(out);
    if (it != m.end() && std::abs(it->second) > amplitude_tolerance)
        throw NetworkError("'" + element + "' would overwrite live amplitude on mode '" + out.str() + "'");
}

} // namespace detail

/// One substitution step.
inline PureState apply_element(const PureState& state, const Element& element) {
    PureState::Map m = state.amplitudes();
    const auto inputs = element_inputs(element);
    std::visit(
        [&](const auto& el) {
            using T = std::decay_t<decltype(el)>;
            if constexpr (std::is_same_v<T, BeamSplitter>) {
                detail::ensure_vacant(m, el.transmit_out, inputs, el.name);
                detail::ensure_vacant(m, el.reflect_out, inputs, el.name);
                const Amplitude a1 = detail::take(m, el.input);
                const Amplitude a2 = el.second_input ? detail::take(m, *el.second_input) : Amplitude{};
                m[el.transmit_out] += detail::inv_sqrt2 * (a1 + detail::i_unit * a2);
                m[el.reflect_out] += detail::inv_sqrt2 * (detail::i_unit * a1 + a2);
            } else if constexpr (std::is_same_v<T, Mirror>) {
                detail::ensure_vacant(m, el.output, inputs, el.name);
                const Amplitude a = detail::take(m, el.input);
                m[el.output] += a;
            } else {
                double phase;
                if constexpr (std::is_same_v<T, PhaseShifter>)
                    phase = reduce_phase(el.phase);
                else
                    phase = el.phase();
                if (auto it = m.find(el.mode); it != m.end())
                    it->second *= std::polar(1.0, phase);
            }
        },
        element);
    return PureState(std::move(m));
}

/// Folds apply_element over the network's elements in order.
inline PureState propagate(const Network& network, const PureState& initial) {
    for (const auto& [mode, amp] : initial)
        if (!network.declares(mode))
            throw NetworkError("initial state has amplitude on undeclared mode '" + mode.str() + "'");
    PureState state = initial;
    for (const auto& el : network.elements()) {
        try {
            state = apply_element(state, el);
        } catch (const NetworkError& e) {
            throw NetworkError("element '" + element_name(el) + "': " + e.what());
        } catch (const NumericalError& e) {
            throw NumericalError("element '" + element_name(el) + "': " + e.what());
        }
    }
    return state;
}

/// Closed-form Mach-Zehnder output for a phase difference between the arms:
/// d-amplitude i (e^{i phi} + 1) / 2, e-amplitude (e^{i phi} - 1) / 2.
inline PureState mach_zehnder_output(double delta_phase) {
    const Amplitude rot = std::polar(1.0, reduce_phase(delta_phase));
    return PureState{{"d", detail::i_unit * (rot + 1.0) / 2.0}, {"e", (rot - 1.0) / 2.0}};
}

using TransferMatrix = Eigen::MatrixXcd;

namespace detail {

/// Permutation matrix sending each `from[k]` to `to[k]`; the remaining modes
/// keep their index where possible, leftovers are paired in index order.
inline TransferMatrix routing_matrix(std::size_t n, const std::vector<std::size_t>& from,
                                     const std::vector<std::size_t>& to) {
    std::vector<std::optional<std::size_t>> target(n);
    std::vector<bool> taken(n, false);
    for (std::size_t k = 0; k < from.size(); ++k) {
        target[from[k]] = to[k];
        taken[to[k]] = true;
    }
    std::vector<std::size_t> free_sources;
    for (std::size_t j = 0; j < n; ++j) {
        if (target[j])
            continue;
        if (!taken[j]) {
            target[j] = j;
            taken[j] = true;
        } else {
            free_sources.push_back(j);
        }
    }
    std::size_t next = 0;
    for (std::size_t j : free_sources) {
        while (taken[next])
            ++next;
        target[j] = next;
        taken[next] = true;
    }
    TransferMatrix p = TransferMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
        p(static_cast<Eigen::Index>(*target[j]), static_cast<Eigen::Index>(j)) = 1.0;
    return p;
}

inline double unitarity_defect(const TransferMatrix& m) {
    const TransferMatrix d = m.adjoint() * m - TransferMatrix::Identity(m.rows(), m.cols());
    return d.cwiseAbs().maxCoeff();
}

} // namespace detail

/// Transfer matrix of one element over the network's declared modes, columns
/// indexed by input mode. Splitters and mirrors are completed to a full
/// permutation so the matrix is unitary on the whole span.
inline TransferMatrix element_matrix(const Network& network, const Element& element) {
    const std::size_t n = network.modes().size();
    const auto dim = static_cast<Eigen::Index>(n);
    auto idx = [&](const ModeLabel& m) { return network.mode_index(m); };
    return std::visit(
        [&](const auto& el) -> TransferMatrix {
            using T = std::decay_t<decltype(el)>;
            if constexpr (std::is_same_v<T, BeamSplitter>) {
                std::vector<std::size_t> from{idx(el.input)};
                std::vector<std::size_t> to{idx(el.transmit_out)};
                if (el.second_input) {
                    from.push_back(idx(*el.second_input));
                    to.push_back(idx(el.reflect_out));
                }
                const auto t = static_cast<Eigen::Index>(idx(el.transmit_out));
                const auto r = static_cast<Eigen::Index>(idx(el.reflect_out));
                TransferMatrix block = TransferMatrix::Identity(dim, dim);
                block(t, t) = detail::inv_sqrt2;
                block(r, t) = detail::i_unit * detail::inv_sqrt2;
                block(t, r) = detail::i_unit * detail::inv_sqrt2;
                block(r, r) = detail::inv_sqrt2;
                return block * detail::routing_matrix(n, from, to);
            } else if constexpr (std::is_same_v<T, Mirror>) {
                return detail::routing_matrix(n, {idx(el.input)}, {idx(el.output)});
            } else {
                double phase;
                if constexpr (std::is_same_v<T, PhaseShifter>)
                    phase = reduce_phase(el.phase);
                else
                    phase = el.phase();
                TransferMatrix m = TransferMatrix::Identity(dim, dim);
                const auto k = static_cast<Eigen::Index>(idx(el.mode));
                m(k, k) = std::polar(1.0, phase);
                return m;
            }
        },
        element);
}

/// Product of per-element transfer matrices in application order.
inline TransferMatrix compose_unitary(const Network& network) {
    const auto dim = static_cast<Eigen::Index>(network.modes().size());
    TransferMatrix total = TransferMatrix::Identity(dim, dim);
    for (const auto& el : network.elements()) {
        const TransferMatrix m = element_matrix(network, el);
        if (detail::unitarity_defect(m) > norm_tolerance)
            throw NumericalError("element '" + element_name(el) + "' is not unitary");
        total = m * total;
    }
    if (detail::unitarity_defect(total) > norm_tolerance)
        throw NumericalError("composed network transfer matrix is not unitary");
    return total;
}

/// Applies a transfer matrix to `state`, returning amplitudes in mode order.
inline Eigen::VectorXcd apply_matrix(const Network& network, const TransferMatrix& m, const PureState& state) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(network.modes().size()));
    for (const auto& [mode, amp] : state)
        v(static_cast<Eigen::Index>(network.mode_index(mode))) = amp;
    return m * v;
}

namespace detail {

inline std::vector<ModeLabel> mz_modes() { return {"a", "b", "c", "d", "e"}; }
inline std::vector<Detector> mz_detectors() { return {{"D1", "d"}, {"D2", "e"}}; }

inline Network mach_zehnder_with(Element object) {
    return Network(mz_modes(), "a",
                   {BeamSplitter{"S1", "a", std::nullopt, "b", "c"}, std::move(object), Mirror{"M1", "b", "b"},
                    Mirror{"M2", "c", "c"}, BeamSplitter{"S2", "b", ModeLabel("c"), "e", "d"}},
                   mz_detectors());
}

} // namespace detail

/// Mach-Zehnder layout with a rotating object O in arm b. Source a, detectors
/// D1 on d and D2 on e.
inline Network mach_zehnder_preset(const RotatingBody& body, const BeamSource& beam) {
    return detail::mach_zehnder_with(RotatingObjectSegment{"O", "b", body, beam});
}

/// Same layout with a plain phase shifter O in arm b.
inline Network mach_zehnder_network(double delta_phase) {
    return detail::mach_zehnder_with(PhaseShifter{"O", "b", delta_phase});
}

/// Opt-in tag for models that go beyond the closed-form Mach-Zehnder result.
struct Extrapolation {
    explicit Extrapolation() = default;
};

/// Michelson arrangement modeled as a double pass through the rotor arm
/// (phase 2 Delta omega), recombining on a second splitter port pair.
/// Not covered by a closed form; requires an explicit Extrapolation tag.
inline Network michelson_preset(const RotatingBody& body, const BeamSource& beam, Extrapolation) {
    return Network(detail::mz_modes(), "a",
                   {BeamSplitter{"S1", "a", std::nullopt, "b", "c"}, RotatingObjectSegment{"O_out", "b", body, beam},
                    Mirror{"M1", "b", "b"}, RotatingObjectSegment{"O_back", "b", body, beam},
                    Mirror{"M2", "c", "c"}, BeamSplitter{"S1_return", "b", ModeLabel("c"), "e", "d"}},
                   detail::mz_detectors());
}

/// Replaces the body and beam carried by every rotor element.
inline Network rebind_rotors(const Network& network, const RotatingBody& body, const BeamSource& beam) {
    std::vector<Element> elements = network.elements();
    for (auto& el : elements)
        if (auto* rotor = std::get_if<RotatingObjectSegment>(&el)) {
            rotor->body = body;
            rotor->beam = beam;
        }
    return Network(network.modes(), network.source(), std::move(elements), network.detectors());
}

/// Swaps every rotor element for a phase shifter with the given phase.
inline Network override_rotor_phase(const Network& network, double phase) {
    std::vector<Element> elements = network.elements();
    bool found = false;
    for (auto& el : elements)
        if (auto* rotor = std::get_if<RotatingObjectSegment>(&el)) {
            el = PhaseShifter{rotor->name, rotor->mode, phase};
            found = true;
        }
    if (!found)
        throw NetworkError("network has no rotor element whose phase could be overridden");
    return Network(network.modes(), network.source(), std::move(elements), network.detectors());
}

inline bool has_rotor(const Network& network) {
    return std::any_of(network.elements().begin(), network.elements().end(),
                       [](const Element& e) { return std::holds_alternative<RotatingObjectSegment>(e); });
}

} // namespace flyby
