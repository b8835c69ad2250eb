#pragma once

// Scenario configuration, parameter sweeps and CSV / JSON report output.
//
// Configuration files are flat `key = value` lines with dotted section
// prefixes; see docs/config.md for the full key list.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "flyby/error.hpp"
#include "flyby/netlang.hpp"
#include "flyby/network.hpp"
#include "flyby/physics.hpp"
#include "flyby/statistics.hpp"

namespace flyby {

/// A network file failed to parse; carries the diagnostics unchanged.
class NetworkParseError : public ConfigError {
public:
    NetworkParseError(std::string file, std::vector<Diagnostic> diagnostics)
        : ConfigError("network file '" + file + "' has errors"), file_(std::move(file)),
          diagnostics_(std::move(diagnostics)) {}

    const std::string& file() const noexcept { return file_; }
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string file_;
    std::vector<Diagnostic> diagnostics_;
};

struct BodyPreset {
    std::string name;
    std::string description;
    std::string config_text;
};

inline const std::vector<BodyPreset>& body_presets() {
    static const std::vector<BodyPreset> presets{
        {"disk-stack", "stack of hard disks spinning at 7200 rpm, radius about 0.05 m",
         "# hard-disk stack: 7200 revolutions per minute (754 rad/s), radius about 0.05 m\n"
         "body.rpm = 7200\n"
         "body.radius_m = 0.05\n"},
        {"earth", "Earth, sidereal rotation rate and mean radius",
         "# Earth: IERS nominal sidereal rotation rate, IUGG mean radius (R1)\n"
         "body.omega_rad_s = 7.2921159e-5\n"
         "body.radius_m = 6371000\n"},
    };
    return presets;
}

struct NetworkChoice {
    enum class Kind { mach_zehnder, michelson, file };
    Kind kind = Kind::mach_zehnder;
    std::string path; ///< for `file`
    std::string text; ///< file contents, read when the config is parsed
};

struct ScenarioConfig {
    RotatingBody body{0.0, 1.0};
    std::optional<BeamSource> beam;
    std::optional<FlybyGeometry> geometry;
    std::optional<NetworkChoice> network;
    std::optional<std::uint64_t> shots;
    std::uint64_t seed = 0;
    std::optional<double> z;
};

namespace scenario_detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

inline std::optional<std::uint64_t> to_u64(std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

struct Entry {
    std::string value;
    std::size_t line;
};

using Table = std::map<std::string, Entry>;

inline void read_table(std::string_view text, Table& table, std::string_view origin) {
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty())
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
        if (table.contains(key))
            throw ConfigError(key + ": duplicate key (line " + std::to_string(line_no) + ")");
        table.emplace(std::move(key), Entry{std::move(value), line_no});
    }
}

inline double number(const Table& t, const std::string& key) {
    auto v = to_double(t.at(key).value);
    if (!v)
        throw ConfigError(key + ": expected a number, got '" + t.at(key).value + "'");
    return *v;
}

/// Angles must carry an explicit `rad` or `deg` suffix.
inline double angle(const Table& t, const std::string& key) {
    std::string_view s = trim(t.at(key).value);
    const bool degrees = s.ends_with("deg");
    if (!degrees && !s.ends_with("rad"))
        throw ConfigError(key + ": angle needs a 'rad' or 'deg' suffix, got '" + t.at(key).value + "'");
    s.remove_suffix(3);
    auto v = to_double(s);
    if (!v)
        throw ConfigError(key + ": expected a number before the unit, got '" + t.at(key).value + "'");
    return degrees ? deg_to_rad(*v) : *v;
}

} // namespace scenario_detail

/// Parses configuration text. Relative network file paths resolve against `base_dir`.
inline ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".",
                                   std::string_view origin = "<config>") {
    using namespace scenario_detail;
    Table t;
    read_table(text, t, origin);

    static const std::vector<std::string> known{
        "body.preset",      "body.omega_rad_s", "body.rpm",      "body.radius_m",          "beam.omega_rad_s",
        "geometry.delta_in", "geometry.delta_out", "network.preset", "network.file", "network.extrapolation",
        "sampling.shots",   "sampling.seed",    "feasibility.z"};
    for (const auto& [key, entry] : t)
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(key + ": unknown key (line " + std::to_string(entry.line) + ")");

    if (t.contains("body.preset")) {
        const std::string& name = t.at("body.preset").value;
        auto it = std::find_if(body_presets().begin(), body_presets().end(),
                               [&](const BodyPreset& p) { return p.name == name; });
        if (it == body_presets().end())
            throw ConfigError("body.preset: unknown preset '" + name + "'");
        for (const char* k : {"body.omega_rad_s", "body.rpm", "body.radius_m"})
            if (t.contains(k))
                throw ConfigError(std::string(k) + ": conflicts with body.preset");
        Table preset;
        read_table(it->config_text, preset, "preset " + name);
        t.insert(preset.begin(), preset.end());
    }

    ScenarioConfig cfg;
    const bool has_omega = t.contains("body.omega_rad_s");
    const bool has_rpm = t.contains("body.rpm");
    if (has_omega == has_rpm)
        throw ConfigError("body: exactly one of body.omega_rad_s or body.rpm is required");
    if (!t.contains("body.radius_m"))
        throw ConfigError("body.radius_m: required");
    const double omega = has_omega ? number(t, "body.omega_rad_s") : rpm_to_rad_s(number(t, "body.rpm"));
    try {
        cfg.body = RotatingBody(omega, number(t, "body.radius_m"));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("body: ") + e.what());
    }

    if (t.contains("beam.omega_rad_s")) {
        try {
            cfg.beam = BeamSource(number(t, "beam.omega_rad_s"));
        } catch (const InvalidArgument& e) {
            throw ConfigError(std::string("beam.omega_rad_s: ") + e.what());
        }
    }

    const bool has_in = t.contains("geometry.delta_in");
    const bool has_out = t.contains("geometry.delta_out");
    if (has_in != has_out)
        throw ConfigError("geometry: both geometry.delta_in and geometry.delta_out are required");
    if (has_in) {
        const double din = angle(t, "geometry.delta_in");
        const double dout = angle(t, "geometry.delta_out");
        for (auto [key, v] : {std::pair{"geometry.delta_in", din}, std::pair{"geometry.delta_out", dout}})
            if (v < 0.0 || v > std::numbers::pi + 1e-12)
                throw ConfigError(std::string(key) + ": declination must lie in [0, pi]");
        cfg.geometry = FlybyGeometry(din, dout);
    }

    const bool has_preset = t.contains("network.preset");
    const bool has_file = t.contains("network.file");
    if (has_preset && has_file)
        throw ConfigError("network: network.preset and network.file are mutually exclusive");
    bool extrapolation = false;
    if (t.contains("network.extrapolation")) {
        const std::string& v = t.at("network.extrapolation").value;
        if (v != "true" && v != "false")
            throw ConfigError("network.extrapolation: expected true or false");
        extrapolation = v == "true";
    }
    if (has_preset) {
        const std::string& name = t.at("network.preset").value;
        NetworkChoice choice;
        if (name == "mach-zehnder") {
            choice.kind = NetworkChoice::Kind::mach_zehnder;
        } else if (name == "michelson") {
            if (!extrapolation)
                throw ConfigError("network.preset: 'michelson' is an extrapolation; set network.extrapolation = true");
            choice.kind = NetworkChoice::Kind::michelson;
        } else {
            throw ConfigError("network.preset: unknown preset '" + name + "'");
        }
        cfg.network = std::move(choice);
    }
    if (has_file) {
        std::filesystem::path p = t.at("network.file").value;
        if (p.is_relative())
            p = base_dir / p;
        std::ifstream in(p, std::ios::binary);
        if (!in)
            throw ConfigError("network.file: cannot open '" + p.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        cfg.network = NetworkChoice{NetworkChoice::Kind::file, p.string(), ss.str()};
    }

    if (t.contains("sampling.shots")) {
        auto v = to_u64(t.at("sampling.shots").value);
        if (!v || *v == 0)
            throw ConfigError("sampling.shots: expected a positive integer");
        cfg.shots = v;
    }
    if (t.contains("sampling.seed")) {
        auto v = to_u64(t.at("sampling.seed").value);
        if (!v)
            throw ConfigError("sampling.seed: expected an unsigned 64-bit integer");
        cfg.seed = *v;
    }
    if (t.contains("feasibility.z")) {
        const double z = number(t, "feasibility.z");
        if (z <= 0.0)
            throw ConfigError("feasibility.z: must be > 0");
        cfg.z = z;
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path(), path.string());
}

/// Builds the configured network for the current body and beam.
inline Network build_network(const ScenarioConfig& cfg) {
    if (!cfg.network)
        throw ConfigError("network: no network configured");
    const auto& choice = *cfg.network;
    if (choice.kind == NetworkChoice::Kind::file) {
        auto parsed = parse_network(choice.text, cfg.body, cfg.beam);
        if (!parsed.ok())
            throw NetworkParseError(choice.path, std::move(parsed.diagnostics));
        return std::move(*parsed.network);
    }
    if (!cfg.beam)
        throw ConfigError("beam.omega_rad_s: required for network presets");
    if (choice.kind == NetworkChoice::Kind::michelson)
        return michelson_preset(cfg.body, *cfg.beam, Extrapolation{});
    return mach_zehnder_preset(cfg.body, *cfg.beam);
}

struct Report {
    std::optional<double> parameter;
    double k_factor = 0.0;
    double fractional_shift = 0.0;
    double phase_coefficient = 0.0;
    std::optional<double> doppler_shift_rad_s;
    std::optional<DetectionProbabilities> probabilities;
    std::optional<CountSample> counts;
    std::optional<std::uint64_t> required_quanta;
};

struct ReportSet {
    std::string parameter_name; ///< empty for a single scenario
    std::string parameter_unit;
    std::vector<Report> reports;
};

namespace scenario_detail {

/// Evaluates one scenario. `phase_override` replaces the rotor phase.
inline Report evaluate(const ScenarioConfig& cfg, std::optional<double> phase_override, std::uint64_t seed) {
    Report r;
    r.k_factor = k_factor(cfg.body);
    r.fractional_shift = fractional_shift(cfg.body);
    r.phase_coefficient = phase_coefficient(cfg.body);
    if (cfg.geometry) {
        if (!cfg.beam)
            throw ConfigError("beam.omega_rad_s: required when geometry is given");
        r.doppler_shift_rad_s = doppler_shift(cfg.body, *cfg.geometry, *cfg.beam);
    }

    std::optional<double> signal_phase = phase_override;
    if (!signal_phase && cfg.beam)
        signal_phase = parallel_flyby_shift(cfg.body, *cfg.beam);

    if (cfg.network) {
        Network net = [&] {
            if (!phase_override)
                return build_network(cfg);
            if (cfg.network->kind == NetworkChoice::Kind::mach_zehnder)
                return mach_zehnder_network(*phase_override);
            // Rotors need some body and beam to parse; their phase is replaced below.
            ScenarioConfig tmp = cfg;
            if (!tmp.beam)
                tmp.beam = BeamSource(0.0);
            return override_rotor_phase(build_network(tmp), *phase_override);
        }();
        r.probabilities = detection_probabilities(net, unit_state(net.source()));
        if (cfg.shots)
            r.counts = sample_counts(*r.probabilities, *cfg.shots, seed);
    } else if (cfg.shots) {
        throw ConfigError("sampling.shots: requires a network");
    }

    if (cfg.z) {
        if (!signal_phase)
            throw ConfigError("feasibility.z: requires beam.omega_rad_s or a delta_phase sweep");
        const double folded = fold_phase(*signal_phase);
        if (folded > 0.0) {
            try {
                r.required_quanta = required_quanta(folded, *cfg.z);
            } catch (const NumericalError&) {
                // beyond 2^63 quanta: left empty in the report
            }
        }
    }
    return r;
}

} // namespace scenario_detail

inline Report run_scenario(const ScenarioConfig& cfg) { return scenario_detail::evaluate(cfg, std::nullopt, cfg.seed); }

struct SweepSpec {
    enum class Parameter { delta_phase, beam_omega, body_omega, body_radius, delta_out };
    enum class Scale { linear, logarithmic };
    Parameter parameter = Parameter::delta_phase;
    double from = 0.0;
    double to = 1.0;
    std::size_t steps = 2;
    Scale scale = Scale::linear;

    void validate() const {
        if (!(from < to))
            throw ConfigError("sweep: 'from' must be less than 'to'");
        if (steps < 2)
            throw ConfigError("sweep: steps must be >= 2");
        if (scale == Scale::logarithmic && !(from > 0.0))
            throw ConfigError("sweep: logarithmic scale requires from > 0");
    }

    std::vector<double> grid() const {
        validate();
        std::vector<double> v(steps);
        const double n = static_cast<double>(steps - 1);
        for (std::size_t i = 0; i < steps; ++i) {
            const double f = static_cast<double>(i) / n;
            v[i] = scale == Scale::linear ? from + (to - from) * f
                                          : std::exp(std::log(from) + (std::log(to) - std::log(from)) * f);
        }
        v.front() = from;
        v.back() = to;
        return v;
    }
};

inline const char* parameter_name(SweepSpec::Parameter p) {
    switch (p) {
    case SweepSpec::Parameter::delta_phase: return "delta_phase";
    case SweepSpec::Parameter::beam_omega: return "beam_omega";
    case SweepSpec::Parameter::body_omega: return "body_omega";
    case SweepSpec::Parameter::body_radius: return "body_radius";
    case SweepSpec::Parameter::delta_out: return "delta_out";
    }
    return "";
}

inline const char* parameter_unit(SweepSpec::Parameter p) {
    switch (p) {
    case SweepSpec::Parameter::delta_phase:
    case SweepSpec::Parameter::delta_out: return "rad";
    case SweepSpec::Parameter::beam_omega:
    case SweepSpec::Parameter::body_omega: return "rad/s";
    case SweepSpec::Parameter::body_radius: return "m";
    }
    return "";
}

/// Parses `<param>:<from>:<to>:<steps>[:log]`.
inline SweepSpec parse_sweep(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        auto colon = text.find(':', pos);
        parts.push_back(text.substr(pos, colon == std::string_view::npos ? std::string_view::npos : colon - pos));
        if (colon == std::string_view::npos)
            break;
        pos = colon + 1;
    }
    if (parts.size() != 4 && parts.size() != 5)
        throw ConfigError("sweep: expected <param>:<from>:<to>:<steps>[:log], got '" + std::string(text) + "'");
    SweepSpec s;
    bool found = false;
    for (auto p : {SweepSpec::Parameter::delta_phase, SweepSpec::Parameter::beam_omega,
                   SweepSpec::Parameter::body_omega, SweepSpec::Parameter::body_radius,
                   SweepSpec::Parameter::delta_out})
        if (parts[0] == parameter_name(p)) {
            s.parameter = p;
            found = true;
        }
    if (!found)
        throw ConfigError("sweep: unknown parameter '" + std::string(parts[0]) + "'");
    auto from = scenario_detail::to_double(parts[1]);
    auto to = scenario_detail::to_double(parts[2]);
    auto steps = scenario_detail::to_u64(parts[3]);
    if (!from || !to || !steps)
        throw ConfigError("sweep: malformed numbers in '" + std::string(text) + "'");
    s.from = *from;
    s.to = *to;
    s.steps = static_cast<std::size_t>(*steps);
    if (parts.size() == 5) {
        if (parts[4] != "log")
            throw ConfigError("sweep: unknown scale '" + std::string(parts[4]) + "'");
        s.scale = SweepSpec::Scale::logarithmic;
    }
    s.validate();
    return s;
}

namespace scenario_detail {

inline Report sweep_step(const ScenarioConfig& base, const SweepSpec& sweep, double value, std::uint64_t seed) {
    using P = SweepSpec::Parameter;
    ScenarioConfig cfg = base;
    std::optional<double> phase_override;
    switch (sweep.parameter) {
    case P::delta_phase:
        if (!cfg.network)
            throw ConfigError("sweep delta_phase: requires a network");
        phase_override = value;
        break;
    case P::beam_omega: cfg.beam = BeamSource(value); break;
    case P::body_omega: cfg.body = RotatingBody(value, cfg.body.mean_radius()); break;
    case P::body_radius: cfg.body = RotatingBody(cfg.body.angular_velocity(), value); break;
    case P::delta_out:
        if (!cfg.geometry)
            throw ConfigError("sweep delta_out: requires geometry.delta_in and geometry.delta_out");
        cfg.geometry = FlybyGeometry(cfg.geometry->declination_in(), value);
        break;
    }
    Report r = evaluate(cfg, phase_override, seed);
    r.parameter = value;
    return r;
}

template <typename E>
[[noreturn]] void rethrow_annotated(const E& e, const SweepSpec& sweep, double value) {
    throw E(std::string("sweep ") + parameter_name(sweep.parameter) + "=" + netlang_detail::format_number(value) +
            ": " + e.what());
}

} // namespace scenario_detail

/// Evaluates one report per grid point. Step i samples with seed + i, so the
/// result does not depend on `jobs`.
inline ReportSet run_sweep(const ScenarioConfig& cfg, const SweepSpec& sweep, unsigned jobs = 1) {
    const std::vector<double> grid = sweep.grid();
    std::vector<std::optional<Report>> results(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());

    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < grid.size(); i += stride) {
            try {
                results[i] = scenario_detail::sweep_step(cfg, sweep, grid[i], cfg.seed + i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::future<void>> tasks;
        for (unsigned j = 0; j < jobs; ++j)
            tasks.push_back(std::async(std::launch::async, work, j, jobs));
        for (auto& t : tasks)
            t.get();
    }

    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!errors[i])
            continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const NetworkParseError&) {
            throw;
        } catch (const ConfigError& e) {
            scenario_detail::rethrow_annotated(e, sweep, grid[i]);
        } catch (const NetworkError& e) {
            scenario_detail::rethrow_annotated(e, sweep, grid[i]);
        } catch (const NumericalError& e) {
            scenario_detail::rethrow_annotated(e, sweep, grid[i]);
        } catch (const InvalidArgument& e) {
            scenario_detail::rethrow_annotated(e, sweep, grid[i]);
        }
    }

    ReportSet set{parameter_name(sweep.parameter), parameter_unit(sweep.parameter), {}};
    for (auto& r : results)
        set.reports.push_back(std::move(*r));
    return set;
}

enum class OutputFormat { csv, json };

inline constexpr const char* csv_header =
    "parameter,k_factor,fractional_shift,phase_coefficient,doppler_shift_rad_s,p_d1,p_d2,counts_d1,counts_d2,"
    "required_quanta";

namespace scenario_detail {

inline std::string shortest(double v) { return netlang_detail::format_number(v); }

inline nlohmann::ordered_json units_record(const ReportSet& set) {
    nlohmann::ordered_json u;
    u["parameter"] = set.parameter_unit.empty() ? nlohmann::ordered_json(nullptr)
                                                : nlohmann::ordered_json(set.parameter_unit);
    u["k_factor"] = "1";
    u["fractional_shift"] = "1";
    u["phase_coefficient"] = "1";
    u["doppler_shift_rad_s"] = "rad/s";
    u["detection_probabilities"] = "1";
    u["counts"] = "quanta";
    u["required_quanta"] = "quanta";
    return u;
}

} // namespace scenario_detail

/// CSV: fixed column order, first two detectors map to the d1 / d2 columns,
/// absent values are empty cells.
inline void emit_csv(const ReportSet& set, std::ostream& os) {
    using scenario_detail::shortest;
    os << csv_header << '\n';
    for (const Report& r : set.reports) {
        auto opt = [](const std::optional<double>& v) { return v ? shortest(*v) : std::string(); };
        os << opt(r.parameter) << ',' << shortest(r.k_factor) << ',' << shortest(r.fractional_shift) << ','
           << shortest(r.phase_coefficient) << ',' << opt(r.doppler_shift_rad_s);
        for (std::size_t i = 0; i < 2; ++i) {
            os << ',';
            if (r.probabilities && i < r.probabilities->size())
                os << shortest(r.probabilities->entries()[i].second);
        }
        for (std::size_t i = 0; i < 2; ++i) {
            os << ',';
            if (r.counts && i < r.counts->counts.size())
                os << r.counts->counts[i].second;
        }
        os << ',';
        if (r.required_quanta)
            os << *r.required_quanta;
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const ReportSet& set) {
    using json = nlohmann::ordered_json;
    json doc;
    doc["parameter_name"] = set.parameter_name.empty() ? json(nullptr) : json(set.parameter_name);
    doc["sampler"] = sampler_algorithm;
    doc["reports"] = json::array();
    for (const Report& r : set.reports) {
        json j;
        j["parameter"] = r.parameter ? json(*r.parameter) : json(nullptr);
        j["k_factor"] = r.k_factor;
        j["fractional_shift"] = r.fractional_shift;
        j["phase_coefficient"] = r.phase_coefficient;
        j["doppler_shift_rad_s"] = r.doppler_shift_rad_s ? json(*r.doppler_shift_rad_s) : json(nullptr);
        if (r.probabilities) {
            json p = json::object();
            for (const auto& [name, v] : r.probabilities->entries())
                p[name] = v;
            j["detection_probabilities"] = p;
        } else {
            j["detection_probabilities"] = nullptr;
        }
        if (r.counts) {
            json c = json::object();
            c["total"] = r.counts->total;
            c["seed"] = r.counts->seed;
            json by = json::object();
            for (const auto& [name, n] : r.counts->counts)
                by[name] = n;
            c["by_detector"] = by;
            j["counts"] = c;
        } else {
            j["counts"] = nullptr;
        }
        j["required_quanta"] = r.required_quanta ? json(*r.required_quanta) : json(nullptr);
        j["units"] = scenario_detail::units_record(set);
        doc["reports"].push_back(std::move(j));
    }
    return doc;
}

inline void emit_json(const ReportSet& set, std::ostream& os) { os << to_json(set).dump(2) << '\n'; }

inline void emit(const ReportSet& set, OutputFormat format, std::ostream& os) {
    if (format == OutputFormat::csv)
        emit_csv(set, os);
    else
        emit_json(set, os);
    if (!os)
        throw Error("failed to write report output");
}

inline void emit(const ReportSet& set, OutputFormat format, const std::filesystem::path& destination) {
    std::ofstream out(destination, std::ios::binary);
    if (!out)
        throw Error("cannot write to '" + destination.string() + "'");
    emit(set, format, out);
}

} // namespace flyby
