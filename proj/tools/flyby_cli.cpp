// Command-line front end: scenario, sweep, parse, presets.
//
// Exit codes: 0 success, 1 configuration or parse error, 2 numerical or
// validation error (leakage, non-unitary network, invalid swept value).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "flyby/flyby.hpp"

namespace {

constexpr int exit_config = 1;
constexpr int exit_numerical = 2;

struct CommonOptions {
    std::string config;
    std::string format = "csv";
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> shots;
    std::optional<double> z;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "scenario configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "output file (default: standard output)");
    cmd->add_option("--seed", o.seed, "sampling seed, overrides sampling.seed");
    cmd->add_option("--shots", o.shots, "number of quanta to sample, overrides sampling.shots")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--z", o.z, "significance in standard deviations for required_quanta")
        ->check(CLI::PositiveNumber);
}

flyby::ScenarioConfig load(const CommonOptions& o) {
    flyby::ScenarioConfig cfg = flyby::load_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.shots)
        cfg.shots = *o.shots;
    if (o.z)
        cfg.z = *o.z;
    return cfg;
}

void write(const flyby::ReportSet& set, const CommonOptions& o) {
    const auto fmt = o.format == "json" ? flyby::OutputFormat::json : flyby::OutputFormat::csv;
    if (o.out.empty())
        flyby::emit(set, fmt, std::cout);
    else
        flyby::emit(set, fmt, std::filesystem::path(o.out));
}

int run_parse(const std::string& path, bool canonical, std::optional<double> body_omega, double body_radius,
              std::optional<double> beam_omega) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open '" << path << "'\n";
        return exit_config;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    std::optional<flyby::RotatingBody> body;
    std::optional<flyby::BeamSource> beam;
    if (body_omega)
        body.emplace(*body_omega, body_radius);
    if (beam_omega)
        beam.emplace(*beam_omega);
    const auto result = flyby::parse_network(ss.str(), body, beam);
    for (const auto& d : result.diagnostics)
        std::cerr << flyby::format_diagnostic(d, path) << '\n';
    if (!result.ok())
        return exit_config;
    flyby::compose_unitary(*result.network);
    if (canonical)
        std::cout << flyby::format_network(*result.network);
    else
        std::cout << path << ": ok (" << result.network->modes().size() << " modes, "
                  << result.network->elements().size() << " elements, " << result.network->detectors().size()
                  << " detectors)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flyby-anomaly interferometer simulator"};
    app.require_subcommand(1);

    CommonOptions scenario_opts;
    auto* scenario = app.add_subcommand("scenario", "evaluate a single scenario");
    add_common(scenario, scenario_opts);

    CommonOptions sweep_opts;
    std::string sweep_text;
    unsigned jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "evaluate a scenario over a parameter grid");
    add_common(sweep, sweep_opts);
    sweep->add_option("--sweep", sweep_text, "<param>:<from>:<to>:<steps>[:log]")->required();
    sweep->add_option("--jobs", jobs, "worker threads (output does not depend on this)")
        ->check(CLI::PositiveNumber);

    std::string ifo_path;
    bool canonical = false;
    std::optional<double> parse_body_omega;
    double parse_body_radius = 1.0;
    std::optional<double> parse_beam_omega;
    auto* parse = app.add_subcommand("parse", "check an .ifo network description");
    parse->add_option("file", ifo_path, "network file")->required();
    parse->add_flag("--canonical", canonical, "print the canonical form on success");
    parse->add_option("--body-omega", parse_body_omega, "rotor body angular velocity, rad/s");
    parse->add_option("--body-radius", parse_body_radius, "rotor body mean radius, m");
    parse->add_option("--beam-omega", parse_beam_omega, "beam angular frequency, rad/s");

    auto* presets = app.add_subcommand("presets", "list built-in body presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (*presets) {
            for (const auto& p : flyby::body_presets())
                std::cout << "[" << p.name << "] " << p.description << '\n' << p.config_text << '\n';
            std::cout << "[network] mach-zehnder: source a, splitters S1 and S2, rotor O in arm b, "
                         "detectors D1 (d) and D2 (e)\n"
                         "[network] michelson: double pass through the rotor arm "
                         "(requires network.extrapolation = true)\n";
            return 0;
        }
        if (*parse)
            return run_parse(ifo_path, canonical, parse_body_omega, parse_body_radius, parse_beam_omega);
        if (*scenario) {
            const auto cfg = load(scenario_opts);
            flyby::ReportSet set;
            set.reports.push_back(flyby::run_scenario(cfg));
            write(set, scenario_opts);
            return 0;
        }
        if (*sweep) {
            const auto cfg = load(sweep_opts);
            const auto spec = flyby::parse_sweep(sweep_text);
            write(flyby::run_sweep(cfg, spec, jobs), sweep_opts);
            return 0;
        }
    } catch (const flyby::NetworkParseError& e) {
        for (const auto& d : e.diagnostics())
            std::cerr << flyby::format_diagnostic(d, e.file()) << '\n';
        return exit_config;
    } catch (const flyby::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const flyby::NetworkError& e) {
        std::cerr << "network error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const flyby::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const flyby::InvalidArgument& e) {
        std::cerr << "invalid value: " << e.what() << '\n';
        return exit_numerical;
    } catch (const flyby::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
    return 0;
}
