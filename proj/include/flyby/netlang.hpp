#pragma once

// Line-based interferometer description language (.ifo files).
//
//   mode <name>+
//   source <name>
//   bs <name> <in> [<in2>] -> <t_out> <r_out>
//   mirror <name> <in> -> <out>
//   phase <name> <mode> <radians>
//   rotor <name> <mode>
//   detect <name> <mode>
//
// `#` starts a comment. Statement order is element application order.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "flyby/network.hpp"
#include "flyby/physics.hpp"
#include "flyby/state.hpp"

namespace flyby {

enum class Severity { error, warning };

struct Diagnostic {
    std::size_t line;   ///< 1-based
    std::size_t column; ///< 1-based, byte offset
    std::string message;
    Severity severity = Severity::error;
};

struct ParseResult {
    std::optional<Network> network;
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return network.has_value(); }
};

inline std::string format_diagnostic(const Diagnostic& d, std::string_view file = "<input>") {
    std::ostringstream os;
    os << file << ':' << d.line << ':' << d.column << ": "
       << (d.severity == Severity::error ? "error" : "warning") << ": " << d.message;
    return os.str();
}

namespace netlang_detail {

struct Token {
    std::string_view text;
    std::size_t column;
};

struct Statement {
    std::size_t line;
    std::vector<Token> tokens;

    std::size_t column_of(std::string_view word, bool last = false) const {
        std::optional<std::size_t> found;
        for (std::size_t i = 1; i < tokens.size(); ++i)
            if (tokens[i].text == word) {
                found = tokens[i].column;
                if (!last)
                    break;
            }
        return found.value_or(tokens.front().column);
    }
};

inline std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        if (i >= line.size())
            break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t')
            ++j;
        out.push_back({line.substr(i, j - i), i + 1});
        i = j;
    }
    return out;
}

inline bool is_number_literal(std::string_view s) {
    static const std::regex re(R"([+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?)");
    return std::regex_match(s.begin(), s.end(), re);
}

inline std::optional<double> parse_number(std::string_view s) {
    if (!is_number_literal(s))
        return std::nullopt;
    if (s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace netlang_detail

/// Parses a network description. All errors are collected; `network` is set
/// only when no error diagnostics were produced. `rotor` statements need
/// both `body` and `beam`.
inline ParseResult parse_network(std::string_view source_text, std::optional<RotatingBody> body = std::nullopt,
                                 std::optional<BeamSource> beam = std::nullopt) {
    using namespace netlang_detail;
    ParseResult result;
    auto error = [&](std::size_t line, std::size_t col, std::string msg) {
        result.diagnostics.push_back({line, col, std::move(msg), Severity::error});
    };

    std::vector<ModeLabel> modes;
    std::vector<std::pair<std::size_t, std::size_t>> mode_locations;
    std::optional<ModeLabel> source;
    std::optional<Statement> source_statement;
    std::vector<Element> elements;
    std::vector<Statement> element_statements;
    std::vector<Detector> detectors;
    std::vector<Statement> detector_statements;

    auto name_ok = [&](const Statement& st, const Token& tok, std::string_view what) {
        if (ModeLabel::is_valid(tok.text))
            return true;
        error(st.line, tok.column, "invalid " + std::string(what) + " '" + std::string(tok.text) + "'");
        return false;
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source_text.size()) {
        std::size_t eol = source_text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = source_text.size();
        std::string_view line = source_text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);

        Statement st{line_no, tokenize(line)};
        if (st.tokens.empty())
            continue;
        const std::string_view kw = st.tokens[0].text;
        const auto& tk = st.tokens;
        const std::size_t kw_col = tk[0].column;

        auto arity = [&](std::size_t n, std::string_view usage) {
            if (tk.size() == n)
                return true;
            error(st.line, tk.size() > n ? tk[n].column : kw_col,
                  "'" + std::string(kw) + "' expects: " + std::string(usage));
            return false;
        };

        if (kw == "mode") {
            if (tk.size() < 2) {
                error(st.line, kw_col, "'mode' expects at least one mode name");
                continue;
            }
            for (std::size_t i = 1; i < tk.size(); ++i)
                if (name_ok(st, tk[i], "mode name")) {
                    modes.emplace_back(std::string(tk[i].text));
                    mode_locations.emplace_back(st.line, tk[i].column);
                }
        } else if (kw == "source") {
            if (!arity(2, "source <mode>") || !name_ok(st, tk[1], "mode name"))
                continue;
            if (source) {
                error(st.line, kw_col,
                      "duplicate source declaration (first on line " + std::to_string(source_statement->line) + ")");
                continue;
            }
            source = ModeLabel(std::string(tk[1].text));
            source_statement = st;
        } else if (kw == "bs") {
            std::size_t arrow = 0;
            for (std::size_t i = 1; i < tk.size(); ++i)
                if (tk[i].text == "->") {
                    arrow = i;
                    break;
                }
            if (arrow == 0 || (arrow != 3 && arrow != 4) || tk.size() != arrow + 3) {
                error(st.line, kw_col, "'bs' expects: bs <name> <in> [<in2>] -> <t_out> <r_out>");
                continue;
            }
            bool good = name_ok(st, tk[1], "element name");
            for (std::size_t i = 2; i < tk.size(); ++i)
                if (i != arrow)
                    good = name_ok(st, tk[i], "mode name") && good;
            if (!good)
                continue;
            std::optional<ModeLabel> in2;
            if (arrow == 4)
                in2 = ModeLabel(std::string(tk[3].text));
            elements.push_back(BeamSplitter{std::string(tk[1].text), std::string(tk[2].text), in2,
                                            std::string(tk[arrow + 1].text), std::string(tk[arrow + 2].text)});
            element_statements.push_back(st);
        } else if (kw == "mirror") {
            if (tk.size() != 5 || tk[3].text != "->") {
                error(st.line, kw_col, "'mirror' expects: mirror <name> <in> -> <out>");
                continue;
            }
            bool good = name_ok(st, tk[1], "element name");
            good = name_ok(st, tk[2], "mode name") && good;
            good = name_ok(st, tk[4], "mode name") && good;
            if (!good)
                continue;
            elements.push_back(Mirror{std::string(tk[1].text), std::string(tk[2].text), std::string(tk[4].text)});
            element_statements.push_back(st);
        } else if (kw == "phase") {
            if (!arity(4, "phase <name> <mode> <radians>"))
                continue;
            bool good = name_ok(st, tk[1], "element name");
            good = name_ok(st, tk[2], "mode name") && good;
            auto value = parse_number(tk[3].text);
            if (!value) {
                error(st.line, tk[3].column, "invalid numeric literal '" + std::string(tk[3].text) + "'");
                good = false;
            }
            if (!good)
                continue;
            elements.push_back(PhaseShifter{std::string(tk[1].text), std::string(tk[2].text), *value});
            element_statements.push_back(st);
        } else if (kw == "rotor") {
            if (!arity(3, "rotor <name> <mode>"))
                continue;
            bool good = name_ok(st, tk[1], "element name");
            good = name_ok(st, tk[2], "mode name") && good;
            if (!body || !beam) {
                error(st.line, kw_col, "'rotor' requires a rotating body and beam to be supplied");
                good = false;
            }
            if (!good)
                continue;
            elements.push_back(RotatingObjectSegment{std::string(tk[1].text), std::string(tk[2].text), *body, *beam});
            element_statements.push_back(st);
        } else if (kw == "detect") {
            if (!arity(3, "detect <name> <mode>"))
                continue;
            bool good = name_ok(st, tk[1], "detector name");
            good = name_ok(st, tk[2], "mode name") && good;
            if (!good)
                continue;
            detectors.push_back(Detector{std::string(tk[1].text), std::string(tk[2].text)});
            detector_statements.push_back(st);
        } else {
            error(st.line, kw_col, "unknown keyword '" + std::string(kw) + "'");
        }
    }

    if (!source)
        error(1, 1, "missing source declaration");
    if (modes.empty())
        error(1, 1, "missing mode declaration");

    if (!modes.empty()) {
        const ModeLabel effective_source = source.value_or(modes.front());
        for (const auto& issue : check_network(modes, effective_source, elements, detectors)) {
            using S = NetworkIssue::Subject;
            switch (issue.subject) {
            case S::modes:
                error(mode_locations[issue.index].first, mode_locations[issue.index].second, issue.message);
                break;
            case S::source:
                if (source_statement)
                    error(source_statement->line, source_statement->tokens[1].column, issue.message);
                break;
            case S::element: {
                const Statement& st = element_statements[issue.index];
                // Outputs follow the arrow; point at the last occurrence for write conflicts.
                const bool is_write = issue.message.starts_with("single-assignment");
                error(st.line, issue.mode ? st.column_of(issue.mode->str(), is_write) : st.tokens[1].column,
                      issue.message);
                break;
            }
            case S::detector: {
                const Statement& st = detector_statements[issue.index];
                error(st.line, issue.mode ? st.tokens[2].column : st.tokens[1].column, issue.message);
                break;
            }
            }
        }
    }

    const bool failed = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                    [](const Diagnostic& d) { return d.severity == Severity::error; });
    if (!failed) {
        if (detectors.empty() && !elements.empty())
            result.diagnostics.push_back({1, 1, "network declares no detectors", Severity::warning});
        result.network.emplace(std::move(modes), std::move(*source), std::move(elements), std::move(detectors));
    }
    std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                         return std::pair(a.line, a.column) < std::pair(b.line, b.column);
                     });
    return result;
}

/// Canonical text form: mode line, source line, elements in order, detectors.
/// Rotor elements are emitted without their body and beam, so parsing the
/// output back requires supplying the same body and beam again.
inline std::string format_network(const Network& network) {
    using netlang_detail::format_number;
    std::string out = "mode";
    for (const auto& m : network.modes())
        out += ' ' + m.str();
    out += "\nsource " + network.source().str() + '\n';
    for (const auto& el : network.elements()) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, BeamSplitter>) {
                    out += "bs " + x.name + ' ' + x.input.str();
                    if (x.second_input)
                        out += ' ' + x.second_input->str();
                    out += " -> " + x.transmit_out.str() + ' ' + x.reflect_out.str();
                } else if constexpr (std::is_same_v<T, Mirror>) {
                    out += "mirror " + x.name + ' ' + x.input.str() + " -> " + x.output.str();
                } else if constexpr (std::is_same_v<T, PhaseShifter>) {
                    out += "phase " + x.name + ' ' + x.mode.str() + ' ' + format_number(x.phase);
                } else {
                    out += "rotor " + x.name + ' ' + x.mode.str();
                }
            },
            el);
        out += '\n';
    }
    for (const auto& d : network.detectors())
        out += "detect " + d.name + ' ' + d.mode.str() + '\n';
    return out;
}

} // namespace flyby
