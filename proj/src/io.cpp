#include "bctl/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bctl/control_calculus.hpp"
#include "bctl/error.hpp"
#include "bctl/solver.hpp"

namespace bctl {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void bad_token(std::string_view token, std::string_view why) {
    throw InvalidArgument("bad state spec token '" + std::string(token) + "': " + std::string(why));
}

}  // namespace

SineState parse_state_spec(std::string_view spec) {
    spec = trim(spec);
    if (spec.empty()) bad_token(spec, "empty spec");
    if (spec == "zero" || spec == "0") return SineState();
    SineState out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t plus = spec.find('+', pos);
        const std::string_view term =
            trim(spec.substr(pos, plus == std::string_view::npos ? spec.npos : plus - pos));
        const std::size_t c1 = term.find(':');
        const std::size_t c2 = c1 == term.npos ? term.npos : term.find(':', c1 + 1);
        if (c1 == term.npos || c2 == term.npos || term.substr(0, c1) != "sin") {
            bad_token(term, "expected sin:k:amp");
        }
        const std::string_view ks = term.substr(c1 + 1, c2 - c1 - 1);
        const std::string amps(term.substr(c2 + 1));
        std::size_t k = 0;
        auto [pk, ek] = std::from_chars(ks.data(), ks.data() + ks.size(), k);
        if (ek != std::errc() || pk != ks.data() + ks.size() || k == 0) {
            bad_token(ks, "mode index must be a positive integer");
        }
        std::size_t used = 0;
        double amp = 0.0;
        try {
            amp = std::stod(amps, &used);
        } catch (const std::exception&) {
            bad_token(amps, "amplitude is not a number");
        }
        if (used != amps.size() || !std::isfinite(amp)) bad_token(amps, "amplitude is not a number");
        out.at(k) += amp;
        if (plus == std::string_view::npos) break;
        pos = plus + 1;
    }
    return out;
}

ControlSignal parse_force_spec(std::string_view spec, double T, double nu) {
    spec = trim(spec);
    auto after = [&](std::string_view prefix) { return spec.substr(prefix.size()); };
    if (spec == "zero" || spec == "0") return ControlSignal::zero(T);
    if (spec.starts_with("const:")) return ControlSignal::constant(parse_state_spec(after("const:")), T);
    if (spec == "manufactured") return manufactured_forcing(SineState::mode(1), nu, T);
    if (spec.starts_with("manufactured:")) {
        return manufactured_forcing(parse_state_spec(after("manufactured:")), nu, T);
    }
    if (spec.starts_with("alt:")) {
        const std::string_view rest = after("alt:");
        const std::size_t colon = rest.find(':');
        const std::string_view ms = rest.substr(0, colon);
        std::size_t m = 0;
        auto [pm, em] = std::from_chars(ms.data(), ms.data() + ms.size(), m);
        if (colon == rest.npos || em != std::errc() || pm != ms.data() + ms.size() || m == 0) {
            throw InvalidArgument("bad force spec token '" + std::string(ms) +
                                  "': expected alt:<m>:<state spec> with m >= 1");
        }
        return alternating_control(parse_state_spec(rest.substr(colon + 1)), m, T);
    }
    if (spec.starts_with("file:")) {
        const std::string path(after("file:"));
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument("bad force spec token '" + path + "': " + e.what());
        }
        return control_from_json(j);
    }
    throw InvalidArgument("bad force spec token '" + std::string(spec) +
                          "': expected zero, const:, alt:, manufactured or file:");
}

std::string state_spec(const SineState& u) {
    std::string s;
    for (std::size_t k = 1; k <= u.order(); ++k) {
        if (u.coeff(k) == 0.0) continue;
        if (!s.empty()) s += '+';
        s += "sin:" + std::to_string(k) + ":" + format_double(u.coeff(k));
    }
    return s.empty() ? "zero" : s;
}

std::string control_csv(const ControlSignal& f, std::size_t samples) {
    const std::size_t m = f.max_order();
    std::ostringstream os;
    os << "t";
    for (std::size_t k = 1; k <= m; ++k) os << ",a" << k;
    os << '\n';
    auto row = [&](double t, const SineState& v) {
        os << format_double(t);
        for (std::size_t k = 1; k <= m; ++k) os << ',' << format_double(v.coeff(k));
        os << '\n';
    };
    if (f.is_piecewise_constant()) {
        const auto d = f.piece_durations();
        const auto v = f.piece_values();
        double t = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            row(t, v[i]);
            t += d[i];
        }
        row(f.horizon(), v.back());
    } else {
        for (std::size_t i = 0; i <= samples; ++i) {
            const double t = f.horizon() * double(i) / double(samples);
            row(t, f.value(t, i == samples ? Side::left : Side::right));
        }
    }
    return os.str();
}

nlohmann::json control_json(const ControlSignal& f, std::size_t samples) {
    nlohmann::json j;
    ControlSignal pw = f;
    if (!f.is_piecewise_constant()) {
        pw = snap_uniform(f, samples);
        j["snapped_from"] = to_string(f.kind());
        j["source_name"] = f.name();
    }
    j["kind"] = to_string(pw.kind());
    j["horizon"] = pw.horizon();
    j["durations"] = pw.piece_durations();
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& v : pw.piece_values()) vals.push_back(v.vec());
    j["values"] = std::move(vals);
    return j;
}

ControlSignal control_from_json(const nlohmann::json& j) {
    try {
        auto durations = j.at("durations").get<std::vector<double>>();
        std::vector<SineState> values;
        for (const auto& v : j.at("values")) values.emplace_back(v.get<std::vector<double>>());
        if (j.value("kind", "") == "constant" && values.size() == 1) {
            return ControlSignal::constant(values.front(), durations.front());
        }
        return ControlSignal::piecewise(std::move(durations), std::move(values));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed control JSON: ") + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace bctl
