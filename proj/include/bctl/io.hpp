#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "bctl/control_signal.hpp"
#include "bctl/spectral.hpp"

namespace bctl {

/// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double v);

/// Parses a state spec: terms `sin:k:amp` joined by `+`, or `zero`.
/// Example: "sin:3:1+sin:4:0.5". Throws InvalidArgument naming the bad token.
SineState parse_state_spec(std::string_view spec);

/// Inverse of parse_state_spec for nonzero coefficients.
std::string state_spec(const SineState& u);

/// Parses a force spec on [0, T]:
///   zero                     the zero force
///   const:<state spec>       a constant force, e.g. const:sin:1:0.5
///   alt:<m>:<state spec>     +v/-v on 2m equal subintervals
///   manufactured[:<spec>]    the force making e^{-t} w an exact solution (w = sin x by default)
///   file:<path>              a piecewise control in the JSON form below
/// Throws InvalidArgument naming the bad token.
ControlSignal parse_force_spec(std::string_view spec, double T, double nu);

/// Control CSV: header "t,a1,...,aM". Piecewise signals emit one row per
/// piece start (the value held from that time) plus a closing row at T;
/// other variants are sampled on `samples`+1 equispaced times.
std::string control_csv(const ControlSignal& f, std::size_t samples = 256);

/// JSON form of a piecewise (or constant) control:
/// {"kind": ..., "horizon": T, "durations": [...], "values": [[a_1, ...], ...]}.
/// Other variants are snapped to `samples` uniform pieces first and tagged
/// with "snapped_from".
nlohmann::json control_json(const ControlSignal& f, std::size_t samples = 256);

/// Reads the JSON form written by control_json.
ControlSignal control_from_json(const nlohmann::json& j);

/// Writes `content` to `path`, throwing Error on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace bctl
