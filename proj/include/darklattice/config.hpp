#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "darklattice/dynamics.hpp"
#include "darklattice/hamiltonian.hpp"
#include "darklattice/linalg.hpp"

namespace darklattice {

struct StirapOptions {
    double duration = 200.0;
    double amplitude = 1.0;
    ScheduleKind kind = ScheduleKind::theta_ramp;
};

struct CountRange {
    int modes_min = 2, modes_max = 4;
    int excitation_min = 1, excitation_max = 3;
};

/// Fully validated run configuration. Defaults: omega0 = 1, omegas = omega0
/// for every mode (zero detuning), tolerances 1e-12 / 1e-10, rotating frame.
struct RunConfig {
    ModelParams model;
    int excitation = 1;
    TolerancePolicy tol;
    Frame frame = Frame::rotating;
    bool allow_nondegenerate = false;
    StirapOptions stirap;
    CountRange count;
    std::string out_dir;           // empty: do not persist
    std::string format = "json";   // json | dot | csv
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key \"" + it.key() + "\" in " + where);
}

/// "a..b" or "a" (or a bare integer) -> inclusive range.
inline std::pair<int, int> parse_range(const nlohmann::json& j, const std::string& key) {
    if (j.is_number_integer()) {
        const int v = j.get<int>();
        return {v, v};
    }
    if (!j.is_string())
        throw std::invalid_argument("config: " + key + " range must be an integer or \"a..b\"");
    const std::string s = j.get<std::string>();
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            const int v = std::stoi(s);
            return {v, v};
        }
        return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
    } catch (const std::exception&) {
        throw std::invalid_argument("config: malformed range \"" + s + "\" for " + key);
    }
}

}  // namespace detail

/// Build and validate a RunConfig from parsed JSON. Unknown keys are
/// rejected; missing required keys (N, n, g) are reported by name.
inline RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    detail::reject_unknown_keys(j,
                                {"N", "n", "g", "omega0", "omegas", "tolerance", "frame",
                                 "allow_nondegenerate", "stirap", "count", "out", "format"},
                                "top level");
    RunConfig cfg;
    for (const char* req : {"N", "n", "g"})
        if (!j.contains(req))
            throw std::invalid_argument(std::string("config: missing required key \"") + req + "\"");

    cfg.model.modes = j.at("N").get<int>();
    cfg.excitation = j.at("n").get<int>();
    if (cfg.model.modes < 1) throw std::invalid_argument("config: N must be >= 1");
    if (cfg.excitation < 1) throw std::invalid_argument("config: n must be >= 1 (subspaces start at n=1)");
    cfg.model.couplings = j.at("g").get<std::vector<double>>();
    cfg.model.omega0 = j.value("omega0", 1.0);
    if (j.contains("omegas"))
        cfg.model.omegas = j.at("omegas").get<std::vector<double>>();
    else
        cfg.model.omegas.assign(static_cast<std::size_t>(cfg.model.modes), cfg.model.omega0);
    cfg.model.validate();

    if (j.contains("tolerance")) {
        const auto& t = j.at("tolerance");
        detail::reject_unknown_keys(t, {"rank_eps", "residual_eps"}, "tolerance");
        cfg.tol.rank_eps = t.value("rank_eps", cfg.tol.rank_eps);
        cfg.tol.residual_eps = t.value("residual_eps", cfg.tol.residual_eps);
        cfg.tol.validate();
    }
    if (j.contains("frame")) {
        const std::string f = j.at("frame").get<std::string>();
        if (f == "lab") cfg.frame = Frame::lab;
        else if (f == "rotating") cfg.frame = Frame::rotating;
        else throw std::invalid_argument("config: frame must be \"rotating\" or \"lab\"");
    }
    cfg.allow_nondegenerate = j.value("allow_nondegenerate", false);

    if (j.contains("stirap")) {
        const auto& s = j.at("stirap");
        detail::reject_unknown_keys(s, {"T", "G", "schedule"}, "stirap");
        cfg.stirap.duration = s.value("T", cfg.stirap.duration);
        cfg.stirap.amplitude = s.value("G", cfg.stirap.amplitude);
        if (s.contains("schedule")) {
            const std::string k = s.at("schedule").get<std::string>();
            if (k == "theta_ramp") cfg.stirap.kind = ScheduleKind::theta_ramp;
            else if (k == "sin2_overlap") cfg.stirap.kind = ScheduleKind::sin2_overlap;
            else throw std::invalid_argument("config: unknown stirap schedule \"" + k + "\"");
        }
        if (!(cfg.stirap.duration > 0)) throw std::invalid_argument("config: stirap T must be > 0");
        if (!(cfg.stirap.amplitude > 0)) throw std::invalid_argument("config: stirap G must be > 0");
    }

    cfg.count = {cfg.model.modes, cfg.model.modes, cfg.excitation, cfg.excitation};
    if (j.contains("count")) {
        const auto& c = j.at("count");
        detail::reject_unknown_keys(c, {"N", "n"}, "count");
        if (c.contains("N"))
            std::tie(cfg.count.modes_min, cfg.count.modes_max) = detail::parse_range(c.at("N"), "count.N");
        if (c.contains("n"))
            std::tie(cfg.count.excitation_min, cfg.count.excitation_max) =
                detail::parse_range(c.at("n"), "count.n");
        if (cfg.count.modes_min < 1 || cfg.count.modes_min > cfg.count.modes_max ||
            cfg.count.excitation_min < 1 || cfg.count.excitation_min > cfg.count.excitation_max)
            throw std::invalid_argument("config: malformed count ranges");
    }

    cfg.out_dir = j.value("out", std::string());
    cfg.format = j.value("format", std::string("json"));
    if (cfg.format != "json" && cfg.format != "dot" && cfg.format != "csv")
        throw std::invalid_argument("config: format must be json, dot or csv");
    return cfg;
}

/// Parse a JSON config text. Parse errors carry the byte position from the
/// JSON parser; validation errors name the offending key.
inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return config_from_json(j);
}

/// Canonical JSON image of a config (used for the parameter hash).
inline nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["N"] = cfg.model.modes;
    j["n"] = cfg.excitation;
    j["g"] = cfg.model.couplings;
    j["omega0"] = cfg.model.omega0;
    j["omegas"] = cfg.model.omegas;
    j["tolerance"] = {{"rank_eps", cfg.tol.rank_eps}, {"residual_eps", cfg.tol.residual_eps}};
    j["frame"] = cfg.frame == Frame::lab ? "lab" : "rotating";
    j["allow_nondegenerate"] = cfg.allow_nondegenerate;
    j["stirap"] = {{"T", cfg.stirap.duration},
                   {"G", cfg.stirap.amplitude},
                   {"schedule", cfg.stirap.kind == ScheduleKind::sin2_overlap ? "sin2_overlap"
                                                                              : "theta_ramp"}};
    j["count"] = {{"N", std::to_string(cfg.count.modes_min) + ".." + std::to_string(cfg.count.modes_max)},
                  {"n", std::to_string(cfg.count.excitation_min) + ".." +
                            std::to_string(cfg.count.excitation_max)}};
    j["format"] = cfg.format;
    return j;
}

}  // namespace darklattice
