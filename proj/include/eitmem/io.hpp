// Config-document parsing (strict schema: unknown keys are rejected) and
// report serialization.  Documents are JSON; numeric report fields are
// rounded to 12 significant digits before serialization so artifacts are
// byte-identical across runs.

#pragma once

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "format.hpp"
#include "input_state.hpp"
#include "oracle.hpp"
#include "schedule.hpp"
#include "verify.hpp"

namespace eitmem {

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace io {

using nlohmann::json;

inline int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

// Best-effort line anchor for schema errors: first occurrence of the key.
inline std::string anchor(const std::string& raw, const std::string& key) {
    const auto pos = raw.find("\"" + key + "\"");
    if (pos == std::string::npos) return "";
    return " (line " + std::to_string(line_of_byte(raw, pos)) + ")";
}

struct Doc {
    json root;
    std::string raw;

    static Doc parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw SchemaError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_text(ss.str(), path);
    }

    static Doc parse_text(std::string text, const std::string& origin = "<input>") {
        Doc d;
        d.raw = std::move(text);
        try {
            d.root = json::parse(d.raw);
        } catch (const json::parse_error& e) {
            throw SchemaError(origin + ": parse error at line " +
                              std::to_string(line_of_byte(d.raw, e.byte)) + ": " + e.what());
        }
        return d;
    }
};

inline void check_keys(const Doc& doc, const json& j, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw SchemaError(path + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw SchemaError(path + ": unknown key '" + key + "'" + anchor(doc.raw, key));
    }
}

inline const json& require(const Doc& doc, const json& j, const std::string& path,
                           const char* key) {
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(path + ": missing required key '" + std::string(key) + "'" +
                          anchor(doc.raw, key));
    return j.at(key);
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path + ": expected a number");
    return j.get<double>();
}

inline std::int64_t as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path + ": expected an integer");
    return j.get<std::int64_t>();
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path + ": expected a string");
    return j.get<std::string>();
}

inline std::complex<double> as_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw SchemaError(path + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<double> as_number_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path));
    return out;
}

inline std::vector<std::int64_t> as_integer_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + ": expected an array of integers");
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_integer(j[i], path));
    return out;
}

inline std::vector<ProfileSample> as_samples(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + ": expected an array of [z, value] pairs");
    std::vector<ProfileSample> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& p = j[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw SchemaError(path + ": expected [z, value] pairs");
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
}

// ---- section parsers ------------------------------------------------------

inline SystemSpec parse_system(const Doc& doc, const json& j, const std::string& path) {
    check_keys(doc, j, path, {"atom_counts", "probe_couplings", "control_weights", "profiles"});
    const bool has_profiles = j.contains("profiles");
    const bool has_couplings = j.contains("atom_counts") || j.contains("probe_couplings") ||
                               j.contains("control_weights");
    if (has_profiles && has_couplings)
        throw SchemaError(path + ": give either explicit couplings or profiles, not both");
    try {
        if (has_profiles) {
            const json& p = j.at("profiles");
            check_keys(doc, p, path + ".profiles", {"total_atoms", "bins", "g_samples", "w_samples"});
            ProfileSpec spec;
            spec.total_atoms = as_integer(require(doc, p, path + ".profiles", "total_atoms"),
                                          path + ".profiles.total_atoms");
            spec.bins = static_cast<int>(as_integer(require(doc, p, path + ".profiles", "bins"),
                                                    path + ".profiles.bins"));
            spec.g_samples = as_samples(require(doc, p, path + ".profiles", "g_samples"),
                                        path + ".profiles.g_samples");
            spec.w_samples = as_samples(require(doc, p, path + ".profiles", "w_samples"),
                                        path + ".profiles.w_samples");
            SystemSpec s = SystemSpec::from_profiles(spec);
            s.realize();  // validate eagerly
            return s;
        }
        auto counts = as_integer_list(require(doc, j, path, "atom_counts"), path + ".atom_counts");
        auto g = as_number_list(require(doc, j, path, "probe_couplings"),
                                path + ".probe_couplings");
        auto w = as_number_list(require(doc, j, path, "control_weights"),
                                path + ".control_weights");
        return SystemSpec::from_config(SubEnsembleConfig::from_couplings(counts, g, w));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path + ": " + e.what());
    } catch (const std::domain_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline ControlSchedule parse_schedule(const Doc& doc, const json& j, const std::string& path) {
    check_keys(doc, j, path, {"direction", "ramp_time", "peak", "shape", "hold"});
    ControlSchedule s;
    const std::string dir = as_string(require(doc, j, path, "direction"), path + ".direction");
    if (dir == "storage") s.direction = Direction::storage;
    else if (dir == "retrieval") s.direction = Direction::retrieval;
    else if (dir == "roundtrip") s.direction = Direction::roundtrip;
    else throw SchemaError(path + ".direction: expected storage | retrieval | roundtrip");
    s.ramp_time = as_number(require(doc, j, path, "ramp_time"), path + ".ramp_time");
    s.peak = as_number(require(doc, j, path, "peak"), path + ".peak");
    if (j.contains("shape")) {
        const std::string shape = as_string(j.at("shape"), path + ".shape");
        if (shape == "raised-cosine") s.shape = EnvelopeShape::raised_cosine;
        else if (shape == "linear") s.shape = EnvelopeShape::linear;
        else if (shape == "tanh") s.shape = EnvelopeShape::tanh_ramp;
        else throw SchemaError(path + ".shape: expected raised-cosine | linear | tanh");
    }
    if (j.contains("hold")) s.hold = as_number(j.at("hold"), path + ".hold");
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return s;
}

inline InputState parse_input(const Doc& doc, const json& j, const std::string& path) {
    check_keys(doc, j, path, {"kind", "coefficients", "photon_number", "alpha"});
    const std::string kind = as_string(require(doc, j, path, "kind"), path + ".kind");
    try {
        if (kind == "single-photon") return InputState::single_photon();
        if (kind == "fock-number") {
            return InputState::fock_number(static_cast<int>(
                as_integer(require(doc, j, path, "photon_number"), path + ".photon_number")));
        }
        if (kind == "fock") {
            const json& arr = require(doc, j, path, "coefficients");
            if (!arr.is_array() || arr.empty())
                throw SchemaError(path + ".coefficients: expected a nonempty array");
            std::vector<std::complex<double>> c;
            for (std::size_t i = 0; i < arr.size(); ++i)
                c.push_back(as_complex(arr[i], path + ".coefficients"));
            return InputState::fock(std::move(c));
        }
        if (kind == "coherent")
            return InputState::coherent(as_complex(require(doc, j, path, "alpha"), path + ".alpha"));
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path + ": " + e.what());
    }
    throw SchemaError(path + ".kind: expected single-photon | fock-number | fock | coherent");
}

struct OracleRunSpec {
    std::vector<int> atom_grid;                  // register sizes to compare
    std::string coupling_kind = "homogeneous";   // homogeneous | linear | per-atom
    double g_sqrtN_total = 1.0;                  // g_j = g_sqrtN_total / sqrt(N) (scaled profile)
    double slope = 0.0;                          // linear profile: g_j *= (1 + slope * x_j)
    double w = 1.0;
    std::vector<double> g_per_atom, w_per_atom;  // per-atom kind (single register size)
    std::vector<int> partitions{1};              // m values, contiguous near-even groups
    int photon_number = 1;
    int n_max = 1, n_exc = 1;

    ExactRegister make_register(int n_atoms) const {
        ExactRegister reg;
        reg.atom_count = n_atoms;
        reg.n_max = n_max;
        reg.n_exc = n_exc;
        if (coupling_kind == "per-atom") {
            reg.probe_couplings = g_per_atom;
            reg.control_weights = w_per_atom;
        } else {
            const double base = g_sqrtN_total / std::sqrt(static_cast<double>(n_atoms));
            reg.probe_couplings.resize(n_atoms);
            reg.control_weights.assign(n_atoms, w);
            for (int j = 0; j < n_atoms; ++j) {
                const double x = n_atoms > 1
                                     ? -1.0 + 2.0 * static_cast<double>(j) / (n_atoms - 1)
                                     : 0.0;
                const double scale = coupling_kind == "linear" ? 1.0 + slope * x : 1.0;
                reg.probe_couplings[j] = base * scale;
            }
        }
        reg.validate();
        return reg;
    }

    static std::vector<int> split_sizes(int n_atoms, int m) {
        std::vector<int> sizes(m, n_atoms / m);
        for (int i = 0; i < n_atoms % m; ++i) sizes[i] += 1;
        return sizes;
    }
};

inline OracleRunSpec parse_oracle(const Doc& doc, const json& j, const std::string& path) {
    check_keys(doc, j, path,
               {"atom_count", "atom_grid", "coupling", "partitions", "photon_number", "n_max",
                "n_exc"});
    OracleRunSpec spec;
    if (j.contains("atom_grid")) {
        for (auto v : as_integer_list(j.at("atom_grid"), path + ".atom_grid"))
            spec.atom_grid.push_back(static_cast<int>(v));
    } else {
        spec.atom_grid.push_back(static_cast<int>(
            as_integer(require(doc, j, path, "atom_count"), path + ".atom_count")));
    }
    if (spec.atom_grid.empty()) throw SchemaError(path + ".atom_grid: must be nonempty");

    const json& c = require(doc, j, path, "coupling");
    check_keys(doc, c, path + ".coupling",
               {"kind", "g_sqrtN_total", "slope", "w", "g", "w_per_atom"});
    spec.coupling_kind = as_string(require(doc, c, path + ".coupling", "kind"),
                                   path + ".coupling.kind");
    if (spec.coupling_kind == "per-atom") {
        spec.g_per_atom = as_number_list(require(doc, c, path + ".coupling", "g"),
                                         path + ".coupling.g");
        spec.w_per_atom = as_number_list(require(doc, c, path + ".coupling", "w_per_atom"),
                                         path + ".coupling.w_per_atom");
    } else if (spec.coupling_kind == "homogeneous" || spec.coupling_kind == "linear") {
        if (c.contains("g_sqrtN_total"))
            spec.g_sqrtN_total = as_number(c.at("g_sqrtN_total"), path + ".coupling.g_sqrtN_total");
        if (c.contains("slope")) spec.slope = as_number(c.at("slope"), path + ".coupling.slope");
        if (c.contains("w")) spec.w = as_number(c.at("w"), path + ".coupling.w");
    } else {
        throw SchemaError(path + ".coupling.kind: expected homogeneous | linear | per-atom");
    }

    if (j.contains("partitions")) {
        spec.partitions.clear();
        for (auto v : as_integer_list(j.at("partitions"), path + ".partitions"))
            spec.partitions.push_back(static_cast<int>(v));
        if (spec.partitions.empty()) throw SchemaError(path + ".partitions: must be nonempty");
    }
    if (j.contains("photon_number"))
        spec.photon_number = static_cast<int>(as_integer(j.at("photon_number"),
                                                         path + ".photon_number"));
    if (j.contains("n_max"))
        spec.n_max = static_cast<int>(as_integer(j.at("n_max"), path + ".n_max"));
    if (j.contains("n_exc"))
        spec.n_exc = static_cast<int>(as_integer(j.at("n_exc"), path + ".n_exc"));
    return spec;
}

struct RunConfig {
    std::optional<SystemSpec> system;
    std::optional<ControlSchedule> schedule;
    InputState input = InputState::single_photon();
    std::optional<std::string> sweep_axis;
    std::vector<double> sweep_grid;
    std::optional<OracleRunSpec> oracle;
    std::uint64_t seed = 0;
};

inline RunConfig parse_run_config(const Doc& doc) {
    const json& j = doc.root;
    check_keys(doc, j, "$", {"system", "schedule", "input", "sweep", "oracle", "seed"});
    RunConfig rc;
    if (j.contains("system")) rc.system = parse_system(doc, j.at("system"), "$.system");
    if (j.contains("schedule")) rc.schedule = parse_schedule(doc, j.at("schedule"), "$.schedule");
    if (j.contains("input")) rc.input = parse_input(doc, j.at("input"), "$.input");
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        check_keys(doc, s, "$.sweep", {"axis", "grid"});
        rc.sweep_axis = as_string(require(doc, s, "$.sweep", "axis"), "$.sweep.axis");
        rc.sweep_grid = as_number_list(require(doc, s, "$.sweep", "grid"), "$.sweep.grid");
    }
    if (j.contains("oracle")) rc.oracle = parse_oracle(doc, j.at("oracle"), "$.oracle");
    if (j.contains("seed")) {
        const std::int64_t s = as_integer(j.at("seed"), "$.seed");
        if (s < 0) throw SchemaError("$.seed: must be >= 0");
        rc.seed = static_cast<std::uint64_t>(s);
    }
    return rc;
}

inline RunConfig load_run_config(const std::string& path) {
    return parse_run_config(Doc::parse_file(path));
}

// ---- serialization --------------------------------------------------------

// Numbers are rounded to 12 significant digits for reproducible artifacts.
inline json num12(double x) {
    if (!std::isfinite(x)) return json(fmt12(x));
    return json::parse(fmt12(x));
}

inline json to_json(const std::complex<double>& z) {
    return json::array({num12(z.real()), num12(z.imag())});
}

inline json to_json(const SubEnsembleConfig& c) {
    json j;
    j["atom_counts"] = c.atom_counts;
    j["probe_couplings"] = c.probe_couplings;
    j["control_weights"] = c.control_weights;
    return j;
}

inline SubEnsembleConfig config_from_json(const Doc& doc, const json& j,
                                          const std::string& path) {
    return *parse_system(doc, j, path).explicit_config;
}

inline json to_json(const ControlSchedule& s) {
    json j;
    j["direction"] = to_string(s.direction);
    j["ramp_time"] = s.ramp_time;
    j["peak"] = s.peak;
    j["shape"] = to_string(s.shape);
    j["hold"] = s.hold;
    return j;
}

inline json to_json(const LeakageReport& r) {
    json j;
    j["xi"] = num12(r.xi);
    j["overlap"] = to_json(r.overlap);
    j["m"] = r.m;
    j["total_atoms"] = r.total_atoms;
    j["ramp_time"] = num12(r.ramp_time);
    j["peak"] = num12(r.peak);
    j["input_kind"] = r.input_kind;
    return j;
}

inline json to_json(const StoredRatioReport& r) {
    json rows = json::array();
    for (const RatioEntry& e : r.pairs) {
        json row;
        row["k"] = e.k;
        row["l"] = e.l;
        row["defined"] = e.defined;
        row["measured"] = to_json(e.measured);
        row["dark_mode_prediction"] = num12(e.dark_mode_prediction);
        row["paper_text_prediction"] = num12(e.paper_text_prediction);
        row["rel_dev_dark_mode"] = num12(e.rel_dev_dark);
        row["rel_dev_paper_text"] = num12(e.rel_dev_paper);
        rows.push_back(row);
    }
    return rows;
}

// ---- verify counterexample records ------------------------------------------

inline json to_json(const std::string& suite, const VerifyCase& vc) {
    json j;
    j["suite"] = suite;
    j["system"] = to_json(vc.config);
    j["f"] = vc.f;
    if (vc.schedule) j["schedule"] = to_json(*vc.schedule);
    return j;
}

inline std::pair<std::string, VerifyCase> parse_replay_record(const Doc& doc) {
    const json& j = doc.root;
    check_keys(doc, j, "$", {"suite", "system", "f", "schedule"});
    const std::string suite = as_string(require(doc, j, "$", "suite"), "$.suite");
    VerifyCase vc{SubEnsembleConfig{}, 0.0, std::nullopt};
    vc.config = *parse_system(doc, require(doc, j, "$", "system"), "$.system").explicit_config;
    if (j.contains("f")) vc.f = as_number(j.at("f"), "$.f");
    if (j.contains("schedule")) vc.schedule = parse_schedule(doc, j.at("schedule"), "$.schedule");
    return {suite, vc};
}

}  // namespace io
}  // namespace eitmem
