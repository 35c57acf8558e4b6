#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "casimir/data_io.hpp"
#include "casimir/errors.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/response.hpp"

namespace casimir {

// Run configuration, INI-style:
//
//   [quadrature]
//   k_nodes = 24
//   matsubara_cutoff = 30
//   rel_tolerance = 1e-8
//
//   [analysis]
//   window = 10
//   beta_grid = 0.05, 0.10, 0.20, 0.33, 0.67, 0.95
//   fold_separation_error = false
//   roughness_factor = 1.0
//   theory_error_percent = 0.5        (or theory_error_file = errs.csv)
//
//   [material.NAME]
//   type = drude | plasma | generalized-plasma | table
//   wp_eV = ..., gamma_eV = ..., mu0 = ...
//   oscillator_file = ... (generalized-plasma)
//   file = ..., extrapolation = none | drude | plasma (table)
//
//   [approach.NAME]
//   sphere = MATERIAL
//   plate = MATERIAL
//
// Relative file paths resolve against the config file's directory. Unknown
// sections or keys are configuration errors.

struct Approach {
    std::string sphere;
    std::string plate;
};

struct RunConfig {
    QuadratureConfig quadrature;
    int window = 10;
    std::vector<double> beta_grid{0.05, 0.10, 0.20, 0.33, 0.67, 0.95};
    bool fold_separation_error = false;
    double roughness_factor = 1.0; // multiplies computed theory gradients
    std::optional<double> theory_error_percent;
    std::optional<std::string> theory_error_file; // resolved path
    std::map<std::string, Material> materials;
    std::map<std::string, Approach> approaches;

    const Material& material(const std::string& name) const {
        const auto it = materials.find(name);
        if (it == materials.end()) throw config_error("unknown material '" + name + "'");
        return it->second;
    }

    const Approach& approach(const std::string& name) const {
        const auto it = approaches.find(name);
        if (it == approaches.end()) throw config_error("unknown approach '" + name + "'");
        return it->second;
    }
};

namespace detail {

struct IniSection {
    std::string name;
    int lineno = 0;
    std::map<std::string, std::pair<std::string, int>> entries; // key -> (value, line)
};

inline std::vector<IniSection> parse_ini(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw config_error(file.string() + ": cannot open config file");
    std::vector<IniSection> sections;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error(file.string() + ":" + std::to_string(lineno) +
                                   ": malformed section header");
            sections.push_back({trim(t.substr(1, t.size() - 2)), lineno, {}});
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error(file.string() + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
        if (sections.empty())
            throw config_error(file.string() + ":" + std::to_string(lineno) +
                               ": key outside any section");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (!sections.back().entries.emplace(key, std::pair{val, lineno}).second)
            throw config_error(file.string() + ":" + std::to_string(lineno) + ": duplicate key '" +
                               key + "'");
    }
    return sections;
}

struct SectionView {
    const std::filesystem::path& file;
    const IniSection& section;
    mutable std::set<std::string> used;

    std::string where(const std::string& key) const {
        const auto it = section.entries.find(key);
        const int ln = it == section.entries.end() ? section.lineno : it->second.second;
        return file.string() + ":" + std::to_string(ln) + ": [" + section.name + "] " + key;
    }

    std::optional<std::string> get(const std::string& key) const {
        used.insert(key);
        const auto it = section.entries.find(key);
        if (it == section.entries.end()) return std::nullopt;
        return it->second.first;
    }

    std::string require(const std::string& key) const {
        auto v = get(key);
        if (!v) throw config_error(where(key) + " is required");
        return *v;
    }

    double number(const std::string& key) const {
        const std::string v = require(key);
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing characters");
            return d;
        } catch (const std::exception&) {
            throw config_error(where(key) + ": cannot parse number from '" + v + "'");
        }
    }

    void reject_unknown() const {
        for (const auto& [key, value] : section.entries)
            if (!used.count(key))
                throw config_error(file.string() + ":" + std::to_string(value.second) +
                                   ": unknown key '" + key + "' in [" + section.name + "]");
    }
};

inline bool parse_bool(const SectionView& sec, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw config_error(sec.where(key) + ": expected a boolean, got '" + v + "'");
}

inline Material parse_material(const SectionView& sec, const std::string& name,
                               const std::filesystem::path& base_dir) {
    const std::string type = sec.require("type");
    MagneticResponse magnetic;
    if (const auto mu0 = sec.get("mu0")) {
        try {
            magnetic = MagneticResponse(parse_double(*mu0, sec.where("mu0")));
        } catch (const std::domain_error& e) {
            throw config_error(sec.where("mu0") + ": " + e.what());
        }
    }
    auto resolve = [&](const std::string& rel) {
        const std::filesystem::path p(rel);
        return p.is_absolute() ? p : base_dir / p;
    };
    try {
        if (type == "drude")
            return Material(name, DrudeModel(sec.number("wp_eV"), sec.number("gamma_eV")),
                            magnetic);
        if (type == "plasma") return Material(name, PlasmaModel(sec.number("wp_eV")), magnetic);
        if (type == "generalized-plasma") {
            std::vector<Oscillator> osc;
            if (const auto f = sec.get("oscillator_file"))
                osc = load_oscillators(resolve(*f));
            return Material(name, GeneralizedPlasmaModel(sec.number("wp_eV"), std::move(osc)),
                            magnetic);
        }
        if (type == "table") {
            const std::string extr = sec.get("extrapolation").value_or("none");
            Extrapolation e;
            if (extr == "drude")
                e = DrudeExtrapolation{sec.number("wp_eV"), sec.number("gamma_eV")};
            else if (extr == "plasma")
                e = PlasmaExtrapolation{sec.number("wp_eV")};
            else if (extr != "none")
                throw config_error(sec.where("extrapolation") + ": unknown mode '" + extr + "'");
            return Material(name, load_optical_table(resolve(sec.require("file")), e), magnetic);
        }
    } catch (const std::domain_error& e) {
        throw config_error("material '" + name + "': " + e.what());
    }
    throw config_error(sec.where("type") + ": unknown material type '" + type + "'");
}

} // namespace detail

// Materialize the configured theory-error specification for a separation
// grid: a per-point file overrides a constant percentage. (The file's err
// column is read; its grad column is ignored.)
inline TheoryErrorSpec resolve_theory_error(const RunConfig& cfg,
                                            const std::vector<double>& grid_nm) {
    if (cfg.theory_error_file) {
        const TheoryCurve aligned = align_theory(load_theory_curve(*cfg.theory_error_file),
                                                 grid_nm);
        std::vector<double> per_point;
        per_point.reserve(aligned.points.size());
        for (const auto& p : aligned.points) per_point.push_back(p.gradient_error);
        return per_point;
    }
    if (cfg.theory_error_percent) return *cfg.theory_error_percent;
    return {};
}

inline RunConfig load_config(const std::filesystem::path& file) {
    const auto sections = detail::parse_ini(file);
    const std::filesystem::path base_dir = file.has_parent_path()
                                               ? file.parent_path()
                                               : std::filesystem::path(".");
    RunConfig cfg;
    for (const auto& raw : sections) {
        detail::SectionView sec{file, raw, {}};
        if (raw.name == "quadrature") {
            if (sec.get("k_nodes")) cfg.quadrature.k_nodes = static_cast<int>(sec.number("k_nodes"));
            if (sec.get("matsubara_cutoff"))
                cfg.quadrature.matsubara_cutoff = sec.number("matsubara_cutoff");
            if (sec.get("rel_tolerance")) cfg.quadrature.rel_tolerance = sec.number("rel_tolerance");
            sec.reject_unknown();
            cfg.quadrature.validate();
        } else if (raw.name == "analysis") {
            if (sec.get("window")) cfg.window = static_cast<int>(sec.number("window"));
            if (const auto grid = sec.get("beta_grid")) {
                cfg.beta_grid.clear();
                for (const auto& f : detail::split_csv(*grid)) {
                    if (f.empty())
                        throw config_error(sec.where("beta_grid") + ": empty entry");
                    cfg.beta_grid.push_back(detail::parse_double(f, sec.where("beta_grid")));
                }
            }
            if (const auto b = sec.get("fold_separation_error"))
                cfg.fold_separation_error = detail::parse_bool(sec, "fold_separation_error", *b);
            if (sec.get("roughness_factor")) cfg.roughness_factor = sec.number("roughness_factor");
            if (sec.get("theory_error_percent"))
                cfg.theory_error_percent = sec.number("theory_error_percent");
            if (const auto f = sec.get("theory_error_file")) {
                const std::filesystem::path p(*f);
                cfg.theory_error_file = (p.is_absolute() ? p : base_dir / p).string();
            }
            sec.reject_unknown();
        } else if (raw.name.rfind("material.", 0) == 0) {
            const std::string name = raw.name.substr(9);
            if (name.empty()) throw config_error(file.string() + ": empty material name");
            cfg.materials.insert_or_assign(name, detail::parse_material(sec, name, base_dir));
            sec.reject_unknown();
        } else if (raw.name.rfind("approach.", 0) == 0) {
            const std::string name = raw.name.substr(9);
            if (name.empty()) throw config_error(file.string() + ": empty approach name");
            cfg.approaches.insert_or_assign(name, Approach{sec.require("sphere"),
                                                           sec.require("plate")});
            sec.reject_unknown();
        } else {
            throw config_error(file.string() + ":" + std::to_string(raw.lineno) +
                               ": unknown section [" + raw.name + "]");
        }
    }

    if (cfg.window < 3) throw config_error(file.string() + ": [analysis] window must be >= 3");
    if (cfg.beta_grid.empty())
        throw config_error(file.string() + ": [analysis] beta_grid must not be empty");
    for (std::size_t i = 0; i < cfg.beta_grid.size(); ++i) {
        if (!(cfg.beta_grid[i] > 0.0 && cfg.beta_grid[i] < 1.0))
            throw config_error(file.string() + ": [analysis] beta_grid values must be in (0, 1)");
        if (i > 0 && !(cfg.beta_grid[i] > cfg.beta_grid[i - 1]))
            throw config_error(file.string() + ": [analysis] beta_grid must increase strictly");
    }
    if (!(cfg.roughness_factor > 0.0))
        throw config_error(file.string() + ": roughness_factor must be > 0");
    if (cfg.theory_error_percent && cfg.theory_error_file)
        throw config_error(file.string() +
                           ": theory_error_percent and theory_error_file are mutually exclusive");
    if (cfg.theory_error_percent && !(*cfg.theory_error_percent >= 0.0))
        throw config_error(file.string() + ": theory_error_percent must be >= 0");
    for (const auto& [name, ap] : cfg.approaches) {
        if (!cfg.materials.count(ap.sphere))
            throw config_error(file.string() + ": approach '" + name + "' uses unknown sphere '" +
                               ap.sphere + "'");
        if (!cfg.materials.count(ap.plate))
            throw config_error(file.string() + ": approach '" + name + "' uses unknown plate '" +
                               ap.plate + "'");
    }
    return cfg;
}

} // namespace casimir
