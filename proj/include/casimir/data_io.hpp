#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "casimir/errors.hpp"
#include "casimir/interpolation.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/statistics.hpp"

namespace casimir {

// File formats (all CSV values comma-separated, '#' lines carry metadata):
//   dataset:      # label=.. / # R_um=.. / # T_K=..   a_nm,grad_uN_per_m,da_nm,dgrad_uN_per_m
//   theory curve: # label=.. [# interpolated=1]        a_nm,grad_uN_per_m,err_uN_per_m
//   band:         # beta=..                            a_nm,xi_uN_per_m
//   differences:  # model=..                           a_nm,diff_uN_per_m,theory_err_uN_per_m,expt_err_uN_per_m
//   oscillators:                                       g_eV2,omega_eV,gamma_eV
//   optical data:                                      omega_eV,n1,n2
// Analysis bundles are JSON with an explicit schema_version.

struct DataPoint {
    double separation_nm;
    double gradient;            // uN/m
    double separation_error_nm; // >= 0
    double gradient_error;      // uN/m, >= 0
};

struct ExperimentDataset {
    std::string label;
    double sphere_radius_um = 0.0;
    double temperature_k = 0.0;
    std::vector<DataPoint> points;

    std::vector<double> separations() const {
        std::vector<double> g;
        g.reserve(points.size());
        for (const auto& p : points) g.push_back(p.separation_nm);
        return g;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw input_error(where + ": cannot parse number from '" + s + "'");
    }
}

struct CsvReader {
    std::string path;
    std::vector<std::pair<std::string, std::string>> metadata; // '#' key=value lines
    std::vector<std::pair<int, std::vector<std::string>>> rows; // line number + fields
    std::vector<std::string> header;

    CsvReader(const std::filesystem::path& file, const std::vector<std::string>& expected_header)
        : path(file.string()) {
        std::ifstream in(file);
        if (!in) throw input_error(path + ": cannot open file");
        std::string line;
        int lineno = 0;
        bool have_header = false;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty()) continue;
            if (t[0] == '#') {
                const auto eq = t.find('=');
                if (eq != std::string::npos)
                    metadata.emplace_back(trim(t.substr(1, eq - 1)), trim(t.substr(eq + 1)));
                continue;
            }
            if (!have_header) {
                header = split_csv(t);
                if (header != expected_header) {
                    std::string want;
                    for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
                    throw input_error(path + ":" + std::to_string(lineno) +
                                      ": unexpected header (expected '" + want + "')");
                }
                have_header = true;
                continue;
            }
            auto fields = split_csv(t);
            if (fields.size() != expected_header.size())
                throw input_error(path + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(expected_header.size()) + " columns, got " +
                                  std::to_string(fields.size()));
            rows.emplace_back(lineno, std::move(fields));
        }
        if (!have_header) throw input_error(path + ": missing header line");
    }

    std::optional<std::string> meta(const std::string& key) const {
        for (const auto& [k, v] : metadata)
            if (k == key) return v;
        return std::nullopt;
    }

    double num(std::size_t row, std::size_t col) const {
        return parse_double(rows[row].second[col], where(row, col));
    }

    std::string where(std::size_t row, std::size_t col) const {
        return path + ":" + std::to_string(rows[row].first) + ": column " + header[col];
    }
};

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw input_error(tmp.string() + ": cannot open for writing");
        out << content;
        if (!out) throw input_error(tmp.string() + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

// Shortest decimal text that parses back to the identical double, so files
// written and re-read by this library carry bit-exact values.
inline std::string fmt(double v) {
    char buf[40];
    for (int prec = 9; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace detail

inline ExperimentDataset load_dataset(const std::filesystem::path& file) {
    detail::CsvReader csv(file, {"a_nm", "grad_uN_per_m", "da_nm", "dgrad_uN_per_m"});
    ExperimentDataset ds;
    ds.label = csv.meta("label").value_or(file.stem().string());
    const auto r = csv.meta("R_um"), t = csv.meta("T_K");
    if (!r) throw input_error(csv.path + ": missing '# R_um =' metadata");
    if (!t) throw input_error(csv.path + ": missing '# T_K =' metadata");
    ds.sphere_radius_um = detail::parse_double(*r, csv.path + ": R_um");
    ds.temperature_k = detail::parse_double(*t, csv.path + ": T_K");
    if (!(ds.sphere_radius_um > 0.0)) throw input_error(csv.path + ": R_um must be > 0");
    if (!(ds.temperature_k > 0.0)) throw input_error(csv.path + ": T_K must be > 0");
    if (csv.rows.empty()) throw input_error(csv.path + ": no data rows");

    ds.points.reserve(csv.rows.size());
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        DataPoint p{csv.num(i, 0), csv.num(i, 1), csv.num(i, 2), csv.num(i, 3)};
        if (!(p.separation_nm > 0.0)) throw input_error(csv.where(i, 0) + ": must be > 0");
        if (!(p.gradient > 0.0)) throw input_error(csv.where(i, 1) + ": must be > 0");
        if (!(p.separation_error_nm >= 0.0))
            throw input_error(csv.where(i, 2) + ": negative error");
        if (!(p.gradient_error >= 0.0)) throw input_error(csv.where(i, 3) + ": negative error");
        if (!ds.points.empty() && !(p.separation_nm > ds.points.back().separation_nm))
            throw input_error(csv.where(i, 0) + ": separations must increase strictly");
        ds.points.push_back(p);
    }
    return ds;
}

inline void save_dataset(const ExperimentDataset& ds, const std::filesystem::path& file) {
    std::string out;
    out += "# label = " + ds.label + "\n";
    out += "# R_um = " + detail::fmt(ds.sphere_radius_um) + "\n";
    out += "# T_K = " + detail::fmt(ds.temperature_k) + "\n";
    out += "a_nm,grad_uN_per_m,da_nm,dgrad_uN_per_m\n";
    for (const auto& p : ds.points)
        out += detail::fmt(p.separation_nm) + "," + detail::fmt(p.gradient) + "," +
               detail::fmt(p.separation_error_nm) + "," + detail::fmt(p.gradient_error) + "\n";
    detail::atomic_write(file, out);
}

inline TheoryCurve load_theory_curve(const std::filesystem::path& file) {
    detail::CsvReader csv(file, {"a_nm", "grad_uN_per_m", "err_uN_per_m"});
    TheoryCurve c;
    c.label = csv.meta("label").value_or(file.stem().string());
    c.interpolated = csv.meta("interpolated").value_or("0") == "1";
    if (csv.rows.empty()) throw input_error(csv.path + ": no data rows");
    c.points.reserve(csv.rows.size());
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        TheoryPoint p{csv.num(i, 0), csv.num(i, 1), csv.num(i, 2)};
        if (!(p.separation_nm > 0.0)) throw input_error(csv.where(i, 0) + ": must be > 0");
        if (!(p.gradient_error >= 0.0)) throw input_error(csv.where(i, 2) + ": negative error");
        if (!c.points.empty() && !(p.separation_nm > c.points.back().separation_nm))
            throw input_error(csv.where(i, 0) + ": separations must increase strictly");
        c.points.push_back(p);
    }
    return c;
}

inline void save_theory_curve(const TheoryCurve& c, const std::filesystem::path& file) {
    std::string out;
    out += "# label = " + c.label + "\n";
    if (c.interpolated) out += "# interpolated = 1\n";
    out += "a_nm,grad_uN_per_m,err_uN_per_m\n";
    for (const auto& p : c.points)
        out += detail::fmt(p.separation_nm) + "," + detail::fmt(p.gradient) + "," +
               detail::fmt(p.gradient_error) + "\n";
    detail::atomic_write(file, out);
}

// Align an externally supplied theory curve with a dataset grid: pass through
// when the grids already agree (to 1e-6 nm), otherwise resample gradient and
// error monotonically. The curve must cover the full grid.
inline TheoryCurve align_theory(const TheoryCurve& curve, const std::vector<double>& grid_nm) {
    if (grid_nm.empty()) throw std::domain_error("align_theory: empty grid");
    if (curve.points.size() == grid_nm.size()) {
        bool same = true;
        for (std::size_t i = 0; i < grid_nm.size(); ++i)
            if (std::abs(curve.points[i].separation_nm - grid_nm[i]) > 1e-6) {
                same = false;
                break;
            }
        if (same) return curve;
    }
    if (curve.points.size() < 2)
        throw input_error("theory curve '" + curve.label + "': too few points to resample");
    const double lo = curve.points.front().separation_nm;
    const double hi = curve.points.back().separation_nm;
    if (grid_nm.front() < lo - 1e-6 || grid_nm.back() > hi + 1e-6)
        throw input_error("theory curve '" + curve.label + "' covers [" + detail::fmt(lo) + ", " +
                          detail::fmt(hi) + "] nm but the dataset needs [" +
                          detail::fmt(grid_nm.front()) + ", " + detail::fmt(grid_nm.back()) + "]");

    std::vector<double> x, g, e;
    x.reserve(curve.points.size());
    for (const auto& p : curve.points) {
        x.push_back(p.separation_nm);
        g.push_back(p.gradient);
        e.push_back(p.gradient_error);
    }
    const PchipInterpolant ig(x, g), ie(x, e);
    TheoryCurve out;
    out.label = curve.label;
    out.interpolated = true;
    out.points.reserve(grid_nm.size());
    for (double a : grid_nm) {
        const double ac = std::min(std::max(a, lo), hi); // grids agree to 1e-6 at the ends
        out.points.push_back({a, ig(ac), std::max(0.0, ie(ac))});
    }
    return out;
}

// Differences d_i = F'_theor - F'_expt on the shared grid. With
// fold_separation_error the separation uncertainty is folded into the
// experimental error via the local theory slope.
inline std::vector<DifferencePoint> difference_series(const TheoryCurve& theory,
                                                      const ExperimentDataset& dataset,
                                                      bool fold_separation_error = false) {
    if (theory.points.size() != dataset.points.size())
        throw input_error("difference_series: theory has " +
                          std::to_string(theory.points.size()) + " points, dataset '" +
                          dataset.label + "' has " + std::to_string(dataset.points.size()));
    const std::size_t n = dataset.points.size();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(theory.points[i].separation_nm - dataset.points[i].separation_nm) > 1e-6)
            throw input_error("difference_series: grids disagree at index " + std::to_string(i) +
                              " (" + detail::fmt(theory.points[i].separation_nm) + " vs " +
                              detail::fmt(dataset.points[i].separation_nm) + " nm)");

    std::vector<DifferencePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = theory.points[i];
        const auto& d = dataset.points[i];
        double expt_err = d.gradient_error;
        if (fold_separation_error && n >= 2) {
            const std::size_t i0 = i == 0 ? 0 : i - 1;
            const std::size_t i1 = i + 1 == n ? i : i + 1;
            const double slope = (theory.points[i1].gradient - theory.points[i0].gradient) /
                                 (theory.points[i1].separation_nm - theory.points[i0].separation_nm);
            expt_err = std::hypot(expt_err, slope * d.separation_error_nm);
        }
        out.push_back({d.separation_nm, t.gradient - d.gradient, t.gradient_error, expt_err});
    }
    return out;
}

inline void save_band(const ConfidenceBand& band, const std::filesystem::path& file) {
    std::string out;
    out += "# beta = " + detail::fmt(band.beta) + "\n";
    out += "a_nm,xi_uN_per_m\n";
    for (std::size_t i = 0; i < band.xi.size(); ++i)
        out += detail::fmt(band.separation_nm[i]) + "," + detail::fmt(band.xi[i]) + "\n";
    detail::atomic_write(file, out);
}

inline void save_differences(const std::vector<DifferencePoint>& points, const std::string& model,
                             const std::filesystem::path& file) {
    std::string out;
    out += "# model = " + model + "\n";
    out += "a_nm,diff_uN_per_m,theory_err_uN_per_m,expt_err_uN_per_m\n";
    for (const auto& p : points)
        out += detail::fmt(p.separation_nm) + "," + detail::fmt(p.difference) + "," +
               detail::fmt(p.theory_error) + "," + detail::fmt(p.experiment_error) + "\n";
    detail::atomic_write(file, out);
}

inline std::vector<Oscillator> load_oscillators(const std::filesystem::path& file) {
    detail::CsvReader csv(file, {"g_eV2", "omega_eV", "gamma_eV"});
    std::vector<Oscillator> out;
    out.reserve(csv.rows.size());
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        try {
            out.emplace_back(csv.num(i, 0), csv.num(i, 1), csv.num(i, 2));
        } catch (const std::domain_error& e) {
            throw input_error(csv.where(i, 0) + ": " + e.what());
        }
    }
    return out;
}

inline OpticalTable load_optical_table(const std::filesystem::path& file,
                                       Extrapolation extrapolation = {}) {
    detail::CsvReader csv(file, {"omega_eV", "n1", "n2"});
    std::vector<TableRow> rows;
    rows.reserve(csv.rows.size());
    for (std::size_t i = 0; i < csv.rows.size(); ++i)
        rows.push_back({csv.num(i, 0), csv.num(i, 1), csv.num(i, 2)});
    try {
        return OpticalTable(std::move(rows), extrapolation);
    } catch (const input_error& e) {
        throw input_error(csv.path + ": " + e.what());
    }
}

// ---- analysis bundle (JSON) -------------------------------------------------

inline constexpr int bundle_schema_version = 1;

struct AnalysisBundle {
    ExperimentDataset dataset;
    std::vector<TheoryCurve> curves;
    std::map<std::string, std::vector<DifferencePoint>> differences; // by model label
    std::vector<Verdict> verdicts;
};

namespace detail {

inline nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j{{"model", v.model_label},
                     {"beta", v.beta},
                     {"window", v.window},
                     {"status", std::string(to_string(v.status))},
                     {"window_fraction", v.window_fraction}};
    if (v.status == VerdictStatus::excluded)
        j["excluded_range_nm"] = {v.excluded_min_nm, v.excluded_max_nm};
    if (v.agreement_level) j["agreement_level"] = *v.agreement_level;
    return j;
}

inline Verdict verdict_from_json(const nlohmann::json& j) {
    Verdict v;
    v.model_label = j.at("model").get<std::string>();
    v.beta = j.at("beta").get<double>();
    v.window = j.at("window").get<int>();
    const std::string s = j.at("status").get<std::string>();
    if (s == "consistent") v.status = VerdictStatus::consistent;
    else if (s == "excluded") v.status = VerdictStatus::excluded;
    else if (s == "not_excluded") v.status = VerdictStatus::not_excluded;
    else throw input_error("bundle: unknown verdict status '" + s + "'");
    v.window_fraction = j.at("window_fraction").get<std::vector<double>>();
    if (j.contains("excluded_range_nm")) {
        v.excluded_min_nm = j["excluded_range_nm"].at(0).get<double>();
        v.excluded_max_nm = j["excluded_range_nm"].at(1).get<double>();
    }
    if (j.contains("agreement_level")) v.agreement_level = j["agreement_level"].get<double>();
    return v;
}

} // namespace detail

inline void save_bundle(const AnalysisBundle& b, const std::filesystem::path& file) {
    nlohmann::json j;
    j["schema_version"] = bundle_schema_version;
    j["dataset"] = {{"label", b.dataset.label},
                    {"R_um", b.dataset.sphere_radius_um},
                    {"T_K", b.dataset.temperature_k}};
    auto& pts = j["dataset"]["points"] = nlohmann::json::array();
    for (const auto& p : b.dataset.points)
        pts.push_back({p.separation_nm, p.gradient, p.separation_error_nm, p.gradient_error});

    auto& curves = j["curves"] = nlohmann::json::array();
    for (const auto& c : b.curves) {
        nlohmann::json jc{{"label", c.label}, {"interpolated", c.interpolated}};
        auto& cp = jc["points"] = nlohmann::json::array();
        for (const auto& p : c.points)
            cp.push_back({p.separation_nm, p.gradient, p.gradient_error});
        curves.push_back(std::move(jc));
    }

    auto& diffs = j["differences"] = nlohmann::json::object();
    for (const auto& [label, series] : b.differences) {
        auto& arr = diffs[label] = nlohmann::json::array();
        for (const auto& p : series)
            arr.push_back({p.separation_nm, p.difference, p.theory_error, p.experiment_error});
    }

    auto& verdicts = j["verdicts"] = nlohmann::json::array();
    for (const auto& v : b.verdicts) verdicts.push_back(detail::to_json(v));

    detail::atomic_write(file, j.dump(2) + "\n");
}

inline AnalysisBundle load_bundle(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw input_error(file.string() + ": cannot open file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(file.string() + ": malformed JSON: " + e.what());
    }
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != bundle_schema_version)
            throw input_error(file.string() + ": schema_version " + std::to_string(version) +
                              " unsupported (expected " + std::to_string(bundle_schema_version) +
                              ")");
        AnalysisBundle b;
        b.dataset.label = j.at("dataset").at("label").get<std::string>();
        b.dataset.sphere_radius_um = j.at("dataset").at("R_um").get<double>();
        b.dataset.temperature_k = j.at("dataset").at("T_K").get<double>();
        for (const auto& p : j.at("dataset").at("points"))
            b.dataset.points.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                        p.at(2).get<double>(), p.at(3).get<double>()});
        for (const auto& jc : j.at("curves")) {
            TheoryCurve c;
            c.label = jc.at("label").get<std::string>();
            c.interpolated = jc.at("interpolated").get<bool>();
            for (const auto& p : jc.at("points"))
                c.points.push_back(
                    {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
            b.curves.push_back(std::move(c));
        }
        for (const auto& [label, arr] : j.at("differences").items())
            for (const auto& p : arr)
                b.differences[label].push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                                p.at(2).get<double>(), p.at(3).get<double>()});
        for (const auto& jv : j.at("verdicts")) b.verdicts.push_back(detail::verdict_from_json(jv));
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw input_error(file.string() + ": bundle structure invalid: " + e.what());
    }
}

} // namespace casimir
