// casimir: compute sphere-plate Casimir force gradients under competing
// material-response models and classify them against measured data.
//
// Subcommands:
//   theory   compute a gradient curve for a sphere:plate material pair
//   compare  difference series, confidence bands, verdicts against a dataset
//   kcoef    composition-law coefficient k_beta and half-width Xi_beta
//   plot     re-render the difference plot from a saved analysis bundle
//
// Exit codes: 0 ok, 2 configuration error, 3 input-data error, 4 numerical
// non-convergence. Paths that do not exist as given are retried under
// $CASIMIR_DATA_DIR. All outputs are written atomically and byte-identical
// across reruns.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "casimir/casimir.hpp"

namespace fs = std::filesystem;
using namespace casimir;

namespace {

fs::path resolve_input(const std::string& path) {
    fs::path p(path);
    if (fs::exists(p)) return p;
    if (!p.is_absolute()) {
        if (const char* dir = std::getenv("CASIMIR_DATA_DIR")) {
            const fs::path alt = fs::path(dir) / p;
            if (fs::exists(alt)) return alt;
        }
    }
    return p; // let the loader produce its usual error
}

std::vector<double> parse_grid(const std::string& spec) {
    const auto c1 = spec.find(':');
    const auto c2 = spec.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw config_error("--grid expects a0:a1:step, got '" + spec + "'");
    const double a0 = detail::parse_double(spec.substr(0, c1), "--grid start");
    const double a1 = detail::parse_double(spec.substr(c1 + 1, c2 - c1 - 1), "--grid end");
    const double step = detail::parse_double(spec.substr(c2 + 1), "--grid step");
    if (!(a0 > 0.0) || !(a1 >= a0) || !(step > 0.0))
        throw config_error("--grid needs 0 < a0 <= a1 and step > 0");
    std::vector<double> grid;
    for (double a = a0; a <= a1 + 1e-9 * step; a += step) grid.push_back(a);
    return grid;
}

void apply_roughness(TheoryCurve& curve, double factor) {
    if (factor == 1.0) return;
    for (auto& p : curve.points) {
        p.gradient *= factor;
        p.gradient_error *= factor;
    }
}

struct CompareArgs {
    std::string config_path;
    std::string dataset_path;
    std::vector<std::string> approaches;
    std::vector<std::string> externals;
    std::string out_dir = ".";
    std::string bundle_out;
    std::vector<double> beta_override;
    int window_override = 0;
    double roughness_override = 0.0;
    bool fold_override = false;
};

std::string beta_tag(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", beta);
    std::string s(buf);
    for (auto& ch : s)
        if (ch == '.') ch = 'p';
    return s;
}

int run_compare(const CompareArgs& args) {
    RunConfig cfg = load_config(resolve_input(args.config_path));
    if (!args.beta_override.empty()) {
        cfg.beta_grid = args.beta_override;
        std::sort(cfg.beta_grid.begin(), cfg.beta_grid.end());
        for (double b : cfg.beta_grid)
            if (!(b > 0.0 && b < 1.0)) throw config_error("--beta values must be in (0, 1)");
    }
    if (args.window_override > 0) cfg.window = args.window_override;
    if (args.roughness_override > 0.0) cfg.roughness_factor = args.roughness_override;
    if (args.fold_override) cfg.fold_separation_error = true;
    if (args.approaches.empty() && args.externals.empty())
        throw config_error("compare: need at least one --approach or --external");

    const ExperimentDataset dataset = load_dataset(resolve_input(args.dataset_path));
    const std::vector<double> grid = dataset.separations();
    const ThermalState thermal(dataset.temperature_k);
    const Geometry probe(dataset.sphere_radius_um, grid.front());
    if (probe.pfa_strained())
        std::fprintf(stderr,
                     "warning: a/R = %.3g strains the proximity-force approximation\n",
                     grid.front() / (dataset.sphere_radius_um * 1000.0));

    AnalysisBundle bundle;
    bundle.dataset = dataset;
    const TheoryErrorSpec err_spec = resolve_theory_error(cfg, grid);

    for (const auto& name : args.approaches) {
        const Approach& ap = cfg.approach(name);
        TheoryCurve curve =
            theory_curve(cfg.material(ap.sphere), cfg.material(ap.plate),
                         dataset.sphere_radius_um, thermal, grid, cfg.quadrature, err_spec, name);
        apply_roughness(curve, cfg.roughness_factor);
        bundle.curves.push_back(std::move(curve));
    }
    for (const auto& path : args.externals) {
        const TheoryCurve raw = load_theory_curve(resolve_input(path));
        bundle.curves.push_back(align_theory(raw, grid));
    }

    for (const auto& curve : bundle.curves) {
        auto diffs = difference_series(curve, dataset, cfg.fold_separation_error);
        for (double beta : cfg.beta_grid) {
            Verdict v = classify(diffs, beta, cfg.window, curve.label);
            if (v.status == VerdictStatus::excluded)
                std::printf("%-12s beta = %-5g excluded over [%g, %g] nm\n",
                            v.model_label.c_str(), v.beta, v.excluded_min_nm, v.excluded_max_nm);
            else
                std::printf("%-12s beta = %-5g %s\n", v.model_label.c_str(), v.beta,
                            to_string(v.status));
            bundle.verdicts.push_back(std::move(v));
        }
        Verdict agree = agreement_scan(diffs, cfg.beta_grid, cfg.window, curve.label);
        if (agree.agreement_level)
            std::printf("%-12s agreement: not excluded at beta = %g (agreement level %g)\n",
                        agree.model_label.c_str(), agree.beta, *agree.agreement_level);
        else
            std::printf("%-12s agreement: excluded at every level in the beta grid\n",
                        agree.model_label.c_str());
        bundle.verdicts.push_back(std::move(agree));
        bundle.differences.emplace(curve.label, std::move(diffs));
    }

    const fs::path out_dir(args.out_dir);
    fs::create_directories(out_dir);
    for (const auto& curve : bundle.curves) {
        save_theory_curve(curve, out_dir / ("theory_" + curve.label + ".csv"));
        const auto& diffs = bundle.differences.at(curve.label);
        save_differences(diffs, curve.label, out_dir / ("differences_" + curve.label + ".csv"));
        std::vector<ConfidenceBand> bands;
        for (double beta : cfg.beta_grid) {
            bands.push_back(make_band(diffs, beta));
            save_band(bands.back(), out_dir / ("band_" + curve.label + "_beta" +
                                               beta_tag(beta) + ".csv"));
        }
        PlotSpec plot;
        plot.title = dataset.label + ": " + curve.label + " minus experiment";
        detail::atomic_write(out_dir / ("plot_" + curve.label + ".svg"),
                             render_difference_plot(diffs, bands, plot));
    }
    save_bundle(bundle, args.bundle_out.empty() ? out_dir / "report.json"
                                                : fs::path(args.bundle_out));
    return exit_ok;
}

int run_theory(const std::string& config_path, const std::string& pair,
               const std::string& grid_spec, const std::string& grid_from, double radius_um,
               double temperature_k, const std::string& out_path, std::string label) {
    const RunConfig cfg = load_config(resolve_input(config_path));
    const auto colon = pair.find(':');
    if (colon == std::string::npos)
        throw config_error("--pair expects SPHERE:PLATE material names, got '" + pair + "'");
    const Material& sphere = cfg.material(pair.substr(0, colon));
    const Material& plate = cfg.material(pair.substr(colon + 1));

    std::vector<double> grid;
    if (!grid_from.empty()) {
        const ExperimentDataset ds = load_dataset(resolve_input(grid_from));
        grid = ds.separations();
        if (radius_um <= 0.0) radius_um = ds.sphere_radius_um;
        if (temperature_k <= 0.0) temperature_k = ds.temperature_k;
    } else if (!grid_spec.empty()) {
        grid = parse_grid(grid_spec);
    } else {
        throw config_error("theory: need --grid or --grid-from");
    }
    if (radius_um <= 0.0) throw config_error("theory: need --radius-um > 0");
    if (temperature_k <= 0.0) throw config_error("theory: need --temperature-K > 0");

    const ThermalState thermal(temperature_k);
    if (Geometry(radius_um, grid.front()).pfa_strained())
        std::fprintf(stderr,
                     "warning: a/R = %.3g strains the proximity-force approximation\n",
                     grid.front() / (radius_um * 1000.0));
    if (label.empty()) label = pair;
    TheoryCurve curve = theory_curve(sphere, plate, radius_um, thermal, grid, cfg.quadrature,
                                     resolve_theory_error(cfg, grid), label);
    apply_roughness(curve, cfg.roughness_factor);
    save_theory_curve(curve, out_path);
    std::printf("wrote %s (%zu points)\n", out_path.c_str(), curve.points.size());
    return exit_ok;
}

int run_kcoef(double beta, double d1, double d2) {
    const double k = k_coefficient(beta, d1, d2);
    const DifferencePoint p{0.0, 0.0, d1, d2};
    std::printf("k_beta = %.6f\n", k);
    std::printf("xi_beta = %.6f\n", half_width(p, beta));
    return exit_ok;
}

int run_plot(const std::string& bundle_path, const std::string& model,
             std::vector<double> betas, const std::string& out_path) {
    const AnalysisBundle bundle = load_bundle(resolve_input(bundle_path));
    const auto it = bundle.differences.find(model);
    if (it == bundle.differences.end())
        throw input_error("bundle has no model '" + model + "'");
    if (betas.empty()) {
        for (const auto& v : bundle.verdicts)
            if (v.model_label == model && !v.agreement_level) betas.push_back(v.beta);
    }
    if (betas.empty()) throw input_error("no beta levels stored for model '" + model + "'");
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
    std::vector<ConfidenceBand> bands;
    for (double beta : betas) bands.push_back(make_band(it->second, beta));
    PlotSpec spec;
    spec.title = bundle.dataset.label + ": " + model + " minus experiment";
    detail::atomic_write(out_path, render_difference_plot(it->second, bands, spec));
    std::printf("wrote %s\n", out_path.c_str());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sphere-plate Casimir force gradients and model classification"};
    app.require_subcommand(1);

    // theory
    auto* theory = app.add_subcommand("theory", "compute a force-gradient curve");
    std::string t_config, t_pair, t_grid, t_grid_from, t_out = "theory.csv", t_label;
    double t_radius = 0.0, t_temperature = 0.0;
    theory->add_option("--config", t_config, "run configuration file")->required();
    theory->add_option("--pair", t_pair, "SPHERE:PLATE material names")->required();
    theory->add_option("--grid", t_grid, "separation grid a0:a1:step in nm");
    theory->add_option("--grid-from", t_grid_from, "copy grid (and R, T) from a dataset CSV");
    theory->add_option("--radius-um", t_radius, "sphere radius in um");
    theory->add_option("--temperature-K", t_temperature, "temperature in K");
    theory->add_option("--out", t_out, "output CSV path");
    theory->add_option("--label", t_label, "curve label (default: the pair)");

    // compare
    auto* compare = app.add_subcommand("compare", "classify models against a dataset");
    CompareArgs c;
    compare->add_option("--config", c.config_path, "run configuration file")->required();
    compare->add_option("--dataset", c.dataset_path, "measured dataset CSV")->required();
    compare->add_option("--approach", c.approaches, "approach name from the config (repeatable)");
    compare->add_option("--external", c.externals, "external theory curve CSV (repeatable)");
    compare->add_option("--out-dir", c.out_dir, "output directory");
    compare->add_option("--bundle", c.bundle_out, "bundle path (default OUT_DIR/report.json)");
    compare->add_option("--beta", c.beta_override, "confidence levels (overrides config)");
    compare->add_option("--window", c.window_override, "sliding-window width (overrides config)");
    compare->add_option("--roughness-factor", c.roughness_override,
                        "multiplies computed theory gradients (overrides config)");
    compare->add_flag("--fold-separation-error", c.fold_override,
                      "fold separation errors into the experimental error");

    // kcoef
    auto* kcoef = app.add_subcommand("kcoef", "composition-law coefficient and half-width");
    double k_beta = 0.0, k_d1 = 0.0, k_d2 = 0.0;
    kcoef->add_option("beta", k_beta, "confidence level in (0, 1)")->required();
    kcoef->add_option("delta1", k_d1, "theory error half-width")->required();
    kcoef->add_option("delta2", k_d2, "experiment error half-width")->required();

    // plot
    auto* plot = app.add_subcommand("plot", "render a difference plot from a bundle");
    std::string p_bundle, p_model, p_out = "plot.svg";
    std::vector<double> p_betas;
    plot->add_option("--bundle", p_bundle, "analysis bundle JSON")->required();
    plot->add_option("--model", p_model, "model label inside the bundle")->required();
    plot->add_option("--beta", p_betas, "band levels (default: all stored)");
    plot->add_option("--out", p_out, "output SVG path");

    try {
        app.parse(argc, argv);
        if (*theory)
            return run_theory(t_config, t_pair, t_grid, t_grid_from, t_radius, t_temperature,
                              t_out, t_label);
        if (*compare) return run_compare(c);
        if (*kcoef) return run_kcoef(k_beta, k_d1, k_d2);
        if (*plot) return run_plot(p_bundle, p_model, p_betas, p_out);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config_error;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config_error;
    } catch (const input_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return exit_input_error;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return exit_numerical_error;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config_error;
    }
    return exit_ok;
}
