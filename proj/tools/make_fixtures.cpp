// Regenerates the synthetic fixtures committed under data/ and verifies that
// they carry the verdict patterns the test suite asserts. The committed files
// are canonical; this tool records how each was made and lets them be rebuilt.
//
// Every dataset is a reconstruction: measured gradients are synthesized from
// this library's own theory curves (or an analytic stand-in for the external-
// theory case) plus seeded uniform scatter sized against the stated errors.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "casimir/casimir.hpp"

namespace fs = std::filesystem;
using namespace casimir;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("  %-58s %s\n", what.c_str(), ok ? "ok" : "NOT MET");
    if (!ok) ++failures;
}

// Portable uniform draws: 53-bit mantissa from mt19937_64, independent of any
// standard-library distribution implementation.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

std::vector<double> make_grid(double a0, double a1, double step) {
    std::vector<double> g;
    for (double a = a0; a <= a1 + 1e-9; a += step) g.push_back(a);
    return g;
}

void write_text(const fs::path& path, const std::string& text) {
    detail::atomic_write(path, text);
    std::printf("wrote %s\n", path.string().c_str());
}

ExperimentDataset make_dataset(const std::string& label, double r_um, double t_k,
                               const std::vector<double>& grid,
                               const std::vector<double>& data, double da_nm, double dgrad) {
    ExperimentDataset ds;
    ds.label = label;
    ds.sphere_radius_um = r_um;
    ds.temperature_k = t_k;
    for (std::size_t i = 0; i < grid.size(); ++i)
        ds.points.push_back({grid[i], data[i], da_nm, dgrad});
    return ds;
}

TheoryCurve error_curve(const TheoryCurve& base, double err) {
    TheoryCurve c = base;
    c.label = base.label + "-err";
    for (auto& p : c.points) p.gradient_error = err;
    return c;
}

// Ni-Ni: measured data synthesized from the plasma curve; errors sized so the
// 95% band equals the drude-plasma gap near 345 nm. Drude then fails at short
// separations only, plasma stays inside the 10% band.
void make_nini(const fs::path& dir) {
    std::printf("nini fixture\n");
    const double r_um = 61.71, t_k = 300.0, delta = 0.77, noise = 0.154;
    const auto grid = make_grid(223.0, 550.0, 3.0);
    const ThermalState thermal(t_k);
    const Material ni_d("ni-drude", DrudeModel(4.89, 0.0436), MagneticResponse(110.0));
    const Material ni_p("ni-plasma", PlasmaModel(4.89), MagneticResponse(110.0));
    const TheoryCurve plasma = theory_curve(ni_p, ni_p, r_um, thermal, grid, {}, {}, "plasma");
    const TheoryCurve drude = theory_curve(ni_d, ni_d, r_um, thermal, grid, {}, {}, "drude");

    Rng rng(7);
    std::vector<double> data;
    for (const auto& p : plasma.points) data.push_back(p.gradient + rng.uniform(-noise, noise));
    const ExperimentDataset ds = make_dataset("nini", r_um, t_k, grid, data, 0.6, delta);
    save_dataset(ds, dir / "nini.csv");
    save_theory_curve(error_curve(plasma, delta), dir / "nini_theory_err.csv");

    TheoryCurve pe = plasma, de = drude;
    for (auto& p : pe.points) p.gradient_error = delta;
    for (auto& p : de.points) p.gradient_error = delta;
    const auto dd = difference_series(de, ds);
    const auto dp = difference_series(pe, ds);
    const Verdict vd = classify(dd, 0.95, 10, "drude");
    const Verdict vp10 = classify(dp, 0.10, 10, "plasma");
    const Verdict vp67 = classify(dp, 0.67, 10, "plasma");
    const Verdict agree = agreement_scan(dp, {0.05, 0.10, 0.20, 0.33, 0.67, 0.95}, 10, "plasma");
    check(vd.status == VerdictStatus::excluded, "drude excluded at 0.95");
    check(vd.excluded_min_nm == 223.0, "exclusion starts at 223 nm");
    check(vd.excluded_max_nm >= 330.0 && vd.excluded_max_nm <= 460.0,
          "exclusion ends in [330, 460] nm (got " + std::to_string(vd.excluded_max_nm) + ")");
    check(vp10.status != VerdictStatus::excluded, "plasma not excluded at 0.10");
    check(vp67.status == VerdictStatus::consistent, "plasma consistent at 0.67");
    check(agree.agreement_level && *agree.agreement_level >= 0.90, "plasma agreement >= 0.90");
}

// Au-Au: same recipe; the drude differences come out systematically negative
// (data synthesized from the plasma curve, which lies above).
void make_auau(const fs::path& dir) {
    std::printf("auau fixture\n");
    const double r_um = 41.3, t_k = 300.0;
    const auto grid = make_grid(235.0, 550.0, 3.0);
    const ThermalState thermal(t_k);
    const Material au_d("au-drude", DrudeModel(9.0, 0.035));
    const Material au_p("au-plasma", PlasmaModel(9.0));
    const TheoryCurve plasma = theory_curve(au_p, au_p, r_um, thermal, grid, {}, {}, "plasma");
    const TheoryCurve drude = theory_curve(au_d, au_d, r_um, thermal, grid, {}, {}, "drude");

    // size the error so the 95% band crosses the gap near 330 nm
    std::size_t i330 = 0;
    while (grid[i330] < 330.0) ++i330;
    const double gap330 = plasma.points[i330].gradient - drude.points[i330].gradient;
    const double delta = std::round(gap330 / confidence_quantile(0.95, 1.0, 1.0) * 100.0) / 100.0;
    const double noise = 0.2 * delta;

    Rng rng(11);
    std::vector<double> data;
    for (const auto& p : plasma.points) data.push_back(p.gradient + rng.uniform(-noise, noise));
    const ExperimentDataset ds = make_dataset("auau", r_um, t_k, grid, data, 0.6, delta);
    save_dataset(ds, dir / "auau.csv");
    save_theory_curve(error_curve(plasma, delta), dir / "auau_theory_err.csv");

    TheoryCurve pe = plasma, de = drude;
    for (auto& p : pe.points) p.gradient_error = delta;
    for (auto& p : de.points) p.gradient_error = delta;
    const auto dd = difference_series(de, ds);
    const auto dp = difference_series(pe, ds);
    bool all_negative = true;
    for (const auto& p : dd) all_negative = all_negative && p.difference < 0.0;
    const Verdict vd = classify(dd, 0.95, 10, "drude");
    check(vd.status == VerdictStatus::excluded, "drude excluded at 0.95");
    check(vd.excluded_min_nm == 235.0, "exclusion starts at 235 nm");
    check(vd.excluded_max_nm < 550.0, "exclusion is a sub-range");
    check(all_negative, "drude differences all negative");
    check(classify(dp, 0.10, 10).status != VerdictStatus::excluded,
          "plasma not excluded at 0.10");
}

// Au-Ni: data centered between the two nearly coincident predictions with
// conservative errors; both approaches stay inside the 10% band everywhere.
void make_auni(const fs::path& dir) {
    std::printf("auni fixture\n");
    const double r_um = 64.1, t_k = 300.0, delta = 2.0, noise = 0.08;
    const auto grid = make_grid(220.0, 500.0, 4.0);
    const ThermalState thermal(t_k);
    const Material au_d("au-drude", DrudeModel(9.0, 0.035));
    const Material au_p("au-plasma", PlasmaModel(9.0));
    const Material ni_d("ni-drude", DrudeModel(4.89, 0.0436), MagneticResponse(110.0));
    const Material ni_p("ni-plasma", PlasmaModel(4.89), MagneticResponse(110.0));
    const TheoryCurve plasma = theory_curve(au_p, ni_p, r_um, thermal, grid, {}, {}, "plasma");
    const TheoryCurve drude = theory_curve(au_d, ni_d, r_um, thermal, grid, {}, {}, "drude");

    Rng rng(1);
    std::vector<double> data;
    for (std::size_t i = 0; i < grid.size(); ++i)
        data.push_back(0.5 * (plasma.points[i].gradient + drude.points[i].gradient) +
                       rng.uniform(-noise, noise));
    const ExperimentDataset ds = make_dataset("auni", r_um, t_k, grid, data, 0.6, delta);
    save_dataset(ds, dir / "auni.csv");
    save_theory_curve(error_curve(plasma, delta), dir / "auni_theory_err.csv");

    TheoryCurve pe = plasma, de = drude;
    for (auto& p : pe.points) p.gradient_error = delta;
    for (auto& p : de.points) p.gradient_error = delta;
    check(classify(difference_series(pe, ds), 0.10, 10).status != VerdictStatus::excluded,
          "plasma not excluded at 0.10");
    check(classify(difference_series(de, ds), 0.10, 10).status != VerdictStatus::excluded,
          "drude not excluded at 0.10");
}

// Graphene: theory enters as an external file (analytic power-law stand-in).
// A contiguous block of differences is pushed just outside the 10% band but
// kept inside the 20% band; elsewhere the dots hug zero.
void make_graphene(const fs::path& dir, const std::string& label, double amp, double power,
                   double off_lo, double off_hi, std::uint64_t seed) {
    std::printf("%s fixture\n", label.c_str());
    const double r_um = 54.1, t_k = 300.0;
    const auto grid = make_grid(224.0, 500.0, 3.0);

    TheoryCurve theory;
    theory.label = label + "-theory";
    for (double a : grid) {
        const double grad = amp * std::pow(224.0 / a, power);
        theory.points.push_back({a, grad, std::max(0.35, 0.02 * grad)});
    }
    save_theory_curve(theory, dir / (label + "_theory.csv"));

    Rng rng(seed);
    std::vector<double> data, dgrad;
    for (const auto& p : theory.points) {
        const double c = 2.0 * p.gradient_error; // combined error, both budgets equal
        const bool offset = p.separation_nm >= off_lo && p.separation_nm <= off_hi;
        const double d = offset ? rng.uniform(0.065 * c, 0.095 * c)
                                : rng.uniform(-0.10 * c, 0.10 * c);
        data.push_back(p.gradient - d);
        dgrad.push_back(p.gradient_error);
    }
    ExperimentDataset ds;
    ds.label = label;
    ds.sphere_radius_um = r_um;
    ds.temperature_k = t_k;
    for (std::size_t i = 0; i < grid.size(); ++i)
        ds.points.push_back({grid[i], data[i], 0.6, dgrad[i]});
    save_dataset(ds, dir / (label + ".csv"));

    const auto diffs = difference_series(theory, ds);
    const Verdict v10 = classify(diffs, 0.10, 10, label);
    const Verdict v20 = classify(diffs, 0.20, 10, label);
    const Verdict agree =
        agreement_scan(diffs, {0.05, 0.10, 0.20, 0.33, 0.67, 0.95}, 10, label);
    check(v10.status == VerdictStatus::excluded, "excluded at 0.10");
    check(v10.excluded_min_nm > 224.0 && v10.excluded_max_nm < 500.0,
          "exclusion is an interior sub-range");
    check(v20.status != VerdictStatus::excluded, "not excluded at 0.20");
    check(agree.agreement_level && std::abs(*agree.agreement_level - 0.80) < 1e-12,
          "agreement level 0.80");
}

void make_oscillators(const fs::path& dir) {
    // constructed core-electron oscillators for the generalized-plasma demo:
    // keeps eps within a few tenths of a percent above the bare plasma pole
    write_text(dir / "ni_oscillators.csv",
               "g_eV2,omega_eV,gamma_eV\n"
               "45,4.5,4\n"
               "90,9,6\n"
               "150,14,8\n"
               "300,25,12\n");
}

void make_optical_table(const fs::path& dir) {
    // synthetic conductor table: Im eps of the drude model with wp = 4.89 eV,
    // gamma = 0.0436 eV, written as n1 = 1, n2 = Im eps / 2
    const double wp = 4.89, gamma = 0.0436;
    std::string out = "omega_eV,n1,n2\n";
    const int per_decade = 30;
    for (int i = 0; i <= 6 * per_decade; ++i) {
        const double omega = std::pow(10.0, -2.0 + static_cast<double>(i) / per_decade);
        const double im = wp * wp * gamma / (omega * (omega * omega + gamma * gamma));
        out += detail::fmt(omega) + ",1," + detail::fmt(im / 2.0) + "\n";
    }
    write_text(dir / "ni_optical_synth.csv", out);
}

void make_configs(const fs::path& dir) {
    write_text(dir / "nini.ini",
               "[quadrature]\n"
               "k_nodes = 24\n"
               "matsubara_cutoff = 30\n"
               "rel_tolerance = 1e-8\n"
               "\n"
               "[analysis]\n"
               "window = 10\n"
               "beta_grid = 0.05, 0.10, 0.20, 0.33, 0.67, 0.95\n"
               "theory_error_file = nini_theory_err.csv\n"
               "\n"
               "[material.ni-drude]\n"
               "type = drude\n"
               "wp_eV = 4.89\n"
               "gamma_eV = 0.0436\n"
               "mu0 = 110\n"
               "\n"
               "[material.ni-plasma]\n"
               "type = plasma\n"
               "wp_eV = 4.89\n"
               "mu0 = 110\n"
               "\n"
               "[material.ni-gp]\n"
               "type = generalized-plasma\n"
               "wp_eV = 4.89\n"
               "oscillator_file = ni_oscillators.csv\n"
               "mu0 = 110\n"
               "\n"
               "[material.ni-table]\n"
               "type = table\n"
               "file = ni_optical_synth.csv\n"
               "extrapolation = drude\n"
               "wp_eV = 4.89\n"
               "gamma_eV = 0.0436\n"
               "mu0 = 110\n"
               "\n"
               "[approach.drude]\n"
               "sphere = ni-drude\n"
               "plate = ni-drude\n"
               "\n"
               "[approach.plasma]\n"
               "sphere = ni-plasma\n"
               "plate = ni-plasma\n"
               "\n"
               "[approach.generalized-plasma]\n"
               "sphere = ni-gp\n"
               "plate = ni-gp\n");
    write_text(dir / "auau.ini",
               "[analysis]\n"
               "theory_error_file = auau_theory_err.csv\n"
               "\n"
               "[material.au-drude]\n"
               "type = drude\n"
               "wp_eV = 9.0\n"
               "gamma_eV = 0.035\n"
               "\n"
               "[material.au-plasma]\n"
               "type = plasma\n"
               "wp_eV = 9.0\n"
               "\n"
               "[approach.drude]\n"
               "sphere = au-drude\n"
               "plate = au-drude\n"
               "\n"
               "[approach.plasma]\n"
               "sphere = au-plasma\n"
               "plate = au-plasma\n");
    write_text(dir / "auni.ini",
               "[analysis]\n"
               "theory_error_file = auni_theory_err.csv\n"
               "\n"
               "[material.au-drude]\n"
               "type = drude\n"
               "wp_eV = 9.0\n"
               "gamma_eV = 0.035\n"
               "\n"
               "[material.au-plasma]\n"
               "type = plasma\n"
               "wp_eV = 9.0\n"
               "\n"
               "[material.ni-drude]\n"
               "type = drude\n"
               "wp_eV = 4.89\n"
               "gamma_eV = 0.0436\n"
               "mu0 = 110\n"
               "\n"
               "[material.ni-plasma]\n"
               "type = plasma\n"
               "wp_eV = 4.89\n"
               "mu0 = 110\n"
               "\n"
               "[approach.drude]\n"
               "sphere = au-drude\n"
               "plate = ni-drude\n"
               "\n"
               "[approach.plasma]\n"
               "sphere = au-plasma\n"
               "plate = ni-plasma\n");
    write_text(dir / "graphene.ini",
               "[analysis]\n"
               "window = 10\n"
               "beta_grid = 0.05, 0.10, 0.20, 0.33, 0.67, 0.95\n");
}

} // namespace

int main(int argc, char** argv) {
    fs::path dir = "data";
    for (int i = 1; i + 1 < argc; i += 2)
        if (std::string(argv[i]) == "--out-dir") dir = argv[i + 1];
    fs::create_directories(dir);

    make_oscillators(dir);
    make_optical_table(dir);
    make_configs(dir);
    make_nini(dir);
    make_auau(dir);
    make_auni(dir);
    make_graphene(dir, "graphene1", 32.0, 3.60, 329.0, 377.0, 3);
    make_graphene(dir, "graphene2", 30.5, 3.55, 341.0, 389.0, 5);

    if (failures) {
        std::printf("%d fixture target(s) NOT met\n", failures);
        return 1;
    }
    std::printf("all fixture targets met\n");
    return 0;
}
