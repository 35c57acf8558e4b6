// Acceptance gate: each TEST_CASE evaluates one release criterion and prints
// exactly one PASS/FAIL line, then asserts it, so both the console transcript
// and the ctest status carry the verdict.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "casimir/casimir.hpp"

using namespace casimir;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = CASIMIR_DATA_PATH;

void report(int n, const std::string& name, bool ok, const std::string& detail) {
    std::printf("criterion %d  %-38s %s  (%s)\n", n, name.c_str(), ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
}

std::string fmt1(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
};

} // namespace

TEST_CASE("criterion 1: composition-law coefficient") {
    // closed-form k and quantile against brute-force box-sum sampling
    const double k95 = k_coefficient(0.95, 1.0, 1.0);
    bool ok = k95 > 1.09 && k95 < 1.11;

    double worst = 0.0;
    const int n = 10'000'000;
    for (double ratio : {0.0, 0.5, 1.0, 2.0}) {
        for (double beta : {0.10, 0.20, 0.67, 0.95}) {
            const double q = confidence_quantile(beta, 1.0, ratio);
            Rng rng(static_cast<std::uint64_t>(1000.0 * ratio + 10.0 * beta) + 5);
            long within = 0;
            for (int i = 0; i < n; ++i) {
                double x = rng.uniform(-1.0, 1.0);
                if (ratio > 0.0) x += rng.uniform(-ratio, ratio);
                if (std::abs(x) <= q) ++within;
            }
            const double dev = std::abs(static_cast<double>(within) / n - beta);
            worst = std::max(worst, dev);
        }
    }
    ok = ok && worst < 0.005;
    report(1, "composition-law coefficient", ok,
           "k(0.95) = " + fmt1("%.4f", k95) + ", worst Monte Carlo gap " +
               fmt1("%.2e", worst) + " over 16 cells");
    CHECK(ok);
}

TEST_CASE("criterion 2: ideal-metal limit at 200 nm") {
    // plasma response, wp = 200 eV, a = 200 nm, T = 1 K, R = 61.71 um,
    // held against the zero-temperature ideal-metal gradient pi^3 hbar c R/(120 a^4)
    const Material m("near-ideal", PlasmaModel(200.0));
    const double grad = force_gradient(m, m, Geometry(61.71, 200.0), ThermalState(1.0));
    const double ideal =
        pi * pi * hbar_c / (240.0 * std::pow(200.0, 4)) * ev_per_nm3_to_pa * 2.0 * pi * 61.71;
    const double dev_pct = (ideal - grad) / ideal * 100.0;
    // finite wp = 200 eV carries an irreducible skin-depth deficit ~ (16/3)(delta0/a):
    // the computed 2.57% is the physically correct distance. The 2% target is not
    // reachable at these parameters; the gate reports the honest number.
    const bool ok = std::abs(dev_pct) <= 2.0;
    report(2, "ideal-metal limit at 200 nm", ok,
           fmt1("%.3f", grad) + " vs " + fmt1("%.3f", ideal) + " uN/m: deviation " +
               fmt1("%.3f", dev_pct) + "% against a 2% target");
    CHECK(ok);
}

TEST_CASE("criterion 3: drude-plasma discrimination curve") {
    // relative gap (plasma - drude)/plasma between the two predictions for a
    // gold sphere against a magnetic nickel plate, short range through 5 um
    const Material au_d("au-d", DrudeModel(9.0, 0.035));
    const Material au_p("au-p", PlasmaModel(9.0));
    const Material ni_d("ni-d", DrudeModel(4.89, 0.0436), MagneticResponse(110.0));
    const Material ni_p("ni-p", PlasmaModel(4.89), MagneticResponse(110.0));
    const ThermalState t300(300.0);

    const std::vector<double> seps{220.0, 300.0, 400.0, 500.0, 3000.0, 5000.0};
    const std::vector<double> expected{0.18, 0.42, 0.91, 1.57, 32.1, 42.8};
    bool ok = true;
    std::string listing;
    for (std::size_t i = 0; i < seps.size(); ++i) {
        const double pp = std::abs(plate_pressure(au_p, ni_p, seps[i], t300));
        const double pd = std::abs(plate_pressure(au_d, ni_d, seps[i], t300));
        const double gap = (pp - pd) / pp * 100.0;
        const double tol = std::max(0.01, 0.004 * expected[i]);
        ok = ok && std::abs(gap - expected[i]) <= tol;
        listing += (listing.empty() ? "" : "/") + fmt1("%.2f", gap);
    }
    report(3, "drude-plasma discrimination curve", ok,
           "gaps " + listing + " % at 0.22/0.3/0.4/0.5/3/5 um");
    CHECK(ok);
}

TEST_CASE("criterion 4: verdict replication on synthetic data") {
    // (a) data scattered well inside the error budget must virtually never be
    //     excluded at the 10% level;
    // (b) data displaced by 3x the combined error must always be excluded over
    //     the full range at the 95% level.
    const int reps = 1000;
    const double delta = 0.77, combined = 2.0 * delta, scatter = 0.08 * combined;
    std::vector<double> grid;
    for (double a = 223.0; a <= 550.0 + 1e-9; a += 3.0) grid.push_back(a);

    int consistent_ok = 0, displaced_ok = 0;
    for (int r = 0; r < reps; ++r) {
        Rng rng(1000 + static_cast<std::uint64_t>(r));
        std::vector<DifferencePoint> quiet, displaced;
        for (double a : grid) {
            quiet.push_back({a, rng.uniform(-scatter, scatter), delta, delta});
            displaced.push_back({a, 3.0 * combined + rng.uniform(0.0, 0.1 * combined),
                                 delta, delta});
        }
        if (classify(quiet, 0.10, 10).status != VerdictStatus::excluded) ++consistent_ok;
        const Verdict v = classify(displaced, 0.95, 10);
        if (v.status == VerdictStatus::excluded && v.excluded_min_nm == grid.front() &&
            v.excluded_max_nm == grid.back())
            ++displaced_ok;
    }
    const bool ok = consistent_ok >= 950 && displaced_ok == reps;
    report(4, "verdict replication on synthetic data", ok,
           "quiet data clear in " + std::to_string(consistent_ok) + "/1000, displaced data " +
               "fully excluded in " + std::to_string(displaced_ok) + "/1000");
    CHECK(ok);
}

TEST_CASE("criterion 5: committed fixture verdicts") {
    bool ok = true;
    std::string detail;

    // nickel-nickel: computed curves, per-point theory errors from the config
    {
        const RunConfig cfg = load_config(data_dir / "nini.ini");
        const ExperimentDataset ds = load_dataset(data_dir / "nini.csv");
        const std::vector<double> grid = ds.separations();
        const ThermalState thermal(ds.temperature_k);
        const TheoryErrorSpec err = resolve_theory_error(cfg, grid);

        const Approach& ap_d = cfg.approach("drude");
        const Approach& ap_p = cfg.approach("plasma");
        const TheoryCurve drude =
            theory_curve(cfg.material(ap_d.sphere), cfg.material(ap_d.plate),
                         ds.sphere_radius_um, thermal, grid, cfg.quadrature, err, "drude");
        const TheoryCurve plasma =
            theory_curve(cfg.material(ap_p.sphere), cfg.material(ap_p.plate),
                         ds.sphere_radius_um, thermal, grid, cfg.quadrature, err, "plasma");

        const auto dd = difference_series(drude, ds);
        const auto dp = difference_series(plasma, ds);
        const Verdict vd = classify(dd, 0.95, cfg.window, "drude");
        const Verdict vp = classify(dp, 0.10, cfg.window, "plasma");
        const Verdict agree = agreement_scan(dp, cfg.beta_grid, cfg.window, "plasma");

        const bool drude_out = vd.status == VerdictStatus::excluded &&
                               vd.excluded_min_nm == grid.front() &&
                               vd.excluded_max_nm >= 330.0 && vd.excluded_max_nm <= 460.0;
        const bool plasma_in = vp.status != VerdictStatus::excluded &&
                               agree.agreement_level && *agree.agreement_level >= 0.90;
        ok = ok && drude_out && plasma_in;
        detail += "nini drude excluded [" + fmt1("%.0f", vd.excluded_min_nm) + ", " +
                  fmt1("%.0f", vd.excluded_max_nm) + "] nm, plasma agreement " +
                  (agree.agreement_level ? fmt1("%.2f", *agree.agreement_level) : "none");
    }

    // graphene stand-in: external theory file against the committed dataset
    {
        const ExperimentDataset ds = load_dataset(data_dir / "graphene1.csv");
        const TheoryCurve th =
            align_theory(load_theory_curve(data_dir / "graphene1_theory.csv"),
                         ds.separations());
        const auto diffs = difference_series(th, ds);
        const Verdict v10 = classify(diffs, 0.10, 10, "g1");
        const Verdict v20 = classify(diffs, 0.20, 10, "g1");
        const Verdict agree =
            agreement_scan(diffs, {0.05, 0.10, 0.20, 0.33, 0.67, 0.95}, 10, "g1");
        const bool g_ok = v10.status == VerdictStatus::excluded &&
                          v10.excluded_min_nm > ds.points.front().separation_nm &&
                          v10.excluded_max_nm < ds.points.back().separation_nm &&
                          v20.status != VerdictStatus::excluded && agree.agreement_level &&
                          std::abs(*agree.agreement_level - 0.80) < 1e-12;
        ok = ok && g_ok;
        detail += "; graphene1 excluded at 0.10 over [" + fmt1("%.0f", v10.excluded_min_nm) +
                  ", " + fmt1("%.0f", v10.excluded_max_nm) + "] nm, clear at 0.20";
    }

    report(5, "committed fixture verdicts", ok, detail);
    CHECK(ok);
}

TEST_CASE("criterion 6: cross-cutting invariants") {
    bool ok = true;
    std::string failed;
    auto gate = [&](bool cond, const char* tag) {
        if (!cond) {
            ok = false;
            failed += failed.empty() ? tag : (std::string("+") + tag);
        }
    };

    // (a) confidence bands nest and respect the additive cap
    {
        Rng rng(6001);
        bool nested = true;
        for (int i = 0; i < 2000 && nested; ++i) {
            const double d1 = rng.uniform(0.0, 3.0), d2 = rng.uniform(0.01, 3.0);
            const double b1 = rng.uniform(0.01, 0.97);
            const double b2 = b1 + rng.uniform(0.005, 0.99 - b1);
            const DifferencePoint p{0.0, 0.0, d1, d2};
            const double lo = half_width(p, b1), hi = half_width(p, b2);
            nested = lo < hi && hi <= d1 + d2 + 1e-12;
        }
        gate(nested, "band-nesting");
    }

    // (b) the dissipationless response always predicts the stronger force
    {
        const Material au_d("au-d", DrudeModel(9.0, 0.035));
        const Material au_p("au-p", PlasmaModel(9.0));
        const ThermalState t300(300.0);
        bool ordered = true;
        for (double a = 200.0; a <= 5000.0 + 1.0; a *= 1.3) {
            const double pd = std::abs(plate_pressure(au_d, au_d, a, t300));
            const double pp = std::abs(plate_pressure(au_p, au_p, a, t300));
            ordered = ordered && pp > pd;
        }
        gate(ordered, "model-ordering");
    }

    // (c) Kramers-Kronig round trip within 1%
    {
        const double wp = 9.0, gamma = 0.035;
        std::vector<TableRow> rows;
        for (int i = 0; i <= 180; ++i) {
            const double w = std::pow(10.0, -2.0 + i / 30.0);
            const double im = wp * wp * gamma / (w * (w * w + gamma * gamma));
            rows.push_back({w, 1.0, im / 2.0});
        }
        const OpticalTable table(std::move(rows), DrudeExtrapolation{wp, gamma});
        const DrudeModel exact(wp, gamma);
        bool close = true;
        for (double xi : {0.01, 0.1, 1.0, 10.0}) {
            const double a = eps_table_imag(table, xi), b = eps_imag(exact, xi);
            close = close && std::abs(a - b) <= 0.01 * b;
        }
        gate(close, "kk-roundtrip");
    }

    // (d) quadrature refinement stability below 1e-4
    {
        const Material au_d("au-d", DrudeModel(9.0, 0.035));
        const Material ni_p("ni-p", PlasmaModel(4.89), MagneticResponse(110.0));
        const ThermalState t300(300.0);
        const double ref = plate_pressure(au_d, ni_p, 350.0, t300);
        QuadratureConfig fine;
        fine.k_nodes = 48;
        QuadratureConfig deep;
        deep.matsubara_cutoff = 60.0;
        const double v1 = plate_pressure(au_d, ni_p, 350.0, t300, fine);
        const double v2 = plate_pressure(au_d, ni_p, 350.0, t300, deep);
        gate(std::abs(v1 / ref - 1.0) < 1e-4 && std::abs(v2 / ref - 1.0) < 1e-4,
             "quadrature-stability");
    }

    // (e) pressures are attractive and gradients strictly decreasing with gap
    {
        const Material ni_p("ni-p", PlasmaModel(4.89), MagneticResponse(110.0));
        const ThermalState t300(300.0);
        std::vector<double> grid;
        for (double a = 223.0; a <= 550.0; a += 40.0) grid.push_back(a);
        const TheoryCurve c = theory_curve(ni_p, ni_p, 61.71, t300, grid);
        bool sane = true;
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            sane = sane && c.points[i].gradient > 0.0;
            if (i > 0) sane = sane && c.points[i].gradient < c.points[i - 1].gradient;
            sane = sane && plate_pressure(ni_p, ni_p, grid[i], t300) < 0.0;
        }
        gate(sane, "attraction-monotonicity");
    }

    // (f) persisted artifacts reload bit-exactly
    {
        static std::mt19937_64 seed_eng(std::random_device{}());
        const fs::path dir =
            fs::temp_directory_path() / ("casimir_acc_" + std::to_string(seed_eng()));
        fs::create_directories(dir);
        Rng rng(99);
        ExperimentDataset ds;
        ds.label = "rt";
        ds.sphere_radius_um = 61.71;
        ds.temperature_k = 300.0;
        for (int i = 0; i < 20; ++i)
            ds.points.push_back(
                {223.0 + 3.0 * i, 90.0 + rng.uniform(0.0, 10.0), 0.6, 0.77});
        save_dataset(ds, dir / "d.csv");
        const ExperimentDataset back = load_dataset(dir / "d.csv");
        bool exact = back.points.size() == ds.points.size();
        for (std::size_t i = 0; exact && i < ds.points.size(); ++i)
            exact = back.points[i].gradient == ds.points[i].gradient &&
                    back.points[i].separation_nm == ds.points[i].separation_nm;

        AnalysisBundle b;
        b.dataset = ds;
        std::vector<DifferencePoint> diffs;
        for (const auto& p : ds.points)
            diffs.push_back({p.separation_nm, rng.uniform(-1.0, 1.0), 0.77, 0.77});
        b.differences.emplace("m", diffs);
        b.verdicts.push_back(classify(diffs, 0.95, 10, "m"));
        save_bundle(b, dir / "b.json");
        const AnalysisBundle bb = load_bundle(dir / "b.json");
        exact = exact && bb.differences.at("m").size() == diffs.size();
        for (std::size_t i = 0; exact && i < diffs.size(); ++i)
            exact = bb.differences.at("m")[i].difference == diffs[i].difference;
        exact = exact && bb.verdicts.size() == 1 &&
                bb.verdicts[0].window_fraction == b.verdicts[0].window_fraction;
        gate(exact, "io-roundtrip");
        fs::remove_all(dir);
    }

    report(6, "cross-cutting invariants", ok, ok ? "6 property suites held" : failed);
    CHECK(ok);
}
