// End-to-end library usage: compute drude- and plasma-approach gradient
// curves for the bundled Ni-Ni dataset, form the difference series, and print
// the verdict at each confidence level.
//
//   ./classify_nini [path/to/data]

#include <cstdio>
#include <filesystem>

#include "casimir/casimir.hpp"

using namespace casimir;

int main(int argc, char** argv) {
    const std::filesystem::path dir = argc > 1 ? argv[1] : "data";
    const RunConfig cfg = load_config(dir / "nini.ini");
    const ExperimentDataset ds = load_dataset(dir / "nini.csv");
    const ThermalState thermal(ds.temperature_k);
    const auto grid = ds.separations();

    std::printf("%s: %zu points, R = %g um, T = %g K\n\n", ds.label.c_str(), ds.points.size(),
                ds.sphere_radius_um, ds.temperature_k);

    const TheoryErrorSpec err_spec = resolve_theory_error(cfg, grid);
    for (const std::string name : {"drude", "plasma"}) {
        const Approach& ap = cfg.approach(name);
        const TheoryCurve curve =
            theory_curve(cfg.material(ap.sphere), cfg.material(ap.plate), ds.sphere_radius_um,
                         thermal, grid, cfg.quadrature, err_spec, name);
        const auto diffs = difference_series(curve, ds);
        for (double beta : cfg.beta_grid) {
            const Verdict v = classify(diffs, beta, cfg.window, name);
            if (v.status == VerdictStatus::excluded)
                std::printf("%-8s beta = %-5g excluded over [%g, %g] nm\n", name.c_str(), beta,
                            v.excluded_min_nm, v.excluded_max_nm);
            else
                std::printf("%-8s beta = %-5g %s\n", name.c_str(), beta, to_string(v.status));
        }
        const Verdict agree = agreement_scan(diffs, cfg.beta_grid, cfg.window, name);
        if (agree.agreement_level)
            std::printf("%-8s agreement level %g\n\n", name.c_str(), *agree.agreement_level);
        else
            std::printf("%-8s excluded at every level\n\n", name.c_str());
    }
    return 0;
}
