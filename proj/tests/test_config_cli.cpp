#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <sys/wait.h>
#include <variant>

#include "casimir/casimir.hpp"

using namespace casimir;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = CASIMIR_DATA_PATH;
const std::string cli = CASIMIR_CLI_BIN;

fs::path make_tmp_dir(const std::string& tag) {
    static std::mt19937_64 eng(std::random_device{}());
    const fs::path dir =
        fs::temp_directory_path() / ("casimir_cli_" + tag + "_" + std::to_string(eng()));
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int code = -1;
    std::string out;
};

// Run a shell command, capturing stdout (stderr silenced) and the exit code.
RunResult run(const std::string& cmd) {
    RunResult r;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

} // namespace

TEST_CASE("run configuration parses the committed fixture configs") {
    const RunConfig cfg = load_config(data_dir / "nini.ini");

    CHECK(cfg.quadrature.k_nodes == 24);
    CHECK(cfg.quadrature.matsubara_cutoff == 30.0);
    CHECK(cfg.window == 10);
    REQUIRE(cfg.beta_grid.size() == 6);
    CHECK(cfg.beta_grid.front() == 0.05);
    CHECK(cfg.beta_grid.back() == 0.95);
    REQUIRE(cfg.theory_error_file.has_value());

    REQUIRE(cfg.materials.size() == 4);
    CHECK(std::holds_alternative<DrudeModel>(cfg.material("ni-drude").response));
    CHECK(std::holds_alternative<PlasmaModel>(cfg.material("ni-plasma").response));
    CHECK(std::holds_alternative<GeneralizedPlasmaModel>(cfg.material("ni-gp").response));
    CHECK(std::holds_alternative<OpticalTable>(cfg.material("ni-table").response));
    CHECK(cfg.material("ni-drude").magnetic.mu0 == 110.0);
    const auto& gp = std::get<GeneralizedPlasmaModel>(cfg.material("ni-gp").response);
    CHECK(gp.oscillators.size() == 4);
    const auto& tab = std::get<OpticalTable>(cfg.material("ni-table").response);
    CHECK(std::holds_alternative<DrudeExtrapolation>(tab.extrapolation()));

    REQUIRE(cfg.approaches.size() == 3);
    CHECK(cfg.approach("drude").sphere == "ni-drude");
    CHECK(cfg.approach("plasma").plate == "ni-plasma");
    CHECK_THROWS_AS(cfg.material("nope"), config_error);
    CHECK_THROWS_AS(cfg.approach("nope"), config_error);

    SECTION("per-point theory errors resolve against the dataset grid") {
        const ExperimentDataset ds = load_dataset(data_dir / "nini.csv");
        const TheoryErrorSpec spec = resolve_theory_error(cfg, ds.separations());
        const auto* per_point = std::get_if<std::vector<double>>(&spec);
        REQUIRE(per_point != nullptr);
        CHECK(per_point->size() == ds.points.size());
        for (double e : *per_point) CHECK(e == 0.77);
    }
}

TEST_CASE("configuration errors carry file and line context") {
    const fs::path dir = make_tmp_dir("cfg");
    auto expect_config_error = [&](const std::string& name, const std::string& body,
                                   const std::string& needle) {
        const fs::path p = dir / name;
        write_file(p, body);
        try {
            load_config(p);
            FAIL("expected config_error for " << name);
        } catch (const config_error& e) {
            INFO("message: " << e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_config_error("unknown_section.ini", "[nonsense]\nx = 1\n", "unknown section");
    expect_config_error("unknown_key.ini", "[analysis]\nwibble = 3\n", "unknown key 'wibble'");
    expect_config_error("bad_window.ini", "[analysis]\nwindow = 2\n", "window");
    expect_config_error("empty_beta.ini", "[analysis]\nbeta_grid = 0.5, 0.4\n",
                        "increase strictly");
    expect_config_error("beta_range.ini", "[analysis]\nbeta_grid = 0.5, 1.5\n", "in (0, 1)");
    expect_config_error("dup_key.ini", "[analysis]\nwindow = 10\nwindow = 12\n", "duplicate");
    expect_config_error("both_err.ini",
                        "[analysis]\ntheory_error_percent = 1\ntheory_error_file = x.csv\n",
                        "mutually exclusive");
    expect_config_error("bad_approach.ini",
                        "[material.au]\ntype = plasma\nwp_eV = 9\n"
                        "[approach.x]\nsphere = au\nplate = ghost\n",
                        "unknown plate 'ghost'");
    expect_config_error("bad_type.ini", "[material.x]\ntype = magic\n", "unknown material type");
    expect_config_error("bad_mu0.ini", "[material.x]\ntype = plasma\nwp_eV = 9\nmu0 = 0.5\n",
                        "mu(0)");
    expect_config_error("neg_wp.ini", "[material.x]\ntype = plasma\nwp_eV = -9\n",
                        "plasma frequency");
    expect_config_error("missing_key.ini", "[material.x]\ntype = drude\nwp_eV = 9\n",
                        "gamma_eV");
    expect_config_error("stray_key.ini", "x = 1\n", "outside any section");
    expect_config_error("bad_header.ini", "[oops\nx = 1\n", "malformed section");
    expect_config_error("bad_number.ini", "[analysis]\nwindow = ten\n", "cannot parse");
    expect_config_error("bad_bool.ini", "[analysis]\nfold_separation_error = maybe\n",
                        "expected a boolean");
    expect_config_error("bad_quad.ini", "[quadrature]\nk_nodes = 2\n", "k_nodes");
    expect_config_error("bad_rough.ini", "[analysis]\nroughness_factor = 0\n",
                        "roughness_factor");
    CHECK_THROWS_AS(load_config(dir / "missing.ini"), config_error);
    fs::remove_all(dir);
}

TEST_CASE("kcoef subcommand") {
    SECTION("equal budgets at 95%") {
        const RunResult r = run(cli + " kcoef 0.95 1 1");
        CHECK(r.code == 0);
        CHECK(r.out.find("k_beta = 1.097986") != std::string::npos);
        CHECK(r.out.find("xi_beta = 1.552786") != std::string::npos);
    }
    SECTION("single box at 10%") {
        const RunResult r = run(cli + " kcoef 0.10 1 0");
        CHECK(r.code == 0);
        CHECK(r.out.find("k_beta = 0.100000") != std::string::npos);
        CHECK(r.out.find("xi_beta = 0.100000") != std::string::npos);
    }
    SECTION("invalid arguments exit with the config code") {
        CHECK(run(cli + " kcoef 1.5 1 1").code == 2);
        CHECK(run(cli + " kcoef 0.5 0 0").code == 2);
        CHECK(run(cli + " kcoef").code == 2);
    }
}

TEST_CASE("theory subcommand computes curves from configs") {
    const fs::path dir = make_tmp_dir("theory");

    SECTION("explicit grid") {
        const fs::path out = dir / "th.csv";
        const RunResult r =
            run(cli + " theory --config " + q(data_dir / "auau.ini") +
                " --pair au-plasma:au-plasma --grid 240:500:20 --radius-um 41.3" +
                " --temperature-K 300 --out " + q(out));
        REQUIRE(r.code == 0);
        const TheoryCurve c = load_theory_curve(out);
        REQUIRE(c.points.size() == 14);
        CHECK(c.label == "au-plasma:au-plasma");
        CHECK(c.points.front().separation_nm == 240.0);
        CHECK(c.points.back().separation_nm == 500.0);
        for (std::size_t i = 1; i < c.points.size(); ++i)
            CHECK(c.points[i].gradient < c.points[i - 1].gradient);
    }
    SECTION("grid, radius, and temperature copied from a dataset") {
        const fs::path out = dir / "th_ds.csv";
        const RunResult r = run(cli + " theory --config " + q(data_dir / "auau.ini") +
                                " --pair au-drude:au-drude --grid-from " +
                                q(data_dir / "auau.csv") + " --out " + q(out));
        REQUIRE(r.code == 0);
        const TheoryCurve c = load_theory_curve(out);
        const ExperimentDataset ds = load_dataset(data_dir / "auau.csv");
        REQUIRE(c.points.size() == ds.points.size());
        CHECK(c.points.front().separation_nm == ds.points.front().separation_nm);
    }
    SECTION("failure modes") {
        CHECK(run(cli + " theory --config " + q(data_dir / "auau.ini") +
                  " --pair au-plasma:au-plasma")
                  .code == 2); // no grid
        CHECK(run(cli + " theory --config " + q(data_dir / "auau.ini") +
                  " --pair ghost:au-plasma --grid 220:500:20 --radius-um 41.3" +
                  " --temperature-K 300")
                  .code == 2); // unknown material
        CHECK(run(cli + " theory --pair a:b --grid 1:2:1").code == 2); // missing --config
        CHECK(run(cli + " theory --config " + q(data_dir / "auau.ini") +
                  " --pair au-plasma:au-plasma --grid 220:500:20 --radius-um 41.3" +
                  " --temperature-K 300")
                  .code == 3); // grid outside the error curve's coverage
    }
    SECTION("a cutoff too tight for the tolerance exits with the numerical code") {
        write_file(dir / "tight.ini",
                   "[quadrature]\nmatsubara_cutoff = 10\n"
                   "[material.au]\ntype = drude\nwp_eV = 9.0\ngamma_eV = 0.035\n");
        const RunResult r = run(cli + " theory --config " + q(dir / "tight.ini") +
                                " --pair au:au --grid 1000:1000:1 --radius-um 41.3" +
                                " --temperature-K 300 --out " + q(dir / "x.csv"));
        CHECK(r.code == 4);
    }
    fs::remove_all(dir);
}

TEST_CASE("compare subcommand classifies an external theory end to end") {
    const fs::path dir = make_tmp_dir("compare");
    const std::string base = cli + " compare --config " + q(data_dir / "graphene.ini") +
                             " --dataset " + q(data_dir / "graphene1.csv") + " --external " +
                             q(data_dir / "graphene1_theory.csv");

    const RunResult r = run(base + " --out-dir " + q(dir / "out"));
    REQUIRE(r.code == 0);
    INFO(r.out);

    SECTION("verdict lines reach stdout") {
        CHECK(r.out.find("graphene1-theory") != std::string::npos);
        CHECK(r.out.find("excluded") != std::string::npos);
        CHECK(r.out.find("agreement") != std::string::npos);
    }
    SECTION("all documented artifacts are written") {
        for (const char* name :
             {"theory_graphene1-theory.csv", "differences_graphene1-theory.csv",
              "band_graphene1-theory_beta0p05.csv", "band_graphene1-theory_beta0p95.csv",
              "plot_graphene1-theory.svg", "report.json"})
            CHECK(fs::exists(dir / "out" / name));
        const std::string svg = read_file(dir / "out" / "plot_graphene1-theory.svg");
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("beta = 0.95") != std::string::npos);
    }
    SECTION("bundle verdicts carry the fixture's designed pattern") {
        const AnalysisBundle b = load_bundle(dir / "out" / "report.json");
        bool excluded_at_10 = false, clear_at_20 = false, agreement_80 = false;
        for (const auto& v : b.verdicts) {
            if (v.agreement_level) {
                agreement_80 = std::abs(*v.agreement_level - 0.80) < 1e-12;
                continue;
            }
            if (v.beta == 0.10) excluded_at_10 = v.status == VerdictStatus::excluded;
            if (v.beta == 0.20) clear_at_20 = v.status != VerdictStatus::excluded;
        }
        CHECK(excluded_at_10);
        CHECK(clear_at_20);
        CHECK(agreement_80);
    }
    SECTION("reruns are byte-identical") {
        const RunResult r2 = run(base + " --out-dir " + q(dir / "out2"));
        REQUIRE(r2.code == 0);
        CHECK(read_file(dir / "out" / "report.json") == read_file(dir / "out2" / "report.json"));
        CHECK(read_file(dir / "out" / "plot_graphene1-theory.svg") ==
              read_file(dir / "out2" / "plot_graphene1-theory.svg"));
    }
    SECTION("re-rendering the plot from the bundle") {
        const RunResult rp = run(cli + " plot --bundle " + q(dir / "out" / "report.json") +
                                 " --model graphene1-theory --out " + q(dir / "replot.svg"));
        CHECK(rp.code == 0);
        CHECK(read_file(dir / "replot.svg").rfind("<svg", 0) == 0);
        CHECK(run(cli + " plot --bundle " + q(dir / "out" / "report.json") +
                  " --model ghost --out " + q(dir / "x.svg"))
                  .code == 3);
    }
    SECTION("bare file names resolve through CASIMIR_DATA_DIR") {
        const RunResult re = run("CASIMIR_DATA_DIR=" + q(data_dir) + " " + cli +
                                 " compare --config graphene.ini --dataset graphene1.csv" +
                                 " --external graphene1_theory.csv --out-dir " + q(dir / "env"));
        CHECK(re.code == 0);
        CHECK(fs::exists(dir / "env" / "report.json"));
    }
    SECTION("missing inputs exit with the input code") {
        CHECK(run(cli + " compare --config " + q(data_dir / "graphene.ini") + " --dataset " +
                  q(dir / "absent.csv") + " --external " + q(data_dir / "graphene1_theory.csv"))
                  .code == 3);
        CHECK(run(cli + " compare --config " + q(data_dir / "graphene.ini") + " --dataset " +
                  q(data_dir / "graphene1.csv"))
                  .code == 2); // neither --approach nor --external
    }
    fs::remove_all(dir);
}

TEST_CASE("compare subcommand with computed approaches (gold fixture)") {
    const fs::path dir = make_tmp_dir("approach");
    // restrict to one beta so only two engine curves are computed
    const RunResult r = run(cli + " compare --config " + q(data_dir / "auau.ini") +
                            " --dataset " + q(data_dir / "auau.csv") +
                            " --approach drude --approach plasma --beta 0.95 --out-dir " +
                            q(dir / "out"));
    REQUIRE(r.code == 0);
    INFO(r.out);

    const AnalysisBundle b = load_bundle(dir / "out" / "report.json");
    REQUIRE(b.curves.size() == 2);
    bool drude_excluded = false, plasma_clear = false;
    for (const auto& v : b.verdicts) {
        if (v.agreement_level) continue;
        if (v.model_label == "drude" && v.beta == 0.95)
            drude_excluded = v.status == VerdictStatus::excluded;
        if (v.model_label == "plasma" && v.beta == 0.95)
            plasma_clear = v.status != VerdictStatus::excluded;
    }
    CHECK(drude_excluded);
    CHECK(plasma_clear);

    // differences written for both models, negative throughout for drude
    const auto& dd = b.differences.at("drude");
    for (const auto& p : dd) CHECK(p.difference < 0.0);
    fs::remove_all(dir);
}
