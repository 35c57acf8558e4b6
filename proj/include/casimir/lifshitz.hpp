#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/response.hpp"

namespace casimir {

// Thermal Casimir pressure between parallel plates (Lifshitz representation)
// and the sphere-plate force gradient in the proximity-force approximation.
//
// With y = 2 a q_l the pressure at temperature T is
//   P(a,T) = -(k_B T / (8 pi a^3)) sum_l'  I_l,
//   I_l    = \int_{y_l}^inf y^2 dy  sum_{alpha in TM,TE}  rho_alpha / (e^y - rho_alpha),
// where y_l = 2 a xi_l / (hbar c), rho_alpha = r_alpha^(1) r_alpha^(2), the
// prime halves the l = 0 term, and for l >= 1
//   r_TM = (eps y - k) / (eps y + k),  r_TE = (y - k) / (y + k),
//   k = sqrt(y^2 + (eps - 1) y_l^2),  eps = eps(i xi_l).
// The l = 0 reflections are closed-form limits fixed by the response type
// (never a numerical xi -> 0 extrapolation):
//   r_TM = 1 for any conductor (wp > 0), 0 for vacuum,
//   r_TE(y) = (mu0 y - sqrt(y^2 + mu0 w^2)) / (mu0 y + sqrt(y^2 + mu0 w^2)),
// with w = 2 a wp / (hbar c) for plasma-like responses and w = 0 for
// dissipative (drude-like) ones, where the TE zero mode of a nonmagnetic
// material vanishes.

struct Geometry {
    double sphere_radius_um; // > 0
    double separation_nm;    // > 0

    Geometry(double r_um, double a_nm) : sphere_radius_um(r_um), separation_nm(a_nm) {
        if (!(r_um > 0.0)) throw std::domain_error("geometry: sphere radius must be > 0");
        if (!(a_nm > 0.0)) throw std::domain_error("geometry: separation must be > 0");
    }

    // PFA error grows like a/R; past R/20 the approximation is strained.
    bool pfa_strained() const { return separation_nm > sphere_radius_um * 1000.0 / 20.0; }
};

struct ThermalState {
    double temperature_k; // > 0

    explicit ThermalState(double t_k) : temperature_k(t_k) {
        if (!(t_k > 0.0)) throw std::domain_error("thermal state: temperature must be > 0");
    }
};

struct QuadratureConfig {
    int k_nodes = 24;                // Gauss-Legendre nodes per panel
    double matsubara_cutoff = 30.0;  // stop the sum once y_l exceeds this
    double rel_tolerance = 1e-8;     // accepted truncation tail, relative to the sum
    std::vector<double> panel_edges{0.0, 2.0, 5.0, 10.0, 20.0, 45.0}; // offsets above y_l

    void validate() const {
        if (k_nodes < 4 || k_nodes > 512)
            throw config_error("quadrature: k_nodes must be in [4, 512]");
        if (!(matsubara_cutoff >= 10.0))
            throw config_error("quadrature: matsubara_cutoff must be >= 10");
        if (!(rel_tolerance > 0.0) || rel_tolerance > 1e-2)
            throw config_error("quadrature: rel_tolerance must be in (0, 1e-2]");
        if (panel_edges.size() < 2 || panel_edges.front() != 0.0)
            throw config_error("quadrature: panel_edges must start at 0");
        for (std::size_t i = 1; i < panel_edges.size(); ++i)
            if (!(panel_edges[i] > panel_edges[i - 1]))
                throw config_error("quadrature: panel_edges must increase strictly");
        if (panel_edges.back() < 30.0)
            throw config_error("quadrature: last panel edge must be >= 30");
    }
};

namespace detail {

struct GlRule {
    std::vector<double> x; // nodes on (-1, 1)
    std::vector<double> w;
};

inline GlRule make_gl_rule(int n) {
    GlRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        rule.x[i] = -t;
        rule.x[n - 1 - i] = t;
        const double w = 2.0 / ((1.0 - t * t) * dp * dp);
        rule.w[i] = w;
        rule.w[n - 1 - i] = w;
    }
    return rule;
}

inline const GlRule& gl_rule(int n) {
    static std::mutex mtx;
    static std::map<int, GlRule> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gl_rule(n)).first;
    return it->second;
}

// eps(i xi_l) provider with optional per-Matsubara-index cache (worthwhile for
// tabulated responses, where each evaluation is a Kramers-Kronig transform).
struct EpsProvider {
    const Material* material;
    std::unordered_map<int, double>* cache = nullptr;

    double operator()(int l, double xi) const {
        if (cache) {
            auto it = cache->find(l);
            if (it != cache->end()) return it->second;
        }
        const double eps = eps_imag(*material, xi);
        if (cache) cache->emplace(l, eps);
        return eps;
    }
};

struct ZeroModeTe {
    double mu0;
    double w; // 2 a wp / (hbar c) for plasma-like, 0 for dissipative

    double operator()(double y) const {
        const double k = std::sqrt(y * y + mu0 * w * w);
        return (mu0 * y - k) / (mu0 * y + k);
    }
};

inline double panel_sum(double lo, double hi, const GlRule& rule, auto&& integrand) {
    const double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i)
        acc += rule.w[i] * integrand(c + h * rule.x[i]);
    return acc * h;
}

// One Matsubara term: \int y^2 [rho_tm/(e^y - rho_tm) + rho_te/(e^y - rho_te)] dy.
template <typename ReflPair>
double matsubara_term(double y_l, const QuadratureConfig& quad, const GlRule& rule,
                      ReflPair&& reflections) {
    auto integrand = [&](double y) {
        const auto [rho_tm, rho_te] = reflections(y);
        const double ey = std::exp(y);
        return y * y * (rho_tm / (ey - rho_tm) + rho_te / (ey - rho_te));
    };
    double acc = 0.0;
    for (std::size_t p = 0; p + 1 < quad.panel_edges.size(); ++p)
        acc += panel_sum(y_l + quad.panel_edges[p], y_l + quad.panel_edges[p + 1], rule, integrand);
    return acc;
}

inline std::pair<double, double> fresnel_pair(double eps1, double eps2, double y, double y_l) {
    const double k1 = std::sqrt(y * y + (eps1 - 1.0) * y_l * y_l);
    const double k2 = std::sqrt(y * y + (eps2 - 1.0) * y_l * y_l);
    const double r1_tm = (eps1 * y - k1) / (eps1 * y + k1);
    const double r2_tm = (eps2 * y - k2) / (eps2 * y + k2);
    const double r1_te = (y - k1) / (y + k1);
    const double r2_te = (y - k2) / (y + k2);
    return {r1_tm * r2_tm, r1_te * r2_te};
}

// Dimensionless Matsubara sum (the primed sum over l of I_l).
inline double lifshitz_sum(const Material& m1, const Material& m2, double a_nm,
                           const ThermalState& thermal, const QuadratureConfig& quad,
                           std::unordered_map<int, double>* cache1 = nullptr,
                           std::unordered_map<int, double>* cache2 = nullptr) {
    quad.validate();
    if (!(a_nm > 0.0)) throw std::domain_error("lifshitz: separation must be > 0");
    const GlRule& rule = gl_rule(quad.k_nodes);

    const ZeroMode z1 = zero_mode(m1), z2 = zero_mode(m2);
    const double wfac = 2.0 * a_nm / hbar_c;
    const ZeroModeTe te1{m1.magnetic.mu0,
                         z1.kind == ZeroModeKind::plasma_like ? wfac * z1.plasma_frequency : 0.0};
    const ZeroModeTe te2{m2.magnetic.mu0,
                         z2.kind == ZeroModeKind::plasma_like ? wfac * z2.plasma_frequency : 0.0};
    const double rho_tm0 = (z1.plasma_frequency > 0.0 ? 1.0 : 0.0) *
                           (z2.plasma_frequency > 0.0 ? 1.0 : 0.0);
    const double zero_term = matsubara_term(
        0.0, quad, rule, [&](double y) { return std::pair{rho_tm0, te1(y) * te2(y)}; });

    const double y1 = wfac * matsubara_frequency(thermal.temperature_k, 1);
    const double l_max_d = quad.matsubara_cutoff / y1;
    if (l_max_d > 2e7)
        throw numerical_error("lifshitz: " + std::to_string(static_cast<long long>(l_max_d)) +
                              " Matsubara terms needed (a = " + std::to_string(a_nm) +
                              " nm, T = " + std::to_string(thermal.temperature_k) +
                              " K); temperature too low for direct summation");

    const EpsProvider eps1{&m1, cache1}, eps2{&m2, cache2};
    double sum = 0.5 * zero_term;
    double prev = 0.0, last = 0.0;
    int l = 0;
    while (true) {
        ++l;
        const double y_l = y1 * static_cast<double>(l);
        if (y_l > quad.matsubara_cutoff && l > 2) break;
        const double xi = matsubara_frequency(thermal.temperature_k, l);
        const double e1 = eps1(l, xi), e2 = eps2(l, xi);
        const double term = matsubara_term(
            y_l, quad, rule, [&](double y) { return fresnel_pair(e1, e2, y, y_l); });
        prev = last;
        last = term;
        sum += term;
    }

    // Terms decay at least geometrically (ratio ~ e^{-y1}); bound the tail.
    if (prev > 0.0 && last > 0.0) {
        const double ratio = last / prev;
        if (ratio >= 1.0)
            throw numerical_error("lifshitz: Matsubara terms not decaying (ratio " +
                                  std::to_string(ratio) + " at l = " + std::to_string(l) + ")");
        const double tail = last * ratio / (1.0 - ratio);
        if (!(tail <= quad.rel_tolerance * std::abs(sum)))
            throw numerical_error(
                "lifshitz: truncation tail " + std::to_string(tail) + " exceeds tolerance " +
                std::to_string(quad.rel_tolerance) + " x |sum| = " +
                std::to_string(quad.rel_tolerance * std::abs(sum)) +
                " at l = " + std::to_string(l) + "; raise matsubara_cutoff");
    }
    return sum;
}

} // namespace detail

// Reflection coefficients for one material at Matsubara index l, as functions
// of the dimensionless transverse variable y = 2 a q_l (separation in nm).
struct Reflection {
    double tm;
    double te;
};

inline Reflection reflection_coefficients(const Material& m, int l, double y, double a_nm,
                                          const ThermalState& thermal) {
    if (l < 0) throw std::domain_error("reflection: Matsubara index must be >= 0");
    if (!(y > 0.0)) throw std::domain_error("reflection: y must be > 0");
    if (l == 0) {
        const ZeroMode z = zero_mode(m);
        const double w =
            z.kind == ZeroModeKind::plasma_like ? 2.0 * a_nm / hbar_c * z.plasma_frequency : 0.0;
        const detail::ZeroModeTe te{m.magnetic.mu0, w};
        return {z.plasma_frequency > 0.0 ? 1.0 : 0.0, te(y)};
    }
    const double xi = matsubara_frequency(thermal.temperature_k, l);
    const double y_l = 2.0 * a_nm / hbar_c * xi;
    const double eps = eps_imag(m, xi);
    const double k = std::sqrt(y * y + (eps - 1.0) * y_l * y_l);
    return {(eps * y - k) / (eps * y + k), (y - k) / (y + k)};
}

// Pressure between parallel plates of materials m1, m2 at separation a (nm),
// in Pa. Negative = attractive.
inline double plate_pressure(const Material& m1, const Material& m2, double a_nm,
                             const ThermalState& thermal, const QuadratureConfig& quad = {}) {
    const double sum = detail::lifshitz_sum(m1, m2, a_nm, thermal, quad);
    const double kt = k_boltzmann * thermal.temperature_k;
    const double p_ev_nm3 = -(kt / (8.0 * pi * a_nm * a_nm * a_nm)) * sum;
    return p_ev_nm3 * ev_per_nm3_to_pa;
}

// Sphere-plate force gradient F'(a) = 2 pi R |P(a)| in the proximity-force
// approximation, in uN/m (R in um enters linearly; |P| in Pa).
inline double force_gradient(const Material& sphere, const Material& plate,
                             const Geometry& geom, const ThermalState& thermal,
                             const QuadratureConfig& quad = {}) {
    const double p = plate_pressure(sphere, plate, geom.separation_nm, thermal, quad);
    return 2.0 * pi * geom.sphere_radius_um * std::abs(p);
}

struct TheoryPoint {
    double separation_nm;
    double gradient;       // uN/m
    double gradient_error; // uN/m, >= 0
};

struct TheoryCurve {
    std::string label;
    bool interpolated = false; // true when resampled onto a foreign grid
    std::vector<TheoryPoint> points;
};

// Theory error model: nothing, a constant percentage of the gradient, or
// per-point absolute errors matching the separation grid.
using TheoryErrorSpec = std::variant<std::monostate, double, std::vector<double>>;

inline TheoryCurve theory_curve(const Material& sphere, const Material& plate,
                                double sphere_radius_um, const ThermalState& thermal,
                                const std::vector<double>& separations_nm,
                                const QuadratureConfig& quad = {},
                                const TheoryErrorSpec& error_spec = {},
                                std::string label = {}) {
    if (separations_nm.empty())
        throw std::domain_error("theory_curve: empty separation grid");
    for (std::size_t i = 0; i < separations_nm.size(); ++i) {
        if (!(separations_nm[i] > 0.0))
            throw std::domain_error("theory_curve: separations must be > 0");
        if (i > 0 && !(separations_nm[i] > separations_nm[i - 1]))
            throw std::domain_error("theory_curve: separations must increase strictly");
    }
    if (const auto* per_point = std::get_if<std::vector<double>>(&error_spec)) {
        if (per_point->size() != separations_nm.size())
            throw std::domain_error("theory_curve: per-point error list does not match grid");
        for (double e : *per_point)
            if (!(e >= 0.0)) throw std::domain_error("theory_curve: errors must be >= 0");
    }
    if (const auto* pct = std::get_if<double>(&error_spec)) {
        if (!(*pct >= 0.0)) throw std::domain_error("theory_curve: error percentage must be >= 0");
    }

    TheoryCurve curve;
    curve.label = label.empty() ? sphere.name + ":" + plate.name : std::move(label);
    curve.points.reserve(separations_nm.size());

    std::unordered_map<int, double> cache1, cache2;
    const double kt = k_boltzmann * thermal.temperature_k;
    for (std::size_t i = 0; i < separations_nm.size(); ++i) {
        const double a = separations_nm[i];
        const double sum = detail::lifshitz_sum(sphere, plate, a, thermal, quad, &cache1, &cache2);
        const double p_pa = -(kt / (8.0 * pi * a * a * a)) * sum * ev_per_nm3_to_pa;
        const double grad = 2.0 * pi * sphere_radius_um * std::abs(p_pa);
        double err = 0.0;
        if (const auto* pct = std::get_if<double>(&error_spec))
            err = *pct / 100.0 * grad;
        else if (const auto* per_point = std::get_if<std::vector<double>>(&error_spec))
            err = (*per_point)[i];
        curve.points.push_back({a, grad, err});
    }
    return curve;
}

} // namespace casimir
