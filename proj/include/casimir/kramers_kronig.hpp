#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

// Tabulated optical data: rows of (omega [eV], n1, n2) with Im eps(omega) = 2 n1 n2.
// The permittivity along the imaginary axis follows from the Kramers-Kronig
// transform
//     eps(i xi) = 1 + (2/pi) \int_0^inf omega Im eps(omega) / (omega^2 + xi^2) d omega.
// Below the first tabulated frequency the integrand is continued with either a
// Drude tail (closed form) or, for the plasma-like prescription, dropped in
// favour of an explicit +wp^2/xi^2 pole. Above the last tabulated frequency
// Im eps of a conductor falls off like omega^-3, so for tables reaching
// ~1e4 eV the truncated tail is far below the quadrature tolerance.

struct TableRow {
    double omega; // eV
    double n1;    // refractive index, > 0
    double n2;    // extinction coefficient, >= 0
};

struct DrudeExtrapolation {
    double plasma_frequency; // eV
    double relaxation;       // eV
};

struct PlasmaExtrapolation {
    double plasma_frequency; // eV
};

using Extrapolation = std::variant<std::monostate, DrudeExtrapolation, PlasmaExtrapolation>;

class OpticalTable {
public:
    OpticalTable(std::vector<TableRow> rows, Extrapolation extrapolation = {})
        : rows_(std::move(rows)), extrapolation_(extrapolation) {
        if (rows_.size() < 2)
            throw input_error("optical table: need at least 2 rows, got " +
                              std::to_string(rows_.size()));
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& r = rows_[i];
            const std::string at = "optical table row " + std::to_string(i + 1);
            if (!(r.omega > 0.0)) throw input_error(at + ", column omega_eV: must be > 0");
            if (!(r.n1 > 0.0)) throw input_error(at + ", column n1: must be > 0");
            if (r.n2 < 0.0) throw input_error(at + ", column n2: must be >= 0");
            if (i > 0 && !(r.omega > rows_[i - 1].omega))
                throw input_error(at + ", column omega_eV: frequencies must increase strictly");
        }
        if (const auto* d = std::get_if<DrudeExtrapolation>(&extrapolation_)) {
            if (!(d->plasma_frequency >= 0.0) || !(d->relaxation > 0.0))
                throw input_error("optical table: drude extrapolation needs wp >= 0, gamma > 0");
        } else if (const auto* p = std::get_if<PlasmaExtrapolation>(&extrapolation_)) {
            if (!(p->plasma_frequency >= 0.0))
                throw input_error("optical table: plasma extrapolation needs wp >= 0");
        }
        im_eps_.reserve(rows_.size());
        for (const auto& r : rows_) im_eps_.push_back(2.0 * r.n1 * r.n2);
    }

    const std::vector<TableRow>& rows() const { return rows_; }
    const Extrapolation& extrapolation() const { return extrapolation_; }
    double im_eps(std::size_t i) const { return im_eps_[i]; }
    double omega_min() const { return rows_.front().omega; }
    double omega_max() const { return rows_.back().omega; }

private:
    std::vector<TableRow> rows_;
    Extrapolation extrapolation_;
    std::vector<double> im_eps_; // 2 n1 n2 per row
};

namespace detail {

// \int omega Im_eps_drude / (omega^2 + xi^2) d omega over [0, w0], closed form.
// Im eps_drude = wp^2 gamma / (omega (omega^2 + gamma^2)), so the integrand is
// wp^2 gamma / ((omega^2 + gamma^2)(omega^2 + xi^2)) and partial fractions give
// (wp^2 gamma / (xi^2 - gamma^2)) [atan(w/gamma)/gamma - atan(w/xi)/xi].
inline double drude_head_integral(double wp, double gamma, double xi, double w0) {
    const double d = xi * xi - gamma * gamma;
    if (std::abs(d) < 1e-12 * xi * xi) {
        // xi ~ gamma: \int dw/ (w^2+g^2)^2 = w/(2g^2(w^2+g^2)) + atan(w/g)/(2g^3)
        const double g = gamma;
        return wp * wp * g *
               (w0 / (2.0 * g * g * (w0 * w0 + g * g)) + std::atan(w0 / g) / (2.0 * g * g * g));
    }
    return wp * wp * gamma / d * (std::atan(w0 / gamma) / gamma - std::atan(w0 / xi) / xi);
}

// Integrand of the KK transform between two table rows. Im eps is interpolated
// with a power law in omega (linear when an endpoint vanishes), which tracks
// the steep conductor data far better than polynomials.
struct KkSegment {
    double w0, w1, f0, f1, p; // p = power-law exponent, NaN => linear

    double im_eps(double w) const {
        if (std::isnan(p)) { // linear
            const double t = (w - w0) / (w1 - w0);
            return f0 + (f1 - f0) * t;
        }
        return f0 * std::pow(w / w0, p);
    }
    double integrand(double w, double xi) const { return w * im_eps(w) / (w * w + xi * xi); }
};

inline double simpson(const KkSegment& s, double xi, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (s.integrand(a, xi) + 4.0 * s.integrand(m, xi) + s.integrand(b, xi));
}

inline double adaptive_simpson(const KkSegment& s, double xi, double a, double b, double whole,
                               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(s, xi, a, m);
    const double right = simpson(s, xi, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(s, xi, a, m, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(s, xi, m, b, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Permittivity at imaginary frequency i*xi from tabulated data (xi in eV, > 0).
inline double eps_table_imag(const OpticalTable& table, double xi, double rel_tol = 1e-6) {
    if (!(xi > 0.0)) throw std::domain_error("eps_table_imag: xi must be > 0");

    const auto& rows = table.rows();
    double core = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double f0 = table.im_eps(i), f1 = table.im_eps(i + 1);
        if (f0 == 0.0 && f1 == 0.0) continue;
        detail::KkSegment seg{rows[i].omega, rows[i + 1].omega, f0, f1,
                              std::numeric_limits<double>::quiet_NaN()};
        if (f0 > 0.0 && f1 > 0.0)
            seg.p = std::log(f1 / f0) / std::log(seg.w1 / seg.w0);
        const double crude = detail::simpson(seg, xi, seg.w0, seg.w1);
        core += detail::adaptive_simpson(seg, xi, seg.w0, seg.w1, crude,
                                         std::abs(crude) * rel_tol + 1e-300, 24);
    }

    double head = 0.0;
    double pole = 0.0;
    if (const auto* d = std::get_if<DrudeExtrapolation>(&table.extrapolation())) {
        head = detail::drude_head_integral(d->plasma_frequency, d->relaxation, xi,
                                           table.omega_min());
    } else if (const auto* p = std::get_if<PlasmaExtrapolation>(&table.extrapolation())) {
        pole = p->plasma_frequency * p->plasma_frequency / (xi * xi);
    }

    return 1.0 + pole + (2.0 / pi) * (head + core);
}

} // namespace casimir
