#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "casimir/errors.hpp"

namespace casimir {

// Model classification against measured gradients, working purely on the
// differences  d_i = F'_theor(a_i) - F'_expt(a_i)  and the two error budgets.
// Both errors describe uniform boxes (total, not statistical, errors), so the
// confidence interval for d under a correct model is |d| <= Xi_beta with
//   Xi_beta = min{ D1 + D2,  k_beta sqrt(D1^2 + D2^2) },
// k_beta the two-sided beta-quantile of U(-D1,D1) + U(-D2,D2) scaled by
// 1/sqrt(D1^2+D2^2). The quantile has a closed form: with A = max(D1,D2),
// B = min(D1,D2), the density of the sum is a symmetric trapezoid, giving
//   q_beta = beta A                        for beta <= (A-B)/A,
//   q_beta = A + B - 2 sqrt(A B (1-beta))  otherwise.
// (q_beta <= D1 + D2 always, so the min{} cap binds only as beta -> 1.)

struct DifferencePoint {
    double separation_nm;
    double difference;       // uN/m, theory minus experiment
    double theory_error;     // uN/m, >= 0
    double experiment_error; // uN/m, >= 0
};

// Two-sided beta-quantile of the summed uniform error boxes, in uN/m.
inline double confidence_quantile(double beta, double d1, double d2) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("confidence_quantile: beta must be in (0, 1)");
    if (!(d1 >= 0.0 && d2 >= 0.0))
        throw std::domain_error("confidence_quantile: errors must be >= 0");
    const double a = std::max(d1, d2), b = std::min(d1, d2);
    if (a == 0.0) throw std::domain_error("confidence_quantile: both errors are zero");
    if (beta <= (a - b) / a) return beta * a;
    return a + b - 2.0 * std::sqrt(a * b * (1.0 - beta));
}

inline double k_coefficient(double beta, double d1, double d2) {
    return confidence_quantile(beta, d1, d2) / std::hypot(d1, d2);
}

// Confidence-interval half-width Xi_beta for one difference point.
inline double half_width(const DifferencePoint& p, double beta) {
    const double q = confidence_quantile(beta, p.theory_error, p.experiment_error);
    return std::min(p.theory_error + p.experiment_error, q);
}

struct ConfidenceBand {
    double beta;
    std::vector<double> separation_nm;
    std::vector<double> xi; // half-widths, uN/m
};

inline ConfidenceBand make_band(const std::vector<DifferencePoint>& points, double beta) {
    ConfidenceBand band;
    band.beta = beta;
    band.separation_nm.reserve(points.size());
    band.xi.reserve(points.size());
    for (const auto& p : points) {
        band.separation_nm.push_back(p.separation_nm);
        band.xi.push_back(half_width(p, beta));
    }
    return band;
}

enum class VerdictStatus { consistent, excluded, not_excluded };

inline const char* to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::consistent: return "consistent";
        case VerdictStatus::excluded: return "excluded";
        case VerdictStatus::not_excluded: return "not_excluded";
    }
    return "?";
}

struct Verdict {
    std::string model_label;
    double beta = 0.0;
    int window = 0;
    VerdictStatus status = VerdictStatus::consistent;
    double excluded_min_nm = 0.0; // meaningful when status == excluded
    double excluded_max_nm = 0.0;
    std::vector<double> window_fraction;   // inside-fraction per sliding window
    std::optional<double> agreement_level; // set by agreement_scan
};

// Classify a model at confidence level beta using sliding windows of `window`
// consecutive points. A point lies inside when |d| <= Xi_beta (ties count
// inside); a window fails when its inside fraction drops below beta; the model
// is excluded when any window fails, and the reported range spans the longest
// contiguous run of failing windows (the first such run on ties).
inline Verdict classify(const std::vector<DifferencePoint>& points, double beta, int window,
                        std::string model_label = {}) {
    if (window < 3) throw config_error("classify: window must be >= 3");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::domain_error("classify: beta must be in (0, 1)");
    if (points.size() < static_cast<std::size_t>(window))
        throw input_error("classify: " + std::to_string(points.size()) +
                          " points cannot fill a window of " + std::to_string(window));

    const std::size_t n = points.size(), w = static_cast<std::size_t>(window);
    std::vector<char> inside(n);
    for (std::size_t i = 0; i < n; ++i)
        inside[i] = std::abs(points[i].difference) <= half_width(points[i], beta) ? 1 : 0;

    Verdict v;
    v.model_label = std::move(model_label);
    v.beta = beta;
    v.window = window;
    v.window_fraction.reserve(n - w + 1);

    int count = 0;
    for (std::size_t i = 0; i < w; ++i) count += inside[i];
    for (std::size_t k = 0;; ++k) {
        v.window_fraction.push_back(static_cast<double>(count) / static_cast<double>(w));
        if (k + w >= n) break;
        count += inside[k + w] - inside[k];
    }

    // Longest contiguous run of failing windows (fraction < beta).
    std::size_t best_begin = 0, best_len = 0, run_begin = 0, run_len = 0;
    for (std::size_t k = 0; k < v.window_fraction.size(); ++k) {
        if (v.window_fraction[k] < beta) {
            if (run_len == 0) run_begin = k;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_begin = run_begin;
            }
        } else {
            run_len = 0;
        }
    }

    if (best_len == 0) {
        v.status = VerdictStatus::consistent;
    } else {
        v.status = VerdictStatus::excluded;
        v.excluded_min_nm = points[best_begin].separation_nm;
        v.excluded_max_nm = points[best_begin + best_len - 1 + w - 1].separation_nm;
    }
    return v;
}

// Walk the beta grid upward and return the first level at which the model is
// not excluded; agreement_level = 1 - beta*. If every level excludes the
// model, the verdict at the highest level is returned (agreement unset).
inline Verdict agreement_scan(const std::vector<DifferencePoint>& points,
                              const std::vector<double>& beta_grid, int window,
                              std::string model_label = {}) {
    if (beta_grid.empty()) throw config_error("agreement_scan: empty beta grid");
    for (std::size_t i = 0; i < beta_grid.size(); ++i) {
        if (!(beta_grid[i] > 0.0 && beta_grid[i] < 1.0))
            throw config_error("agreement_scan: beta grid values must be in (0, 1)");
        if (i > 0 && !(beta_grid[i] > beta_grid[i - 1]))
            throw config_error("agreement_scan: beta grid must increase strictly");
    }
    Verdict last;
    for (double beta : beta_grid) {
        last = classify(points, beta, window, model_label);
        if (last.status != VerdictStatus::excluded) {
            last.status = VerdictStatus::not_excluded;
            last.agreement_level = 1.0 - beta;
            return last;
        }
    }
    return last;
}

} // namespace casimir
