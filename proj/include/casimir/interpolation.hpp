#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace casimir {

// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).
// Used to resample external theory curves onto a dataset grid: preserves
// monotone runs, never overshoots, C1 everywhere.
class PchipInterpolant {
public:
    PchipInterpolant(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::domain_error("pchip: need matching x/y with at least 2 points");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::domain_error("pchip: abscissae must increase strictly");

        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }

        m_.assign(n, 0.0);
        if (n == 2) {
            m_[0] = m_[1] = delta[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) continue; // local extremum: flat slope
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
        m_[0] = endpoint_slope(h[0], h[1], delta[0], delta[1]);
        m_[n - 1] = endpoint_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

    double operator()(double xq) const {
        if (!(xq >= x_.front() && xq <= x_.back()))
            throw std::domain_error("pchip: query " + std::to_string(xq) + " outside [" +
                                    std::to_string(x_.front()) + ", " + std::to_string(x_.back()) +
                                    "]");
        std::size_t i = 0, j = x_.size() - 1;
        while (j - i > 1) {
            const std::size_t mid = (i + j) / 2;
            (x_[mid] <= xq ? i : j) = mid;
        }
        const double h = x_[i + 1] - x_[i];
        const double t = (xq - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[i] + (t3 - 2.0 * t2 + t) * h * m_[i] +
               (-2.0 * t3 + 3.0 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
    }

private:
    // Three-point one-sided slope, clamped so the end interval stays monotone.
    static double endpoint_slope(double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return m;
    }

    std::vector<double> x_, y_, m_;
};

} // namespace casimir
