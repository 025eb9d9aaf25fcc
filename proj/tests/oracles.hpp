// Test-only oracles, deliberately independent of the library's numerical
// paths: OLS by brute-force normal equations with Gaussian elimination,
// distribution CDFs by adaptive quadrature of the density, and percentiles
// by direct full-sort interpolation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracles {

// ---- dense normal-equations OLS ---------------------------------------------

struct OlsOracleResult {
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    double rss = 0.0;
    double tss = 0.0;
    double r2 = 0.0;
};

/// Solve A x = b by Gaussian elimination with partial pivoting. A is k x k
/// row-major, modified in place.
inline std::vector<double> solve_gauss(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const std::size_t k = b.size();
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
                pivot = r;
        if (a[pivot][col] == 0.0)
            throw std::runtime_error("oracle: singular normal equations");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < k; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < k; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(k, 0.0);
    for (std::size_t r = k; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < k; ++c)
            s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

/// k x k inverse via Gaussian elimination column by column.
inline std::vector<std::vector<double>> invert_gauss(
    const std::vector<std::vector<double>>& a) {
    const std::size_t k = a.size();
    std::vector<std::vector<double>> inv(k, std::vector<double>(k, 0.0));
    for (std::size_t col = 0; col < k; ++col) {
        std::vector<double> e(k, 0.0);
        e[col] = 1.0;
        const auto x = solve_gauss(a, e);
        for (std::size_t r = 0; r < k; ++r)
            inv[r][col] = x[r];
    }
    return inv;
}

/// Brute-force OLS: forms X^T X and X^T y in plain double loops, solves the
/// normal equations, and derives the variance matrix from the explicit
/// inverse.
inline OlsOracleResult ols_normal_equations(
    const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
    bool has_intercept) {
    const std::size_t k = columns.size();
    const std::size_t n = y.size();

    std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
    std::vector<double> xty(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                s += columns[i][r] * columns[j][r];
            xtx[i][j] = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            s += columns[i][r] * y[r];
        xty[i] = s;
    }

    OlsOracleResult res;
    res.coefficients = solve_gauss(xtx, xty);

    double rss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double fitted = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            fitted += columns[j][r] * res.coefficients[j];
        const double e = y[r] - fitted;
        rss += e * e;
    }
    res.rss = rss;

    double tss = 0.0;
    if (has_intercept) {
        double mean = 0.0;
        for (double v : y)
            mean += v;
        mean /= static_cast<double>(n);
        for (double v : y)
            tss += (v - mean) * (v - mean);
    } else {
        for (double v : y)
            tss += v * v;
    }
    res.tss = tss;
    res.r2 = tss > 0.0 ? 1.0 - rss / tss : 0.0;

    const double sigma2 = rss / static_cast<double>(n - k);
    const auto inv = invert_gauss(xtx);
    res.std_errors.resize(k);
    res.t_stats.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        res.std_errors[j] = std::sqrt(sigma2 * inv[j][j]);
        res.t_stats[j] =
            res.std_errors[j] > 0.0 ? res.coefficients[j] / res.std_errors[j] : 0.0;
    }
    return res;
}

/// Condition number of the symmetric positive matrix X^T X via cyclic Jacobi
/// eigenvalue iteration (k <= 3 in practice).
inline double xtx_condition(const std::vector<std::vector<double>>& columns) {
    const std::size_t k = columns.size();
    const std::size_t n = columns.empty() ? 0 : columns[0].size();
    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r)
                s += columns[i][r] * columns[j][r];
            a[i][j] = s;
        }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q)
                off += a[p][q] * a[p][q];
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) {
                if (a[p][q] == 0.0)
                    continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < k; ++r) {
                    const double arp = a[r][p], arq = a[r][q];
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < k; ++r) {
                    const double apr = a[p][r], aqr = a[q][r];
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
    }
    double lo = a[0][0], hi = a[0][0];
    for (std::size_t i = 1; i < k; ++i) {
        lo = std::min(lo, a[i][i]);
        hi = std::max(hi, a[i][i]);
    }
    if (lo <= 0.0)
        return std::numeric_limits<double>::infinity();
    return hi / lo;
}

// ---- quadrature CDF oracles --------------------------------------------------

namespace detail {

template <typename F>
double simpson(F&& f, double a, double b, double fa, double fm, double fb,
               double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
        return left + right + delta / 15.0;
    return simpson(f, a, m, fa, flm, fm, 0.5 * eps, depth - 1) +
           simpson(f, m, b, fm, frm, fb, 0.5 * eps, depth - 1);
}

template <typename F>
double integrate(F&& f, double a, double b, double eps) {
    if (a == b)
        return 0.0;
    const double m = 0.5 * (a + b);
    return simpson(f, a, b, f(a), f(m), f(b), eps, 60);
}

} // namespace detail

/// Student-t CDF by integrating the density from 0 to |x|.
inline double t_cdf_quadrature(double x, double df) {
    const double log_norm = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                            0.5 * std::log(df * 3.14159265358979323846);
    auto density = [&](double t) {
        return std::exp(log_norm - 0.5 * (df + 1.0) * std::log1p(t * t / df));
    };
    const double half = detail::integrate(density, 0.0, std::abs(x), 1e-13);
    return x >= 0.0 ? 0.5 + half : 0.5 - half;
}

/// F CDF by integrating the density on [0, x]; d1 < 2 uses the substitution
/// t = u^2 to remove the endpoint singularity.
inline double f_cdf_quadrature(double x, double d1, double d2) {
    if (x <= 0.0)
        return 0.0;
    const double log_norm = std::lgamma(0.5 * (d1 + d2)) - std::lgamma(0.5 * d1) -
                            std::lgamma(0.5 * d2) + 0.5 * d1 * std::log(d1 / d2);
    auto log_density_tail = [&](double t) {
        return (0.5 * d1 - 1.0) * std::log(t) -
               0.5 * (d1 + d2) * std::log1p(d1 * t / d2);
    };
    if (d1 >= 2.0) {
        auto density = [&](double t) {
            if (t == 0.0)
                return d1 == 2.0 ? std::exp(log_norm) : 0.0;
            return std::exp(log_norm + log_density_tail(t));
        };
        return detail::integrate(density, 0.0, x, 1e-13);
    }
    // t = u^2: integrand becomes 2 u^(d1-1) (1 + d1 u^2/d2)^(-(d1+d2)/2)
    auto density_u = [&](double u) {
        if (u == 0.0)
            return d1 == 1.0 ? 2.0 * std::exp(log_norm) : 0.0;
        return 2.0 * std::exp(log_norm + (d1 - 1.0) * std::log(u) -
                              0.5 * (d1 + d2) * std::log1p(d1 * u * u / d2));
    };
    return detail::integrate(density_u, 0.0, std::sqrt(x), 1e-13);
}

// ---- percentile by definition ------------------------------------------------

/// Hyndman–Fan type 7 percentile computed from scratch on a copy.
inline double percentile_by_sort(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 1)
        return values[0];
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n)
        return values[n - 1];
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

} // namespace oracles
