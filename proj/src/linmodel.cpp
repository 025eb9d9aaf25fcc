#include "asiaudit/linmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asiaudit/errors.hpp"
#include "asiaudit/numeric.hpp"

namespace asiaudit {

namespace {

constexpr double kRankTolerance = 1e-10;  // pivot threshold vs largest pivot

double compensated_dot_from(const std::vector<double>& a,
                            const std::vector<double>& b, std::size_t start) {
    CompensatedSum s;
    const std::size_t n = a.size();
    for (std::size_t i = start; i < n; ++i)
        s.add(a[i] * b[i]);
    return s.value();
}

/// Householder QR of an n x k column-major matrix, in place. Column j ends
/// up holding the reflector vector below the diagonal and the R column
/// above it; diag[j] receives r_jj. Reflections are also applied to y.
void householder_qr(std::vector<std::vector<double>>& a, std::vector<double>& y,
                    std::vector<double>& diag) {
    const std::size_t k = a.size();
    const std::size_t n = y.size();
    diag.assign(k, 0.0);

    for (std::size_t j = 0; j < k; ++j) {
        auto& col = a[j];
        const double norm = std::sqrt(compensated_dot_from(col, col, j));
        if (norm == 0.0) {
            diag[j] = 0.0;  // exactly zero pivot column; no reflection
            continue;
        }
        const double alpha = col[j] > 0.0 ? -norm : norm;
        diag[j] = alpha;
        col[j] -= alpha;  // col[j..n) is now the reflector v
        const double vtv = compensated_dot_from(col, col, j);
        if (vtv == 0.0)
            continue;
        for (std::size_t c = j + 1; c < k; ++c) {
            const double scale = 2.0 * compensated_dot_from(col, a[c], j) / vtv;
            for (std::size_t i = j; i < n; ++i)
                a[c][i] -= scale * col[i];
        }
        const double yscale = 2.0 * compensated_dot_from(col, y, j) / vtv;
        for (std::size_t i = j; i < n; ++i)
            y[i] -= yscale * col[i];
    }
}

/// Upper-triangular inverse of R (k x k) given the factored columns.
/// r_ij = a[j][i] for i < j, r_jj = diag[j].
std::vector<std::vector<double>> invert_r(const std::vector<std::vector<double>>& a,
                                          const std::vector<double>& diag) {
    const std::size_t k = diag.size();
    std::vector<std::vector<double>> rinv(k, std::vector<double>(k, 0.0));
    for (std::size_t col = 0; col < k; ++col) {
        // solve R x = e_col by back substitution
        for (std::size_t ii = k; ii-- > 0;) {
            double s = (ii == col) ? 1.0 : 0.0;
            for (std::size_t jj = ii + 1; jj < k; ++jj)
                s -= a[jj][ii] * rinv[col][jj];
            rinv[col][ii] = s / diag[ii];
        }
    }
    return rinv;  // rinv[col][row] = (R^-1)_{row, col}
}

} // namespace

const char* to_string(Regressor r) {
    switch (r) {
    case Regressor::intercept: return "intercept";
    case Regressor::cf: return "cf";
    case Regressor::ducf: return "ducf";
    }
    return "?";
}

void DesignSpec::validate() const {
    if (regressors.empty())
        throw ConfigError("design spec has no regressors");
    for (std::size_t i = 0; i < regressors.size(); ++i) {
        for (std::size_t j = i + 1; j < regressors.size(); ++j)
            if (regressors[i] == regressors[j])
                throw ConfigError("duplicate regressor in design spec");
        if (i > 0 && regressors[i] == Regressor::intercept)
            throw ConfigError("intercept must be the first regressor");
    }
}

RegressionResult ols_fit(const std::vector<std::vector<double>>& columns,
                         std::span<const double> y, bool has_intercept) {
    const std::size_t k = columns.size();
    const std::size_t n = y.size();
    if (k == 0)
        throw ConfigError("design matrix has no columns");
    for (const auto& col : columns)
        if (col.size() != n)
            throw ConfigError("design column length does not match y");
    if (n <= k)
        throw TooFewObservationsError("need n > k, got n = " + std::to_string(n) +
                                      ", k = " + std::to_string(k));

    std::vector<std::vector<double>> work = columns;
    std::vector<double> qty(y.begin(), y.end());
    std::vector<double> diag;
    householder_qr(work, qty, diag);

    double max_pivot = 0.0;
    for (double d : diag)
        max_pivot = std::max(max_pivot, std::abs(d));
    for (std::size_t j = 0; j < k; ++j)
        if (std::abs(diag[j]) <= kRankTolerance * max_pivot)
            throw RankDeficientError(
                "design column " + std::to_string(j) + " is collinear (pivot " +
                std::to_string(diag[j]) + " vs largest " +
                std::to_string(max_pivot) + ")");

    // back substitution: R beta = (Q^T y)[0..k)
    std::vector<double> beta(k, 0.0);
    for (std::size_t ii = k; ii-- > 0;) {
        double s = qty[ii];
        for (std::size_t jj = ii + 1; jj < k; ++jj)
            s -= work[jj][ii] * beta[jj];
        beta[ii] = s / diag[ii];
    }

    // residuals from the original columns
    RegressionResult res;
    res.coefficients = beta;
    res.n = static_cast<long long>(n);
    res.k = static_cast<long long>(k);

    CompensatedSum rss_sum;
    for (std::size_t i = 0; i < n; ++i) {
        double fitted = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            fitted += columns[j][i] * beta[j];
        const double e = y[i] - fitted;
        rss_sum.add(e * e);
    }
    res.rss = rss_sum.value();

    if (has_intercept) {
        const double mean = compensated_sum(y) / static_cast<double>(n);
        CompensatedSum tss_sum;
        for (double v : y) {
            const double d = v - mean;
            tss_sum.add(d * d);
        }
        res.tss = tss_sum.value();
        res.uncentered_r2 = false;
    } else {
        CompensatedSum tss_sum;
        for (double v : y)
            tss_sum.add(v * v);
        res.tss = tss_sum.value();
        res.uncentered_r2 = true;
    }
    if (res.tss > 0.0) {
        res.r2 = 1.0 - res.rss / res.tss;
        if (res.r2 < 0.0 && res.r2 > -1e-12)
            res.r2 = 0.0;  // rounding guard for null fits
    } else {
        res.r2 = 0.0;
    }

    const double df_resid = static_cast<double>(n - k);
    const double sigma2 = res.rss / df_resid;

    // (X^T X)^-1 = R^-1 R^-T from the triangular factor
    const auto rinv = invert_r(work, diag);
    res.std_errors.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        CompensatedSum c;
        for (std::size_t l = j; l < k; ++l)
            c.add(rinv[l][j] * rinv[l][j]);
        res.std_errors[j] = std::sqrt(sigma2 * c.value());
    }

    res.t_stats.resize(k);
    res.p_values.resize(k);
    res.sig_1pct.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (res.std_errors[j] > 0.0)
            res.t_stats[j] = res.coefficients[j] / res.std_errors[j];
        else
            res.t_stats[j] = res.coefficients[j] == 0.0
                                 ? 0.0
                                 : std::copysign(
                                       std::numeric_limits<double>::infinity(),
                                       res.coefficients[j]);
        res.p_values[j] = t_two_sided_p(res.t_stats[j], df_resid);
        res.sig_1pct[j] = res.p_values[j] < 0.01;
    }

    // overall F: joint significance of the non-intercept regressors;
    // (R2/df_model)/((1-R2)/df_resid) evaluated through RSS/TSS to keep
    // precision when the fit is near perfect
    const double df_model =
        has_intercept ? static_cast<double>(k - 1) : static_cast<double>(k);
    if (df_model <= 0.0) {
        res.overall_f = 0.0;
        res.overall_f_pvalue = 1.0;
    } else if (res.rss > 0.0) {
        const double explained = std::max(res.tss - res.rss, 0.0);
        res.overall_f = (explained / df_model) / (res.rss / df_resid);
        res.overall_f_pvalue = f_sf(res.overall_f, df_model, df_resid);
    } else if (res.tss > 0.0) {
        res.overall_f = std::numeric_limits<double>::infinity();
        res.overall_f_pvalue = 0.0;
    } else {
        res.overall_f = 0.0;
        res.overall_f_pvalue = 1.0;
    }
    return res;
}

RegressionResult ols_fit(std::span<const Observation> observations,
                         const DesignSpec& spec) {
    spec.validate();
    const std::size_t n = observations.size();

    const bool has_ducf =
        std::find(spec.regressors.begin(), spec.regressors.end(), Regressor::ducf) !=
        spec.regressors.end();
    if (has_ducf && n > 0) {
        const int first = observations.front().dummy;
        bool all_equal = true;
        for (const auto& o : observations)
            if (o.dummy != first) {
                all_equal = false;
                break;
            }
        if (all_equal)
            throw DegenerateDummyError(first == 1 ? DummyDegeneracy::all_positive
                                                  : DummyDegeneracy::all_nonpositive);
    }

    std::vector<std::vector<double>> columns;
    columns.reserve(spec.regressors.size());
    for (Regressor r : spec.regressors) {
        std::vector<double> col(n);
        switch (r) {
        case Regressor::intercept:
            std::fill(col.begin(), col.end(), 1.0);
            break;
        case Regressor::cf:
            for (std::size_t i = 0; i < n; ++i)
                col[i] = observations[i].cf;
            break;
        case Regressor::ducf:
            for (std::size_t i = 0; i < n; ++i)
                col[i] = observations[i].ducf;
            break;
        }
        columns.push_back(std::move(col));
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = observations[i].inv;

    RegressionResult res = ols_fit(columns, y, spec.include_intercept());
    res.regressors.clear();
    for (Regressor r : spec.regressors)
        res.regressors.emplace_back(to_string(r));
    return res;
}

// ---- distribution functions -------------------------------------------------

namespace {

/// Continued fraction for the incomplete beta, modified Lentz.
double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-14;
    constexpr int max_iterations = 300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= eps)
            return h;
    }
    throw DomainError("incomplete beta continued fraction did not converge");
}

} // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw DomainError("incomplete beta requires a, b > 0");
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_cdf(double x, double df) {
    if (!(df > 0.0))
        throw DomainError("t_cdf requires df > 0");
    if (std::isinf(x))
        return x > 0.0 ? 1.0 : 0.0;
    if (x == 0.0)
        return 0.5;
    const double tail = 0.5 * reg_inc_beta(0.5 * df, 0.5, df / (df + x * x));
    return x > 0.0 ? 1.0 - tail : tail;
}

double f_cdf(double x, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw DomainError("f_cdf requires d1, d2 > 0");
    if (x < 0.0)
        throw DomainError("f_cdf requires x >= 0");
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    return reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

double f_sf(double x, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0))
        throw DomainError("f_sf requires d1, d2 > 0");
    if (x < 0.0)
        throw DomainError("f_sf requires x >= 0");
    if (x == 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    return reg_inc_beta(0.5 * d2, 0.5 * d1, d2 / (d1 * x + d2));
}

double t_two_sided_p(double t, double df) {
    if (!(df > 0.0))
        throw DomainError("t_two_sided_p requires df > 0");
    if (std::isinf(t))
        return 0.0;
    return reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
}

} // namespace asiaudit
