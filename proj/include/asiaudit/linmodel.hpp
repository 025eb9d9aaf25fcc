#pragma once

#include <span>
#include <string>
#include <vector>

#include "asiaudit/prep.hpp"

namespace asiaudit {

enum class Regressor { intercept, cf, ducf };

const char* to_string(Regressor r);

/// Ordered regressor list for a fit on Observations. The intercept, when
/// present, must come first.
struct DesignSpec {
    std::vector<Regressor> regressors;

    bool include_intercept() const {
        return !regressors.empty() && regressors.front() == Regressor::intercept;
    }

    void validate() const;  // non-empty, no duplicates, intercept first

    static DesignSpec restricted() {
        return {{Regressor::intercept, Regressor::cf}};
    }
    static DesignSpec unrestricted() {
        return {{Regressor::intercept, Regressor::cf, Regressor::ducf}};
    }
    static DesignSpec through_origin() { return {{Regressor::cf}}; }
};

/// OLS output. Vectors are indexed like the design columns. r2 is the
/// unadjusted 1 - RSS/TSS; TSS is about the mean when an intercept is
/// present, uncentered otherwise (flagged by uncentered_r2).
struct RegressionResult {
    std::vector<std::string> regressors;  // column labels
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;  // two-sided, t distribution with n-k df
    std::vector<bool> sig_1pct;    // p < 0.01

    double rss = 0.0;
    double tss = 0.0;
    double r2 = 0.0;
    bool uncentered_r2 = false;
    double overall_f = 0.0;
    double overall_f_pvalue = 1.0;
    long long n = 0;
    long long k = 0;
};

/// Least squares via Householder QR of the design matrix (columns given
/// column-major, including any ones column; `has_intercept` controls TSS
/// centering and the overall-F formula). All reductions are fixed-order
/// compensated sums, so identical inputs give bit-identical results.
/// Requires n > k and full column rank: a column whose QR pivot falls below
/// 1e-10 times the largest pivot raises RankDeficientError.
RegressionResult ols_fit(const std::vector<std::vector<double>>& columns,
                         std::span<const double> y, bool has_intercept);

/// Convenience overload: builds the design from `spec` over observations
/// with inv as the response. When the spec contains ducf and every dummy is
/// equal, throws DegenerateDummyError (ducf would be identically zero or
/// identical to cf).
RegressionResult ols_fit(std::span<const Observation> observations,
                         const DesignSpec& spec);

/// Student-t CDF via the regularized incomplete beta function.
/// df > 0 (DomainError otherwise). t_cdf(0, df) == 0.5 and
/// t_cdf(-x, df) == 1 - t_cdf(x, df) exactly.
double t_cdf(double x, double df);

/// F CDF via the regularized incomplete beta function. Requires x >= 0 and
/// d1, d2 > 0 (DomainError otherwise); f_cdf(0, ., .) == 0.
double f_cdf(double x, double d1, double d2);

/// Upper tail 1 - f_cdf(x, d1, d2), evaluated through the complementary
/// beta argument so tiny p-values keep full precision.
double f_sf(double x, double d1, double d2);

/// Two-sided t-test p-value, 2 * (1 - t_cdf(|t|, df)) without cancellation.
double t_two_sided_p(double t, double df);

/// Regularized incomplete beta I_x(a, b), continued fraction (modified
/// Lentz) with the symmetry switch at x = (a+1)/(a+b+2), convergence 1e-14,
/// at most 300 iterations.
double reg_inc_beta(double a, double b, double x);

} // namespace asiaudit
