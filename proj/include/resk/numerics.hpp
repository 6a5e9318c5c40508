#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "resk/errors.hpp"

namespace resk::numerics {

// Dense symmetric positive definite matrix with its lower Cholesky factor.
// The factor is computed eagerly so values are freely shareable across
// threads. Construction throws NotPositiveDefinite when a pivot fails.
class SpdMatrix {
public:
    // entries: row-major r*r, must be symmetric to 1e-12 relative.
    SpdMatrix(int dim, std::vector<double> entries);

    static SpdMatrix identity(int dim);
    static SpdMatrix diagonal(std::span<const double> diag);

    // Retries with diagonal jitter eps*trace/r, eps = 1e-8, escalating x10 at
    // most three times. EM scatter updates occasionally land marginally
    // outside the PD cone.
    static SpdMatrix with_jitter_repair(int dim, std::vector<double> entries);

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const std::vector<double>& entries() const { return a_; }
    const std::vector<double>& chol_lower() const { return chol_; }
    double log_det() const { return logdet_; }

    // x with A x = b.
    std::vector<double> solve(std::span<const double> b) const;
    // L y = b (forward substitution only); t = |y|^2 gives the quadratic form.
    void solve_lower_inplace(std::span<double> b) const;
    // Explicit inverse, row-major. Used to precompute per-cluster constants.
    std::vector<double> inverse() const;

    double quadratic_form(std::span<const double> x) const;

private:
    int dim_;
    std::vector<double> a_;
    std::vector<double> chol_;
    double logdet_;
};

std::vector<double> chol_solve(const SpdMatrix& a, std::span<const double> b);
double log_det(const SpdMatrix& a);

// Regularized lower incomplete gamma P(s, x); series for x < s+1, continued
// fraction otherwise.
double reg_inc_gamma_lower(double s, double x);
// Regularized upper Q(s, x) = 1 - P(s, x).
double reg_inc_gamma_upper(double s, double x);
// Unregularized upper incomplete gamma.
double upper_inc_gamma(double s, double x);

double chi2_cdf(int dof, double x);
// Inverse cdf; Wilson-Hilferty start, Newton polish, bisection safeguard.
double chi2_quantile(int dof, double q);

double erf(double x);
double std_normal_pdf(double x);
double std_normal_cdf(double x);
// Stable for large negative x (asymptotic continuation past the erfc
// underflow near x = -37).
double std_normal_log_cdf(double x);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double reg_inc_beta(double a, double b, double x);

double student_t_pdf(double nu, double x);
double student_t_log_pdf(double nu, double x);
double student_t_cdf(double nu, double x);
double student_t_log_cdf(double nu, double x);

} // namespace resk::numerics
