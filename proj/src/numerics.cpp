#include "resk/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace resk::numerics {

namespace {

// Lower Cholesky of a row-major symmetric matrix. Returns false on a
// non-positive pivot.
bool cholesky(int n, const std::vector<double>& a, std::vector<double>& l) {
    l.assign(static_cast<size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j) {
        double d = a[static_cast<size_t>(j) * n + j];
        for (int k = 0; k < j; ++k) d -= l[static_cast<size_t>(j) * n + k] * l[static_cast<size_t>(j) * n + k];
        if (!(d > 0.0)) return false;
        const double ljj = std::sqrt(d);
        l[static_cast<size_t>(j) * n + j] = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = a[static_cast<size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) s -= l[static_cast<size_t>(i) * n + k] * l[static_cast<size_t>(j) * n + k];
            l[static_cast<size_t>(i) * n + j] = s / ljj;
        }
    }
    return true;
}

void check_symmetric(int n, const std::vector<double>& a) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = std::abs(a[static_cast<size_t>(i) * n + j] - a[static_cast<size_t>(j) * n + i]);
            if (d > 1e-12 * scale)
                throw NotPositiveDefinite("matrix is not symmetric");
        }
}

} // namespace

SpdMatrix::SpdMatrix(int dim, std::vector<double> entries) : dim_(dim), a_(std::move(entries)) {
    if (dim <= 0 || a_.size() != static_cast<size_t>(dim) * dim)
        throw DimensionMismatch("SpdMatrix: bad entry count");
    check_symmetric(dim_, a_);
    if (!cholesky(dim_, a_, chol_))
        throw NotPositiveDefinite("Cholesky pivot <= 0");
    logdet_ = 0.0;
    for (int i = 0; i < dim_; ++i) logdet_ += std::log(chol_[static_cast<size_t>(i) * dim_ + i]);
    logdet_ *= 2.0;
}

SpdMatrix SpdMatrix::identity(int dim) {
    std::vector<double> a(static_cast<size_t>(dim) * dim, 0.0);
    for (int i = 0; i < dim; ++i) a[static_cast<size_t>(i) * dim + i] = 1.0;
    return SpdMatrix(dim, std::move(a));
}

SpdMatrix SpdMatrix::diagonal(std::span<const double> diag) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) a[static_cast<size_t>(i) * n + i] = diag[i];
    return SpdMatrix(n, std::move(a));
}

SpdMatrix SpdMatrix::with_jitter_repair(int dim, std::vector<double> entries) {
    double trace = 0.0;
    for (int i = 0; i < dim; ++i) trace += entries[static_cast<size_t>(i) * dim + i];
    double eps = 1e-8;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        try {
            return SpdMatrix(dim, entries);
        } catch (const NotPositiveDefinite&) {
            if (attempt == 3) throw;
            const double bump = eps * std::max(std::abs(trace), 1e-300) / dim;
            for (int i = 0; i < dim; ++i) entries[static_cast<size_t>(i) * dim + i] += bump;
            eps *= 10.0;
        }
    }
    throw NotPositiveDefinite("jitter repair failed");
}

std::vector<double> SpdMatrix::solve(std::span<const double> b) const {
    if (static_cast<int>(b.size()) != dim_)
        throw DimensionMismatch("chol_solve: vector length");
    std::vector<double> x(b.begin(), b.end());
    const int n = dim_;
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int k = 0; k < i; ++k) s -= chol_[static_cast<size_t>(i) * n + k] * x[k];
        x[i] = s / chol_[static_cast<size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= chol_[static_cast<size_t>(k) * n + i] * x[k];
        x[i] = s / chol_[static_cast<size_t>(i) * n + i];
    }
    return x;
}

void SpdMatrix::solve_lower_inplace(std::span<double> b) const {
    const int n = dim_;
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= chol_[static_cast<size_t>(i) * n + k] * b[k];
        b[i] = s / chol_[static_cast<size_t>(i) * n + i];
    }
}

std::vector<double> SpdMatrix::inverse() const {
    const int n = dim_;
    std::vector<double> inv(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        const auto col = solve(e);
        for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i) * n + j] = col[i];
    }
    // enforce exact symmetry of the result
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = 0.5 * (inv[static_cast<size_t>(i) * n + j] + inv[static_cast<size_t>(j) * n + i]);
            inv[static_cast<size_t>(i) * n + j] = v;
            inv[static_cast<size_t>(j) * n + i] = v;
        }
    return inv;
}

double SpdMatrix::quadratic_form(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw DimensionMismatch("quadratic_form: vector length");
    std::vector<double> y(x.begin(), x.end());
    solve_lower_inplace(y);
    double t = 0.0;
    for (double v : y) t += v * v;
    return t;
}

std::vector<double> chol_solve(const SpdMatrix& a, std::span<const double> b) {
    return a.solve(b);
}

double log_det(const SpdMatrix& a) { return a.log_det(); }

namespace {

constexpr int kMaxIter = 500;
const double kEps = std::numeric_limits<double>::epsilon();
const double kFpMin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();

// Series for P(s, x), valid for x < s + 1.
double gamma_p_series(double s, double x) {
    double ap = s;
    double sum = 1.0 / s;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps)
            return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw NoConvergence("incomplete gamma series");
}

// Continued fraction for Q(s, x), valid for x >= s + 1.
double gamma_q_cf(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
    }
    throw NoConvergence("incomplete gamma continued fraction");
}

} // namespace

double reg_inc_gamma_lower(double s, double x) {
    if (s <= 0.0) throw DomainError("reg_inc_gamma_lower: s <= 0");
    if (x < 0.0) throw DomainError("reg_inc_gamma_lower: x < 0");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return gamma_p_series(s, x);
    return 1.0 - gamma_q_cf(s, x);
}

double reg_inc_gamma_upper(double s, double x) {
    if (s <= 0.0) throw DomainError("reg_inc_gamma_upper: s <= 0");
    if (x < 0.0) throw DomainError("reg_inc_gamma_upper: x < 0");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_cf(s, x);
}

double upper_inc_gamma(double s, double x) {
    return std::exp(std::lgamma(s)) * reg_inc_gamma_upper(s, x);
}

double chi2_cdf(int dof, double x) {
    if (dof <= 0) throw DomainError("chi2_cdf: dof <= 0");
    if (x < 0.0) throw DomainError("chi2_cdf: x < 0");
    return reg_inc_gamma_lower(0.5 * dof, 0.5 * x);
}

double chi2_quantile(int dof, double q) {
    if (dof <= 0) throw DomainError("chi2_quantile: dof <= 0");
    if (!(q > 0.0 && q < 1.0)) throw DomainError("chi2_quantile: q outside (0,1)");

    // Wilson-Hilferty start
    const double z = [&] {
        // Acklam-style inverse normal via Newton on std_normal_cdf would be
        // circular here; a crude rational start is enough, the bracketed
        // Newton below does the real work.
        double lo = -40.0, hi = 40.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (std_normal_cdf(mid) < q ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    const double k = static_cast<double>(dof);
    double x = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3.0);
    if (!(x > 0.0)) x = 0.5;

    double lo = 0.0, hi = std::max(4.0 * x, 1.0);
    while (chi2_cdf(dof, hi) < q) {
        hi *= 2.0;
        if (hi > 1e12) throw NoConvergence("chi2_quantile: bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double f = chi2_cdf(dof, x) - q;
        if (f > 0.0) hi = x; else lo = x;
        // pdf of chi^2_k
        const double pdf = std::exp((0.5 * k - 1.0) * std::log(x) - 0.5 * x -
                                    std::lgamma(0.5 * k) - 0.5 * k * std::log(2.0));
        double next = x - f / pdf;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-12 * std::max(1.0, x)) return next;
        x = next;
    }
    if (hi - lo < 1e-9 * std::max(1.0, x)) return x;
    throw NoConvergence("chi2_quantile: Newton/bisection");
}

double erf(double x) {
    // odd by construction
    const double v = std::erf(std::abs(x));
    return std::signbit(x) ? -v : v;
}

double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double std_normal_log_cdf(double x) {
    if (x > -20.0) return std::log(std_normal_cdf(x));
    // Phi(x) = phi(x)/(-x) (1 - 1/x^2 + 3/x^4 - 15/x^6 ...)
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x * x - 0.5 * std::log(2.0 * M_PI) - std::log(-x) + std::log(series);
}

namespace {

double beta_cf(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) return h;
    }
    throw NoConvergence("incomplete beta continued fraction");
}

double log_reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    if (x >= 1.0) return 0.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double lfront = a * std::log(x) + b * std::log1p(-x) - lbeta;
    if (x < (a + 1.0) / (a + b + 2.0))
        return lfront + std::log(beta_cf(a, b, x) / a);
    return std::log1p(-std::exp(lfront) * beta_cf(b, a, 1.0 - x) / b);
}

} // namespace

double reg_inc_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw DomainError("reg_inc_beta: a, b must be positive");
    if (x < 0.0 || x > 1.0) throw DomainError("reg_inc_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_pdf(double nu, double x) {
    return std::exp(student_t_log_pdf(nu, x));
}

double student_t_log_pdf(double nu, double x) {
    if (nu <= 0.0) throw DomainError("student_t_pdf: nu <= 0");
    return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
           0.5 * std::log(M_PI * nu) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double student_t_cdf(double nu, double x) {
    if (nu <= 0.0) throw DomainError("student_t_cdf: nu <= 0");
    if (x == 0.0) return 0.5;
    const double u = nu / (nu + x * x);
    const double tail = 0.5 * reg_inc_beta(0.5 * nu, 0.5, u);
    return x > 0.0 ? 1.0 - tail : tail;
}

double student_t_log_cdf(double nu, double x) {
    if (nu <= 0.0) throw DomainError("student_t_log_cdf: nu <= 0");
    if (x >= 0.0) return std::log(student_t_cdf(nu, x));
    const double u = nu / (nu + x * x);
    return log_reg_inc_beta(0.5 * nu, 0.5, u) + std::log(0.5);
}

} // namespace resk::numerics
