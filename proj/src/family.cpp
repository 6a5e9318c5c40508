#include "resk/family.hpp"

#include <cmath>

namespace resk::family {

using numerics::chi2_cdf;
using numerics::chi2_quantile;

double fisher_b(int r, double c2) {
    if (!(c2 > 0.0)) throw DomainError("fisher_b: c2 <= 0");
    return chi2_cdf(r + 2, c2) + (c2 / r) * (1.0 - chi2_cdf(r, c2));
}

double huber_norm(int r, double c, double b) {
    const double c2 = c * c;
    if (!(c2 > 2.0 * b)) throw ConstraintViolated("huber_norm: requires c^2 > 2b");
    if (c2 == b * r) throw DivergentTail("huber_norm: c^2 = b r");
    const double half_r = 0.5 * r;
    const double head = std::pow(2.0 * b, half_r) * std::exp(std::lgamma(half_r)) *
                        numerics::reg_inc_gamma_lower(half_r, c2 / (2.0 * b));
    const double tail = 2.0 * b * std::pow(c, r) * std::exp(-c2 / (2.0 * b)) / (c2 - b * r);
    return std::exp(std::lgamma(half_r)) / std::pow(M_PI, half_r) / (head + tail);
}

FamilySpec FamilySpec::gaussian(int dim) {
    if (dim < 1) throw DomainError("FamilySpec: dim < 1");
    FamilySpec s;
    s.kind_ = Kind::Gaussian;
    s.dim_ = dim;
    return s;
}

FamilySpec FamilySpec::student_t(int dim, double nu) {
    if (dim < 1) throw DomainError("FamilySpec: dim < 1");
    if (!(nu > 0.0)) throw DomainError("FamilySpec: nu <= 0");
    FamilySpec s;
    s.kind_ = Kind::StudentT;
    s.dim_ = dim;
    s.nu_ = nu;
    return s;
}

FamilySpec FamilySpec::huber(int dim, double q_h, int quantile_dim) {
    if (dim < 1) throw DomainError("FamilySpec: dim < 1");
    if (!(q_h > 0.703 && q_h < 1.0))
        throw ConstraintViolated("FamilySpec: q_H must lie in (0.703, 1)");
    FamilySpec s;
    s.kind_ = Kind::Huber;
    s.dim_ = dim;
    s.q_h_ = q_h;
    const int qdim = quantile_dim > 0 ? quantile_dim : dim;
    s.c2_ = chi2_quantile(qdim, q_h);
    s.c_ = std::sqrt(s.c2_);
    s.b_ = fisher_b(dim, s.c2_);
    if (!(s.c2_ > 2.0 * s.b_))
        throw ConstraintViolated("FamilySpec: c^2/(2b) <= 1, tail integral diverges");
    s.ah_mv_ = huber_norm(dim, s.c_, s.b_);
    s.ah_1d_ = huber_norm(1, s.c_, s.b_);
    return s;
}

const char* FamilySpec::name() const {
    switch (kind_) {
        case Kind::Gaussian: return "gaussian";
        case Kind::StudentT: return "t";
        case Kind::Huber: return "huber";
    }
    return "?";
}

double log_g(const FamilySpec& spec, double t) {
    if (t < 0.0) throw DomainError("log_g: t < 0");
    const int r = spec.dim();
    switch (spec.kind()) {
        case Kind::Gaussian:
            return -0.5 * r * std::log(2.0 * M_PI) - 0.5 * t;
        case Kind::StudentT: {
            const double nu = spec.nu();
            return std::lgamma(0.5 * (nu + r)) - std::lgamma(0.5 * nu) -
                   0.5 * r * std::log(M_PI * nu) - 0.5 * (nu + r) * std::log1p(t / nu);
        }
        case Kind::Huber: {
            const double p = spec.c2() / (2.0 * spec.b());
            if (t <= spec.c2()) return std::log(spec.norm_mv()) - t / (2.0 * spec.b());
            return std::log(spec.norm_mv()) - p * (std::log(t / spec.c2()) + 1.0);
        }
    }
    return 0.0;
}

double g(const FamilySpec& spec, double t) { return std::exp(log_g(spec, t)); }

double rho(const FamilySpec& spec, double t) { return -log_g(spec, t); }

double psi(const FamilySpec& spec, double t) {
    if (t < 0.0) throw DomainError("psi: t < 0");
    switch (spec.kind()) {
        case Kind::Gaussian:
            return 0.5;
        case Kind::StudentT:
            return 0.5 * (spec.nu() + spec.dim()) / (spec.nu() + t);
        case Kind::Huber:
            if (t <= spec.c2()) return 1.0 / (2.0 * spec.b());
            return spec.c2() / (2.0 * spec.b() * t);
    }
    return 0.0;
}

double eta_loss(const FamilySpec& spec, double t) {
    if (t < 0.0) throw DomainError("eta_loss: t < 0");
    switch (spec.kind()) {
        case Kind::Gaussian:
            return 0.0;
        case Kind::StudentT: {
            const double d = spec.nu() + t;
            return -0.5 * (spec.nu() + spec.dim()) / (d * d);
        }
        case Kind::Huber:
            if (t <= spec.c2()) return 0.0;
            return -spec.c2() / (2.0 * spec.b() * t * t);
    }
    return 0.0;
}

namespace {

// Branches of the closed-form univariate Huber cdf. All constants carry the
// family's c and b; the normalizer is the univariate one.
double huber_cdf_1d(const FamilySpec& spec, double z) {
    const double b = spec.b(), c = spec.c(), c2 = spec.c2(), a = spec.norm_1d();
    const double p = c2 / (2.0 * b);
    if (z < -c) {
        return a * b * z / (b - c2) * std::exp(-p * (1.0 + std::log(z * z / c2)));
    }
    const double base = -a * b * c / (b - c2) * std::exp(-p);
    const double s2b = std::sqrt(2.0 * b);
    if (z <= c) {
        return base + a * std::sqrt(M_PI * b / 2.0) *
                          (numerics::erf(z / s2b) + numerics::erf(c / s2b));
    }
    const double mid = a * std::sqrt(2.0 * M_PI * b) * numerics::erf(c / s2b);
    const double tail = a * b / (b - c2) * std::exp(-p) *
                        (z * std::exp(-p * std::log(z * z / c2)) - c);
    return base + mid + tail;
}

double huber_pdf_1d(const FamilySpec& spec, double z) {
    const double b = spec.b(), c = spec.c(), c2 = spec.c2(), a = spec.norm_1d();
    if (std::abs(z) <= c) return a * std::exp(-z * z / (2.0 * b));
    const double p = c2 / (2.0 * b);
    return a * std::exp(-p * (1.0 + std::log(z * z / c2)));
}

} // namespace

double cdf_1d(const FamilySpec& spec, double z) {
    switch (spec.kind()) {
        case Kind::Gaussian:
            return numerics::std_normal_cdf(z);
        case Kind::StudentT:
            return numerics::student_t_cdf(spec.nu() + spec.dim(), z);
        case Kind::Huber:
            return huber_cdf_1d(spec, z);
    }
    return 0.0;
}

double log_cdf_1d(const FamilySpec& spec, double z) {
    switch (spec.kind()) {
        case Kind::Gaussian:
            return numerics::std_normal_log_cdf(z);
        case Kind::StudentT:
            return numerics::student_t_log_cdf(spec.nu() + spec.dim(), z);
        case Kind::Huber:
            return std::log(huber_cdf_1d(spec, z));
    }
    return 0.0;
}

double pdf_1d(const FamilySpec& spec, double z) {
    switch (spec.kind()) {
        case Kind::Gaussian:
            return numerics::std_normal_pdf(z);
        case Kind::StudentT:
            return numerics::student_t_pdf(spec.nu() + spec.dim(), z);
        case Kind::Huber:
            return huber_pdf_1d(spec, z);
    }
    return 0.0;
}

double cap_psi(const FamilySpec& spec, double x) {
    switch (spec.kind()) {
        case Kind::Gaussian:
            if (x < -30.0) {
                // Mills-ratio continuation; Phi underflows near -37.
                return x + 1.0 / x - 2.0 / (x * x * x);
            }
            return -numerics::std_normal_pdf(x) / numerics::std_normal_cdf(x);
        case Kind::StudentT: {
            const double nu = spec.nu() + spec.dim();
            return -std::exp(numerics::student_t_log_pdf(nu, x) -
                             numerics::student_t_log_cdf(nu, x));
        }
        case Kind::Huber:
            if (x < -spec.c()) {
                // the common power factor cancels in -h/H_c
                return (spec.c2() - spec.b()) / (spec.b() * x);
            }
            return -huber_pdf_1d(spec, x) / huber_cdf_1d(spec, x);
    }
    return 0.0;
}

} // namespace resk::family
