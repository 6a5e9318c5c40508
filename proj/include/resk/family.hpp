#pragma once

#include "resk/numerics.hpp"

namespace resk::family {

enum class Kind { Gaussian, StudentT, Huber };

// One density-generator family, fixed to a data dimension. For Huber the
// derived constants are:
//   c^2  - squared threshold, the q_H quantile of chi^2 with quantile_dim dof
//   b    - Fisher-consistency constant at the data dimension
//   A_H  - normalizer of the r-variate density generator
//   A_H1 - normalizer of the univariate pdf/cdf factor (same c and b)
// quantile_dim defaults to the data dimension; c = 1.282 at q_H = 0.8 needs
// quantile_dim = 1.
class FamilySpec {
public:
    FamilySpec() = default; // gaussian, one dimension

    static FamilySpec gaussian(int dim);
    static FamilySpec student_t(int dim, double nu);
    static FamilySpec huber(int dim, double q_h, int quantile_dim = 0);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double nu() const { return nu_; }
    double q_h() const { return q_h_; }
    double c() const { return c_; }
    double c2() const { return c2_; }
    double b() const { return b_; }
    double norm_mv() const { return ah_mv_; }
    double norm_1d() const { return ah_1d_; }

    const char* name() const;

private:
    Kind kind_ = Kind::Gaussian;
    int dim_ = 1;
    double nu_ = 0.0;
    double q_h_ = 0.0, c_ = 0.0, c2_ = 0.0, b_ = 0.0, ah_mv_ = 0.0, ah_1d_ = 0.0;
};

// Fisher-consistency constant b for threshold c^2 at dimension r.
double fisher_b(int r, double c2);

// Huber density-generator normalizer A_H at dimension r; requires c^2 > 2b
// (tail integral) and c^2 != b r (finite denominator).
double huber_norm(int r, double c, double b);

// Density generator g and the loss functions built on it: rho = -ln g,
// psi = rho', eta = psi'.
double g(const FamilySpec& spec, double t);
double log_g(const FamilySpec& spec, double t);
double rho(const FamilySpec& spec, double t);
double psi(const FamilySpec& spec, double t);
double eta_loss(const FamilySpec& spec, double t);

// Univariate skew factor: cdf, pdf, and Psi(x) = -pdf(x)/cdf(x). The
// student-t variants are evaluated at nu + dim dof.
double cdf_1d(const FamilySpec& spec, double z);
double log_cdf_1d(const FamilySpec& spec, double z);
double pdf_1d(const FamilySpec& spec, double z);
double cap_psi(const FamilySpec& spec, double x);

} // namespace resk::family
