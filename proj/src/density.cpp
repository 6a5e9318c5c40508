#include "resk/density.hpp"

#include <cmath>

#include "resk/kernels.hpp"

namespace resk::density {

namespace {

numerics::SpdMatrix make_omega(const numerics::SpdMatrix& s, const std::vector<double>& lambda) {
    const int r = s.dim();
    std::vector<double> a = s.entries();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) a[static_cast<size_t>(i) * r + j] += lambda[i] * lambda[j];
    return numerics::SpdMatrix(r, std::move(a));
}

} // namespace

ClusterParams::ClusterParams(std::vector<double> xi, std::vector<double> lambda,
                             numerics::SpdMatrix scatter)
    : xi_(std::move(xi)),
      lambda_(std::move(lambda)),
      scatter_(std::move(scatter)),
      omega_(make_omega(scatter_, lambda_)) {
    const int r = scatter_.dim();
    if (static_cast<int>(xi_.size()) != r || static_cast<int>(lambda_.size()) != r)
        throw DimensionMismatch("ClusterParams: xi/lambda length");
    sinv_ = scatter_.inverse();
    sinv_lambda_ = scatter_.solve(lambda_);
    lsl_ = 0.0;
    for (int i = 0; i < r; ++i) lsl_ += lambda_[i] * sinv_lambda_[i];
    tau_ = 1.0 / std::sqrt(1.0 + lsl_);
}

SkewScalars skew_scalars(const ClusterParams& p, std::span<const double> x) {
    const int r = p.dim();
    if (static_cast<int>(x.size()) != r) throw DimensionMismatch("skew_scalars: point length");
    std::vector<double> d(r);
    for (int i = 0; i < r; ++i) d[i] = x[i] - p.xi()[i];
    const double t_s = p.scatter().quadratic_form(d);
    double a = 0.0;
    for (int i = 0; i < r; ++i) a += p.sinv_lambda()[i] * d[i];
    const double denom = 1.0 + p.lambda_sinv_lambda();
    SkewScalars out;
    out.t = std::max(t_s - a * a / denom, 0.0);
    out.eta = a / denom;
    out.tau = p.tau();
    return out;
}

double kappa(const family::FamilySpec& spec, double t, double eta, double tau) {
    if (t < 0.0) throw DomainError("kappa: t < 0");
    if (!(tau > 0.0)) throw DomainError("kappa: tau <= 0");
    const double w = family::psi(spec, t);
    if (!(w > 0.0)) throw DomainError("kappa: psi <= 0");
    return eta / tau * std::sqrt(2.0 * w);
}

double resk_logpdf(const family::FamilySpec& spec, const ClusterParams& p,
                   std::span<const double> x) {
    const auto s = skew_scalars(p, x);
    const double k = kappa(spec, s.t, s.eta, s.tau);
    return std::log(2.0) - 0.5 * p.omega().log_det() + family::log_g(spec, s.t) +
           family::log_cdf_1d(spec, k);
}

double resk_pdf(const family::FamilySpec& spec, const ClusterParams& p,
                std::span<const double> x) {
    return std::exp(resk_logpdf(spec, p, x));
}

double res_logpdf(const family::FamilySpec& spec, std::span<const double> mu,
                  const numerics::SpdMatrix& scatter, std::span<const double> x) {
    const int r = scatter.dim();
    if (static_cast<int>(mu.size()) != r || static_cast<int>(x.size()) != r)
        throw DimensionMismatch("res_logpdf: lengths");
    std::vector<double> d(r);
    for (int i = 0; i < r; ++i) d[i] = x[i] - mu[i];
    const double t = scatter.quadratic_form(d);
    return -0.5 * scatter.log_det() + family::log_g(spec, t);
}

void cluster_batch(const family::FamilySpec& spec, const ClusterParams& p,
                   const DataSet& data, std::span<double> t_out,
                   std::span<double> eta_out, std::span<double> kappa_out,
                   std::span<double> logpdf_out) {
    const int r = p.dim();
    if (data.dim != r) throw DimensionMismatch("cluster_batch: data dimension");
    const std::size_t n = data.n;

    // t_S[i] = d^T S^-1 d and a[i] = (S^-1 lambda)^T d, accumulated column-pair
    // wise so the inner loops run over the long axis.
    std::vector<double> t_s(n, 0.0), a(n, 0.0);
    const auto& sinv = p.scatter_inv();
    for (int j = 0; j < r; ++j) {
        const double* cj = data.col(j);
        const double xij = p.xi()[j];
        kernels::accum_centered(a.data(), cj, xij, p.sinv_lambda()[j], n);
        kernels::accum_centered_prod(t_s.data(), cj, xij, cj, xij,
                                     sinv[static_cast<size_t>(j) * r + j], n);
        for (int k = j + 1; k < r; ++k) {
            kernels::accum_centered_prod(t_s.data(), cj, xij, data.col(k), p.xi()[k],
                                         2.0 * sinv[static_cast<size_t>(j) * r + k], n);
        }
    }

    const double denom = 1.0 + p.lambda_sinv_lambda();
    const double tau = p.tau();
    const double half_logdet_omega = 0.5 * p.omega().log_det();
    const double ln2 = std::log(2.0);

    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::max(t_s[i] - a[i] * a[i] / denom, 0.0);
        const double eta = a[i] / denom;
        const double k = eta / tau * std::sqrt(2.0 * family::psi(spec, t));
        if (!t_out.empty()) t_out[i] = t;
        if (!eta_out.empty()) eta_out[i] = eta;
        if (!kappa_out.empty()) kappa_out[i] = k;
        if (!logpdf_out.empty())
            logpdf_out[i] = ln2 - half_logdet_omega + family::log_g(spec, t) +
                            family::log_cdf_1d(spec, k);
    }
}

} // namespace resk::density
