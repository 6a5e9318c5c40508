#pragma once

#include <span>
#include <vector>

#include "resk/data.hpp"
#include "resk/family.hpp"
#include "resk/numerics.hpp"

namespace resk::density {

// Per-cluster parameters with everything the density evaluation needs cached
// at construction: Omega = S + lambda lambda^T and its factorization, S^-1,
// S^-1 lambda and the skew scale tau. Instances are immutable; updates build
// new values.
class ClusterParams {
public:
    ClusterParams(std::vector<double> xi, std::vector<double> lambda, numerics::SpdMatrix scatter);

    int dim() const { return static_cast<int>(xi_.size()); }
    const std::vector<double>& xi() const { return xi_; }
    const std::vector<double>& lambda() const { return lambda_; }
    const numerics::SpdMatrix& scatter() const { return scatter_; }
    const numerics::SpdMatrix& omega() const { return omega_; }
    const std::vector<double>& scatter_inv() const { return sinv_; }
    const std::vector<double>& sinv_lambda() const { return sinv_lambda_; }
    double lambda_sinv_lambda() const { return lsl_; }
    double tau() const { return tau_; }

private:
    std::vector<double> xi_, lambda_;
    numerics::SpdMatrix scatter_;
    numerics::SpdMatrix omega_;
    std::vector<double> sinv_;
    std::vector<double> sinv_lambda_;
    double lsl_ = 0.0;
    double tau_ = 1.0;
};

struct SkewScalars {
    double t;   // (x-xi)^T Omega^-1 (x-xi)
    double eta; // lambda^T S^-1 (x-xi) / (1 + lambda^T S^-1 lambda)
    double tau; // (1 + lambda^T S^-1 lambda)^-1/2
};

// Sherman-Morrison route; agrees with a direct Omega solve to 1e-10.
SkewScalars skew_scalars(const ClusterParams& p, std::span<const double> x);

double kappa(const family::FamilySpec& spec, double t, double eta, double tau);

double resk_logpdf(const family::FamilySpec& spec, const ClusterParams& p,
                   std::span<const double> x);
double resk_pdf(const family::FamilySpec& spec, const ClusterParams& p,
                std::span<const double> x);

double res_logpdf(const family::FamilySpec& spec, std::span<const double> mu,
                  const numerics::SpdMatrix& scatter, std::span<const double> x);

// Batch evaluation over a dataset; any output span may be empty to skip it.
// logpdf, t, eta are per-point; kappa_out likewise.
void cluster_batch(const family::FamilySpec& spec, const ClusterParams& p,
                   const DataSet& data, std::span<double> t_out,
                   std::span<double> eta_out, std::span<double> kappa_out,
                   std::span<double> logpdf_out);

} // namespace resk::density
