#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "resk/data.hpp"
#include "resk/density.hpp"
#include "resk/family.hpp"

namespace resk::em {

struct MixtureModel {
    family::FamilySpec spec;
    bool skewed = true;
    std::vector<double> weights;                   // simplex, length l
    std::vector<density::ClusterParams> clusters;  // length l

    int n_clusters() const { return static_cast<int>(clusters.size()); }
    int dim() const { return spec.dim(); }
};

// Responsibilities and the scalars frozen at the previous iterate that make
// the M-step closed form. Column-major: buffer[m*n + i].
struct EStepBuffers {
    std::size_t n = 0;
    int l = 0;
    std::vector<double> v, e0, e1, e2;
    double loglik = 0.0; // incomplete-data log-likelihood of the iterate used

    double* col(std::vector<double>& buf, int m) { return buf.data() + static_cast<std::size_t>(m) * n; }
    const double* col(const std::vector<double>& buf, int m) const {
        return buf.data() + static_cast<std::size_t>(m) * n;
    }
};

struct FitConfig {
    int max_iter = 2000;
    double tol = 1e-6; // absolute log-likelihood change
    uint64_t seed = 0;
    double collapse_frac = 1e-6; // cluster dies when sum(v) <= frac * N
};

struct EMReport {
    MixtureModel model;
    std::vector<double> ll_trace; // one entry per iteration, after the M-step
    int iterations = 0;
    bool converged = false;
    uint64_t seed = 0;
    int reseeds = 0;              // cluster-collapse recoveries
    std::vector<double> resp;     // final responsibilities, column-major n x l

    std::vector<int> hard_assignment() const; // argmax_m resp, values 1..l
};

// K-means++ centroids (best of three seeds, ten Lloyd rounds), lambda = 1
// (skewed) or 0, per-cluster covariance about the centroid, weights N_m/N.
MixtureModel init(const DataSet& data, int l, const family::FamilySpec& spec, bool skewed,
                  uint64_t seed);

// Responsibilities and e-scalars, everything evaluated at `prev`.
EStepBuffers e_step(const DataSet& data, const MixtureModel& prev);

// Closed-form updates in the order xi -> lambda -> S; xi uses the previous
// lambda, the rest use freshly updated values. Throws ClusterCollapse when a
// column of v sums below the threshold.
MixtureModel m_step(const DataSet& data, const EStepBuffers& buffers, const MixtureModel& prev,
                    double collapse_frac = 1e-6);

double incomplete_loglik(const DataSet& data, const MixtureModel& model);

EMReport fit(const DataSet& data, int l, const family::FamilySpec& spec, bool skewed,
             const FitConfig& config);

// Analytic gradients of the frozen-e surrogate, for verification. scatter
// gradient is in vech order (lower triangle stacked by column).
struct ClusterGradients {
    std::vector<double> xi;      // length r
    std::vector<double> lambda;  // length r
    std::vector<double> scatter; // length r(r+1)/2
};

std::vector<ClusterGradients> grad_check_pack(const DataSet& data, const MixtureModel& model,
                                              const EStepBuffers& buffers);

} // namespace resk::em
