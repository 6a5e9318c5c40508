#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "resk/data.hpp"
#include "resk/numerics.hpp"

namespace resk::simulate {

// Per-dimension replacement-outlier box.
struct ContaminationSpec {
    double epsilon = 0.0;
    std::vector<double> lo, hi;

    static ContaminationSpec box2d(double epsilon) {
        // the box used by the simulated experiments
        return ContaminationSpec{epsilon, {-15.0, -20.0}, {45.0, 30.0}};
    }
};

// x = xi + lambda |z0| + chol(S) z, z0 ~ N(0,1), z ~ N(0,I). Draws follow the
// skew-Gaussian density with Omega = S + lambda lambda^T; the samplers are
// validated against the pdf rather than trusted.
DataSet sample_skew_gaussian(const std::vector<double>& xi, const numerics::SpdMatrix& scatter,
                             const std::vector<double>& lambda, std::size_t n, uint64_t seed);

// Scale mixture: x = xi + (lambda |z0| + chol(S) z) / sqrt(w/nu), w ~ chi2_nu.
DataSet sample_skew_t(const std::vector<double>& xi, const numerics::SpdMatrix& scatter,
                      const std::vector<double>& lambda, double nu, std::size_t n, uint64_t seed);

// Replaces floor(eps N) uniformly chosen points with uniform box draws and
// marks them with label 0.
DataSet contaminate(const DataSet& data, const ContaminationSpec& spec, uint64_t seed);

struct PresetCluster {
    std::vector<double> xi, lambda;
    std::vector<double> scatter; // row-major
    std::size_t count_factor;    // points = count_factor * n_k
};

struct PresetDef {
    std::string name;
    int dim;
    double nu; // 0 => skew-Gaussian clusters
    std::vector<PresetCluster> clusters;
};

const PresetDef& preset_def(const std::string& name);

// dataset1: three skew-Gaussian clusters, sizes (5,4,1) x n_k.
// dataset2: two skew-t (nu=3) clusters, n_k points each.
DataSet preset(const std::string& name, std::size_t n_k, uint64_t seed);

} // namespace resk::simulate
