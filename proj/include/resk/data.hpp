#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "resk/errors.hpp"

namespace resk {

// Observations in feature-major (column) layout so per-feature arrays are
// contiguous for the batch kernels. labels: 0 = outlier, 1..K = cluster,
// empty vector = unlabeled.
struct DataSet {
    int dim = 0;
    std::size_t n = 0;
    std::vector<double> values; // dim * n, column j at [j*n, (j+1)*n)
    std::vector<int> labels;

    struct Meta {
        uint64_t seed = 0;
        std::string preset;
        double epsilon = 0.0;
        bool standardized = false;
        std::vector<double> shift, scale; // per-column, when standardized
    } meta;

    DataSet() = default;
    DataSet(int r, std::size_t count)
        : dim(r), n(count), values(static_cast<std::size_t>(r) * count, 0.0) {}

    const double* col(int j) const { return values.data() + static_cast<std::size_t>(j) * n; }
    double* col(int j) { return values.data() + static_cast<std::size_t>(j) * n; }

    double at(std::size_t i, int j) const { return col(j)[i]; }
    double& at(std::size_t i, int j) { return col(j)[i]; }

    std::vector<double> row(std::size_t i) const {
        std::vector<double> x(dim);
        for (int j = 0; j < dim; ++j) x[j] = at(i, j);
        return x;
    }

    bool has_labels() const { return !labels.empty(); }
};

} // namespace resk
