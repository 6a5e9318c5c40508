#pragma once

#include <map>
#include <vector>

#include "resk/em.hpp"

namespace resk::enumeration {

struct BicScore {
    double loglik = 0.0;  // sum of per-cluster log-likelihoods on the hard assignment
    double penalty = 0.0; // (q l / 2) ln N
    double value() const { return loglik - penalty; }
};

// Schwarz criterion on the hard assignment (argmax responsibility). Uses the
// skewed per-cluster log-likelihood when the model is skewed, the plain one
// otherwise; q = (r/2)(r+5) vs (r/2)(r+3) parameters per cluster.
BicScore bic_schwarz(const em::EMReport& fit, const DataSet& data);

struct BicSweep {
    int l_min = 1, l_max = 1;
    std::map<int, double> scores;      // -inf for failed candidates
    std::map<int, em::EMReport> fits;  // only successful candidates
    int k_hat = 1;
};

// Fits every candidate (fresh init, seed offset by l), scores it, and takes
// the argmax with ties broken toward fewer clusters.
BicSweep enumerate_clusters(const DataSet& data, int l_min, int l_max,
                            const family::FamilySpec& spec, bool skewed,
                            const em::FitConfig& config);

} // namespace resk::enumeration
