#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "resk/em.hpp"
#include "resk/enumeration.hpp"
#include "resk/simulate.hpp"

namespace resk::evaluate {

// Density-weighted divergence sum_i p(x_i) ln(p(x_i)/q(x_i)) over the given
// evaluation points (the outlier-free generating data). With
// monte_carlo = true computes the plain (1/N) sum ln(p/q) instead. log q is
// clamped at -745; clamp events are counted when a counter is passed.
double kl_divergence(const em::MixtureModel& p_model, const em::MixtureModel& q_model,
                     const DataSet& eval_points, bool monte_carlo = false,
                     int* clamped = nullptr);

struct ConfusionMatrix {
    int k = 0;
    std::vector<std::size_t> counts; // k x k row-major, rows = true classes
    std::vector<double> percents;    // row-normalized, x100
    double average = 0.0;            // mean of diagonal percents

    std::size_t count(int i, int j) const { return counts[static_cast<std::size_t>(i) * k + j]; }
    double percent(int i, int j) const { return percents[static_cast<std::size_t>(i) * k + j]; }
};

// Hard assignment by argmax responsibility, matched to the true classes by
// the diagonal-maximizing permutation (exhaustive, K <= 8). true_labels uses
// 0 for outliers; those rows are dropped when exclude_outliers is set.
ConfusionMatrix confusion(const std::vector<int>& true_labels, const std::vector<int>& predicted,
                          int k, bool exclude_outliers = true);
ConfusionMatrix confusion_from_resp(const std::vector<int>& true_labels,
                                    const std::vector<double>& resp, std::size_t n, int l,
                                    bool exclude_outliers = true);

struct GridSpec {
    double x_lo = -15.0, x_hi = 45.0;
    double y_lo = -20.0, y_hi = 30.0;
    double step = 5.0;
};

struct SensitivityResult {
    std::vector<double> xs, ys;
    std::vector<double> mean_kl; // ys.size() x xs.size(), row-major, NaN on failure
};

struct SweepConfig {
    std::string preset = "dataset1";
    std::size_t n_k = 50;
    int mc = 100;
    uint64_t seed = 1;
    int threads = 0; // 0 = hardware concurrency
    em::FitConfig fit;
    int l_min = 1, l_max = 6;
};

// One replacement outlier per cell, enumerate + fit, divergence against the
// true model, averaged over mc repeats.
SensitivityResult sensitivity_grid(const GridSpec& grid, const family::FamilySpec& spec,
                                   bool skewed, const SweepConfig& config);

struct BreakdownRow {
    double epsilon = 0.0;
    std::string family;
    bool skewed = false;
    double mean_kl_true_k = 0.0;
    double mean_kl_enum_k = 0.0;
    double p_detect = 0.0;
    double iters_mean = 0.0;
    double iters_std = 0.0;
};

struct FamilyChoice {
    std::string label;
    family::FamilySpec spec;
    bool skewed = false;
};

std::vector<BreakdownRow> breakdown_sweep(const std::vector<double>& eps_list,
                                          const std::vector<FamilyChoice>& families,
                                          const SweepConfig& config);

// Picks the dof from nu_set minimizing the divergence against the true model.
struct NuOracleReport {
    double nu_best = 0.0;
    std::vector<std::pair<double, double>> kl_by_nu;
};

NuOracleReport nu_oracle(const DataSet& data, const em::MixtureModel& true_model,
                         const std::vector<double>& nu_set, bool skewed, int k,
                         const em::FitConfig& config);

// Ground-truth mixture for a preset, for divergence evaluation.
em::MixtureModel preset_truth(const std::string& name, const family::FamilySpec& spec,
                              bool skewed);

// Deterministic parallel map over Monte-Carlo cells; results land by index.
void parallel_cells(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

} // namespace resk::evaluate
