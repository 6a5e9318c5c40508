#include "resk/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "resk/rng.hpp"

namespace resk::evaluate {

namespace {

constexpr double kLogFloor = -745.0;

std::vector<double> mixture_log_density(const em::MixtureModel& model, const DataSet& points) {
    const std::size_t n = points.n;
    const int l = model.n_clusters();
    std::vector<double> logw(n * static_cast<std::size_t>(l));
    for (int m = 0; m < l; ++m) {
        density::cluster_batch(model.spec, model.clusters[m], points, {}, {}, {},
                               {logw.data() + static_cast<std::size_t>(m) * n, n});
        const double lg = std::log(model.weights[m]);
        double* lw = logw.data() + static_cast<std::size_t>(m) * n;
        for (std::size_t i = 0; i < n; ++i) lw[i] += lg;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int m = 0; m < l; ++m) mx = std::max(mx, logw[static_cast<std::size_t>(m) * n + i]);
        double denom = 0.0;
        for (int m = 0; m < l; ++m)
            denom += std::exp(logw[static_cast<std::size_t>(m) * n + i] - mx);
        out[i] = mx + std::log(denom);
    }
    return out;
}

} // namespace

double kl_divergence(const em::MixtureModel& p_model, const em::MixtureModel& q_model,
                     const DataSet& eval_points, bool monte_carlo, int* clamped) {
    const auto logp = mixture_log_density(p_model, eval_points);
    const auto logq = mixture_log_density(q_model, eval_points);
    int clamp_count = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < eval_points.n; ++i) {
        double lq = logq[i];
        if (lq < kLogFloor) {
            lq = kLogFloor;
            ++clamp_count;
        }
        const double diff = logp[i] - lq;
        total += monte_carlo ? diff : std::exp(logp[i]) * diff;
    }
    if (clamped != nullptr) *clamped = clamp_count;
    if (monte_carlo) total /= static_cast<double>(eval_points.n);
    return total;
}

ConfusionMatrix confusion(const std::vector<int>& true_labels, const std::vector<int>& predicted,
                          int k, bool exclude_outliers) {
    if (k > 8) throw TooManyClasses("confusion: exhaustive matching limited to K <= 8");
    if (true_labels.size() != predicted.size())
        throw DimensionMismatch("confusion: label vectors differ in length");

    std::vector<std::size_t> raw(static_cast<std::size_t>(k) * k, 0);
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const int t = true_labels[i];
        if (t == 0 && exclude_outliers) continue;
        if (t < 1 || t > k) throw DomainError("confusion: true label out of range");
        const int p = predicted[i];
        if (p < 1 || p > k) throw DomainError("confusion: predicted label out of range");
        raw[static_cast<std::size_t>(t - 1) * k + (p - 1)]++;
    }

    // permutation of predicted columns maximizing the diagonal
    std::vector<int> perm(k), best_perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::iota(best_perm.begin(), best_perm.end(), 0);
    std::size_t best_diag = 0;
    std::vector<int> p = perm;
    do {
        std::size_t diag = 0;
        for (int i = 0; i < k; ++i) diag += raw[static_cast<std::size_t>(i) * k + p[i]];
        if (diag > best_diag) {
            best_diag = diag;
            best_perm = p;
        }
    } while (std::next_permutation(p.begin(), p.end()));

    ConfusionMatrix cm;
    cm.k = k;
    cm.counts.resize(static_cast<std::size_t>(k) * k);
    cm.percents.resize(static_cast<std::size_t>(k) * k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            cm.counts[static_cast<std::size_t>(i) * k + j] =
                raw[static_cast<std::size_t>(i) * k + best_perm[j]];
    double diag_sum = 0.0;
    for (int i = 0; i < k; ++i) {
        std::size_t row = 0;
        for (int j = 0; j < k; ++j) row += cm.count(i, j);
        for (int j = 0; j < k; ++j)
            cm.percents[static_cast<std::size_t>(i) * k + j] =
                row == 0 ? 0.0 : 100.0 * static_cast<double>(cm.count(i, j)) / static_cast<double>(row);
        diag_sum += cm.percent(i, i);
    }
    cm.average = diag_sum / k;
    return cm;
}

ConfusionMatrix confusion_from_resp(const std::vector<int>& true_labels,
                                    const std::vector<double>& resp, std::size_t n, int l,
                                    bool exclude_outliers) {
    std::vector<int> pred(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1.0;
        for (int m = 0; m < l; ++m) {
            const double v = resp[static_cast<std::size_t>(m) * n + i];
            if (v > best) {
                best = v;
                pred[i] = m + 1;
            }
        }
    }
    return confusion(true_labels, pred, l, exclude_outliers);
}

void parallel_cells(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = static_cast<int>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

em::MixtureModel preset_truth(const std::string& name, const family::FamilySpec& spec,
                              bool skewed) {
    const auto& def = simulate::preset_def(name);
    em::MixtureModel model{spec, skewed, {}, {}};
    double total = 0.0;
    for (const auto& c : def.clusters) total += static_cast<double>(c.count_factor);
    for (const auto& c : def.clusters) {
        model.weights.push_back(static_cast<double>(c.count_factor) / total);
        model.clusters.emplace_back(c.xi, skewed ? c.lambda : std::vector<double>(def.dim, 0.0),
                                    numerics::SpdMatrix(def.dim, c.scatter));
    }
    return model;
}

SensitivityResult sensitivity_grid(const GridSpec& grid, const family::FamilySpec& spec,
                                   bool skewed, const SweepConfig& config) {
    if (!(grid.step > 0.0)) throw DomainError("sensitivity_grid: step <= 0");

    SensitivityResult res;
    for (double x = grid.x_lo; x <= grid.x_hi + 1e-9; x += grid.step) res.xs.push_back(x);
    for (double y = grid.y_lo; y <= grid.y_hi + 1e-9; y += grid.step) res.ys.push_back(y);
    const std::size_t cells = res.xs.size() * res.ys.size();
    res.mean_kl.assign(cells, std::numeric_limits<double>::quiet_NaN());

    const auto truth = preset_truth(config.preset, spec, skewed);

    parallel_cells(cells, config.threads, [&](std::size_t cell) {
        const std::size_t iy = cell / res.xs.size();
        const std::size_t ix = cell % res.xs.size();
        double acc = 0.0;
        int ok = 0;
        for (int rep = 0; rep < config.mc; ++rep) {
            const uint64_t cell_seed =
                Rng::derive(config.seed, cell * static_cast<std::size_t>(config.mc) + rep);
            try {
                DataSet clean = simulate::preset(config.preset, config.n_k, cell_seed);
                DataSet poisoned = clean;
                Rng rng(Rng::derive(cell_seed, 7));
                const std::size_t victim =
                    std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(clean.n)),
                             clean.n - 1);
                poisoned.at(victim, 0) = res.xs[ix];
                poisoned.at(victim, 1) = res.ys[iy];
                em::FitConfig fc = config.fit;
                fc.seed = cell_seed;
                auto sweep = enumeration::enumerate_clusters(poisoned, config.l_min, config.l_max,
                                                             spec, skewed, fc);
                const auto& best = sweep.fits.at(sweep.k_hat);
                acc += kl_divergence(truth, best.model, clean);
                ++ok;
            } catch (const Error&) {
                // cell repetition failed; skip it
            }
        }
        if (ok > 0) res.mean_kl[cell] = acc / ok;
    });
    return res;
}

std::vector<BreakdownRow> breakdown_sweep(const std::vector<double>& eps_list,
                                          const std::vector<FamilyChoice>& families,
                                          const SweepConfig& config) {
    for (double e : eps_list)
        if (!(e >= 0.0 && e < 0.5)) throw DomainError("breakdown_sweep: eps outside [0, 0.5)");

    struct Cell {
        double kl_true = std::numeric_limits<double>::quiet_NaN();
        double kl_enum = std::numeric_limits<double>::quiet_NaN();
        bool detected = false;
        int iters = 0;
        bool ok = false;
    };

    const int true_k = static_cast<int>(simulate::preset_def(config.preset).clusters.size());
    std::vector<BreakdownRow> rows;
    for (double eps : eps_list) {
        for (const auto& fam : families) {
            const auto truth = preset_truth(config.preset, fam.spec, fam.skewed);
            std::vector<Cell> cells(config.mc);
            parallel_cells(cells.size(), config.threads, [&](std::size_t rep) {
                const uint64_t run_seed = Rng::derive(config.seed, rep);
                try {
                    DataSet clean = simulate::preset(config.preset, config.n_k, run_seed);
                    DataSet obs = simulate::contaminate(
                        clean, simulate::ContaminationSpec::box2d(eps), Rng::derive(run_seed, 3));

                    em::FitConfig fc = config.fit;
                    fc.seed = run_seed;
                    auto fixed = em::fit(obs, true_k, fam.spec, fam.skewed, fc);
                    cells[rep].kl_true = kl_divergence(truth, fixed.model, clean);
                    cells[rep].iters = fixed.iterations;

                    auto sweep = enumeration::enumerate_clusters(obs, config.l_min, config.l_max,
                                                                 fam.spec, fam.skewed, fc);
                    cells[rep].detected = sweep.k_hat == true_k;
                    cells[rep].kl_enum =
                        kl_divergence(truth, sweep.fits.at(sweep.k_hat).model, clean);
                    cells[rep].ok = true;
                } catch (const Error&) {
                    // cell failure is isolated
                }
            });

            BreakdownRow row;
            row.epsilon = eps;
            row.family = fam.label;
            row.skewed = fam.skewed;
            int ok = 0;
            double it_sum = 0.0, it_sq = 0.0;
            for (const auto& c : cells) {
                if (!c.ok) continue;
                ++ok;
                row.mean_kl_true_k += c.kl_true;
                row.mean_kl_enum_k += c.kl_enum;
                row.p_detect += c.detected ? 1.0 : 0.0;
                it_sum += c.iters;
                it_sq += static_cast<double>(c.iters) * c.iters;
            }
            if (ok > 0) {
                row.mean_kl_true_k /= ok;
                row.mean_kl_enum_k /= ok;
                row.p_detect /= ok;
                row.iters_mean = it_sum / ok;
                const double var = std::max(it_sq / ok - row.iters_mean * row.iters_mean, 0.0);
                row.iters_std = std::sqrt(var);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

NuOracleReport nu_oracle(const DataSet& data, const em::MixtureModel& true_model,
                         const std::vector<double>& nu_set, bool skewed, int k,
                         const em::FitConfig& config) {
    if (nu_set.empty()) throw DomainError("nu_oracle: empty candidate set");
    NuOracleReport report;
    double best = std::numeric_limits<double>::infinity();
    for (double nu : nu_set) {
        const auto spec = family::FamilySpec::student_t(data.dim, nu);
        const auto fit = em::fit(data, k, spec, skewed, config);
        const double kl = kl_divergence(true_model, fit.model, data);
        report.kl_by_nu.emplace_back(nu, kl);
        if (kl < best) {
            best = kl;
            report.nu_best = nu;
        }
    }
    return report;
}

} // namespace resk::evaluate
