#include "resk/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resk/kernels.hpp"
#include "resk/rng.hpp"

namespace resk::em {

namespace {

using numerics::SpdMatrix;

double sq_dist(const DataSet& data, std::size_t i, const std::vector<double>& c) {
    double d = 0.0;
    for (int j = 0; j < data.dim; ++j) {
        const double v = data.at(i, j) - c[j];
        d += v * v;
    }
    return d;
}

struct KMeansResult {
    std::vector<std::vector<double>> centroids;
    std::vector<int> assign;
    double sse = std::numeric_limits<double>::infinity();
};

KMeansResult kmeans_once(const DataSet& data, int l, Rng& rng, int lloyd_iters,
                         bool d2_seeding) {
    const std::size_t n = data.n;
    const int r = data.dim;
    KMeansResult res;
    res.centroids.reserve(l);

    if (d2_seeding) {
        // distance-squared seeding
        std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
        {
            const std::size_t first =
                static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
            res.centroids.push_back(data.row(std::min(first, n - 1)));
        }
        for (int m = 1; m < l; ++m) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                min_d[i] = std::min(min_d[i], sq_dist(data, i, res.centroids.back()));
                total += min_d[i];
            }
            std::size_t pick = n - 1;
            if (total > 0.0) {
                double target = rng.uniform() * total;
                for (std::size_t i = 0; i < n; ++i) {
                    target -= min_d[i];
                    if (target <= 0.0) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
                pick = std::min(pick, n - 1);
            }
            res.centroids.push_back(data.row(pick));
        }
    } else {
        // uniform seeding on distinct points
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (int m = 0; m < l; ++m) {
            const std::size_t j =
                m + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - m));
            std::swap(idx[m], idx[std::min(j, n - 1)]);
            res.centroids.push_back(data.row(idx[m]));
        }
    }

    res.assign.assign(n, 0);
    for (int it = 0; it < lloyd_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int m = 0; m < l; ++m) {
                const double d = sq_dist(data, i, res.centroids[m]);
                if (d < best) {
                    best = d;
                    arg = m;
                }
            }
            res.assign[i] = arg;
        }
        std::vector<std::vector<double>> sums(l, std::vector<double>(r, 0.0));
        std::vector<std::size_t> counts(l, 0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[res.assign[i]]++;
            for (int j = 0; j < r; ++j) sums[res.assign[i]][j] += data.at(i, j);
        }
        for (int m = 0; m < l; ++m) {
            if (counts[m] == 0) {
                // revive on the point farthest from its centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sq_dist(data, i, res.centroids[res.assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                res.centroids[m] = data.row(far);
                res.assign[far] = m;
                continue;
            }
            for (int j = 0; j < r; ++j) res.centroids[m][j] = sums[m][j] / static_cast<double>(counts[m]);
        }
    }

    res.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int m = 0; m < l; ++m) {
            const double d = sq_dist(data, i, res.centroids[m]);
            if (d < best) {
                best = d;
                arg = m;
            }
        }
        res.assign[i] = arg;
        res.sse += best;
    }
    return res;
}

// Alternating k-medoids on unsquared Euclidean distances. Less outlier-prone
// than SSE clustering: stealing a center for a handful of replacement
// outliers saves far less summed distance than it saves summed squares.
KMeansResult kmedoids_once(const DataSet& data, int l, Rng& rng, int iters) {
    const std::size_t n = data.n;
    std::vector<std::size_t> med(l);
    {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (int m = 0; m < l; ++m) {
            const std::size_t j =
                m + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - m));
            std::swap(idx[m], idx[std::min(j, n - 1)]);
            med[m] = idx[m];
        }
    }
    KMeansResult res;
    res.assign.assign(n, 0);
    auto assign_all = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int m = 0; m < l; ++m) {
                const double d = std::sqrt(sq_dist(data, i, data.row(med[m])));
                if (d < best) {
                    best = d;
                    arg = m;
                }
            }
            res.assign[i] = arg;
        }
    };
    std::vector<std::size_t> members;
    for (int it = 0; it < iters; ++it) {
        assign_all();
        for (int m = 0; m < l; ++m) {
            members.clear();
            for (std::size_t i = 0; i < n; ++i)
                if (res.assign[i] == m) members.push_back(i);
            if (members.empty()) continue;
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = med[m];
            for (std::size_t a : members) {
                const auto row = data.row(a);
                double s = 0.0;
                for (std::size_t b : members) s += std::sqrt(sq_dist(data, b, row));
                if (s < best) {
                    best = s;
                    arg = a;
                }
            }
            med[m] = arg;
        }
    }
    assign_all();
    res.centroids.clear();
    for (int m = 0; m < l; ++m) res.centroids.push_back(data.row(med[m]));
    res.sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) res.sse += sq_dist(data, i, res.centroids[res.assign[i]]);
    return res;
}

SpdMatrix covariance_about(const DataSet& data, const std::vector<int>& assign, int m,
                           const std::vector<double>& center) {
    const int r = data.dim;
    std::vector<double> acc(static_cast<std::size_t>(r) * r, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < data.n; ++i) {
        if (assign[i] != m) continue;
        ++count;
        for (int a = 0; a < r; ++a)
            for (int b = 0; b <= a; ++b)
                acc[static_cast<std::size_t>(a) * r + b] +=
                    (data.at(i, a) - center[a]) * (data.at(i, b) - center[b]);
    }
    if (count == 0) throw DegenerateCluster("empty cluster in initialization");
    for (int a = 0; a < r; ++a)
        for (int b = 0; b <= a; ++b) {
            const double v = acc[static_cast<std::size_t>(a) * r + b] / static_cast<double>(count);
            acc[static_cast<std::size_t>(a) * r + b] = v;
            acc[static_cast<std::size_t>(b) * r + a] = v;
        }
    try {
        return SpdMatrix::with_jitter_repair(r, std::move(acc));
    } catch (const NotPositiveDefinite&) {
        throw DegenerateCluster("cluster covariance not positive definite");
    }
}

SpdMatrix pooled_covariance(const DataSet& data) {
    const int r = data.dim;
    std::vector<double> mean(r, 0.0);
    for (std::size_t i = 0; i < data.n; ++i)
        for (int j = 0; j < r; ++j) mean[j] += data.at(i, j);
    for (int j = 0; j < r; ++j) mean[j] /= static_cast<double>(data.n);
    std::vector<int> all(data.n, 0);
    return covariance_about(data, all, 0, mean);
}

} // namespace

std::vector<int> EMReport::hard_assignment() const {
    const int l = model.n_clusters();
    const std::size_t n = resp.size() / static_cast<std::size_t>(l);
    std::vector<int> out(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -1.0;
        for (int m = 0; m < l; ++m) {
            const double v = resp[static_cast<std::size_t>(m) * n + i];
            if (v > best) {
                best = v;
                out[i] = m + 1;
            }
        }
    }
    return out;
}

MixtureModel model_from_partition(const DataSet& data, const KMeansResult& part,
                                  const family::FamilySpec& spec, bool skewed) {
    const int l = static_cast<int>(part.centroids.size());
    MixtureModel model{spec, skewed, {}, {}};
    model.weights.resize(l);
    model.clusters.reserve(l);
    for (int m = 0; m < l; ++m) {
        const std::size_t n_m =
            static_cast<std::size_t>(std::count(part.assign.begin(), part.assign.end(), m));
        if (n_m == 0) throw DegenerateCluster("init: empty cluster in the partition");
        model.weights[m] = static_cast<double>(n_m) / static_cast<double>(data.n);
        std::vector<double> lambda(data.dim, skewed ? 1.0 : 0.0);
        model.clusters.emplace_back(part.centroids[m], std::move(lambda),
                                    covariance_about(data, part.assign, m, part.centroids[m]));
    }
    return model;
}

void check_init_preconditions(const DataSet& data, int l, const family::FamilySpec& spec) {
    if (l < 1) throw DomainError("init: l < 1");
    if (data.dim != spec.dim()) throw DimensionMismatch("init: spec dimension");
    const std::size_t need = static_cast<std::size_t>(l) * (data.dim + 1);
    if (data.n < need) throw TooFewPoints("init: need at least l*(r+1) points");
}

// The fit entry point burns in from several differently flavored starts; on
// contaminated data the SSE-optimal partitions dedicate a center to the
// outliers and the skewed heavy-tailed fits can stay trapped there.
std::vector<MixtureModel> init_candidates(const DataSet& data, int l,
                                          const family::FamilySpec& spec, bool skewed,
                                          uint64_t seed) {
    std::vector<MixtureModel> out;
    out.push_back(init(data, l, spec, skewed, seed));
    {
        Rng rng = Rng::substream(seed, 104);
        try {
            out.push_back(model_from_partition(data, kmeans_once(data, l, rng, 10, false), spec,
                                               skewed));
        } catch (const DegenerateCluster&) {
        }
    }
    {
        Rng rng = Rng::substream(seed, 105);
        try {
            out.push_back(
                model_from_partition(data, kmedoids_once(data, l, rng, 10), spec, skewed));
        } catch (const DegenerateCluster&) {
        }
    }
    return out;
}

MixtureModel init(const DataSet& data, int l, const family::FamilySpec& spec, bool skewed,
                  uint64_t seed) {
    check_init_preconditions(data, l, spec);
    KMeansResult best;
    for (uint64_t attempt = 0; attempt < 3; ++attempt) {
        Rng rng = Rng::substream(seed, 101 + attempt);
        KMeansResult cand = kmeans_once(data, l, rng, 10, true);
        if (cand.sse < best.sse) best = std::move(cand);
    }
    return model_from_partition(data, best, spec, skewed);
}

EStepBuffers e_step(const DataSet& data, const MixtureModel& prev) {
    const std::size_t n = data.n;
    const int l = prev.n_clusters();
    const int r = data.dim;
    if (r != prev.dim()) throw DimensionMismatch("e_step: data dimension");

    EStepBuffers buf;
    buf.n = n;
    buf.l = l;
    buf.v.resize(n * static_cast<std::size_t>(l));
    buf.e0.resize(n * static_cast<std::size_t>(l));
    buf.e1.resize(n * static_cast<std::size_t>(l));
    buf.e2.resize(n * static_cast<std::size_t>(l));

    std::vector<double> t(n), eta(n), kap(n);
    std::vector<double> logw(n * static_cast<std::size_t>(l));

    const auto& spec = prev.spec;
    for (int m = 0; m < l; ++m) {
        const auto& p = prev.clusters[m];
        density::cluster_batch(spec, p, data, t, eta, kap,
                               {logw.data() + static_cast<std::size_t>(m) * n, n});
        const double tau = p.tau();
        const double lg = std::log(prev.weights[m]);
        double* lw = logw.data() + static_cast<std::size_t>(m) * n;
        double* e0 = buf.col(buf.e0, m);
        double* e1 = buf.col(buf.e1, m);
        double* e2 = buf.col(buf.e2, m);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = family::psi(spec, t[i]);
            const double sq = std::sqrt(2.0 * w);
            const double cp = family::cap_psi(spec, kap[i]);
            const double el = family::eta_loss(spec, t[i]);
            const double cross = 2.0 * cp * el / sq; // shared by all three scalars
            e0[i] = 2.0 * w + cross * eta[i] / tau;
            e1[i] = 2.0 * w * eta[i] - cp * tau * sq + cross * eta[i] * eta[i] / tau;
            e2[i] = tau * tau + 2.0 * w * eta[i] * eta[i] - cp * eta[i] * tau * sq +
                    cross * eta[i] * eta[i] * eta[i] / tau;
            lw[i] += lg;
        }
    }

    // log-domain normalization with max subtraction
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int m = 0; m < l; ++m) mx = std::max(mx, logw[static_cast<std::size_t>(m) * n + i]);
        if (!std::isfinite(mx)) throw Error("e_step: all densities vanished for a point");
        double denom = 0.0;
        for (int m = 0; m < l; ++m)
            denom += std::exp(logw[static_cast<std::size_t>(m) * n + i] - mx);
        for (int m = 0; m < l; ++m)
            buf.v[static_cast<std::size_t>(m) * n + i] =
                std::exp(logw[static_cast<std::size_t>(m) * n + i] - mx) / denom;
        total += mx + std::log(denom);
    }
    buf.loglik = total;
    return buf;
}

MixtureModel m_step(const DataSet& data, const EStepBuffers& buffers, const MixtureModel& prev,
                    double collapse_frac) {
    const std::size_t n = data.n;
    const int l = prev.n_clusters();
    const int r = data.dim;

    MixtureModel next{prev.spec, prev.skewed, std::vector<double>(l), {}};
    next.clusters.reserve(l);

    std::vector<double> w0(n), w1(n), w2(n);
    for (int m = 0; m < l; ++m) {
        const double* v = buffers.col(buffers.v, m);
        kernels::elem_mul(w0.data(), v, buffers.col(buffers.e0, m), n);
        kernels::elem_mul(w1.data(), v, buffers.col(buffers.e1, m), n);
        kernels::elem_mul(w2.data(), v, buffers.col(buffers.e2, m), n);

        const double sv = kernels::reduce_sum(v, n);
        if (!(sv > collapse_frac * static_cast<double>(n)))
            throw ClusterCollapse("m_step: responsibilities vanished for a cluster");
        const double sw0 = kernels::reduce_sum(w0.data(), n);
        const double sw1 = kernels::reduce_sum(w1.data(), n);
        const double sw2 = kernels::reduce_sum(w2.data(), n);

        const auto& lambda_prev = prev.clusters[m].lambda();

        // xi update (uses the previous lambda)
        std::vector<double> xi(r);
        for (int j = 0; j < r; ++j) {
            const double sx = kernels::reduce_dot(w0.data(), data.col(j), n);
            xi[j] = (sx - sw1 * lambda_prev[j]) / sw0;
        }

        // lambda update (uses the new xi)
        std::vector<double> lambda(r, 0.0);
        std::vector<double> s1c(r); // sum w1 (x - xi)
        for (int j = 0; j < r; ++j)
            s1c[j] = kernels::reduce_wsum_centered(w1.data(), data.col(j), xi[j], n);
        if (prev.skewed) {
            for (int j = 0; j < r; ++j) lambda[j] = s1c[j] / sw2;
        }

        // scatter update (uses the new xi and lambda)
        std::vector<double> s(static_cast<std::size_t>(r) * r, 0.0);
        for (int a = 0; a < r; ++a) {
            for (int b = 0; b <= a; ++b) {
                const double m0 = kernels::reduce_wprod_centered(w0.data(), data.col(a), xi[a],
                                                                 data.col(b), xi[b], n);
                const double cross = s1c[a] * lambda[b] + s1c[b] * lambda[a];
                const double val = (m0 - cross + sw2 * lambda[a] * lambda[b]) / sv;
                s[static_cast<std::size_t>(a) * r + b] = val;
                s[static_cast<std::size_t>(b) * r + a] = val;
            }
        }

        next.weights[m] = sv / static_cast<double>(n);
        next.clusters.emplace_back(std::move(xi), std::move(lambda),
                                   SpdMatrix::with_jitter_repair(r, std::move(s)));
    }
    return next;
}

double incomplete_loglik(const DataSet& data, const MixtureModel& model) {
    const std::size_t n = data.n;
    const int l = model.n_clusters();
    std::vector<double> logw(n * static_cast<std::size_t>(l));
    for (int m = 0; m < l; ++m) {
        density::cluster_batch(model.spec, model.clusters[m], data, {}, {}, {},
                               {logw.data() + static_cast<std::size_t>(m) * n, n});
        const double lg = std::log(model.weights[m]);
        double* lw = logw.data() + static_cast<std::size_t>(m) * n;
        for (std::size_t i = 0; i < n; ++i) lw[i] += lg;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int m = 0; m < l; ++m) mx = std::max(mx, logw[static_cast<std::size_t>(m) * n + i]);
        double denom = 0.0;
        for (int m = 0; m < l; ++m)
            denom += std::exp(logw[static_cast<std::size_t>(m) * n + i] - mx);
        total += mx + std::log(denom);
    }
    return total;
}

namespace {

// Collapse recovery: move the dead cluster onto the lowest-density point,
// reset lambda, pooled covariance.
MixtureModel reseed_cluster(const DataSet& data, const MixtureModel& model, int dead) {
    const std::size_t n = data.n;
    const int l = model.n_clusters();
    std::vector<double> logw(n, -std::numeric_limits<double>::infinity());
    std::vector<double> lp(n);
    for (int m = 0; m < l; ++m) {
        density::cluster_batch(model.spec, model.clusters[m], data, {}, {}, {}, lp);
        const double lg = std::log(std::max(model.weights[m], 1e-300));
        for (std::size_t i = 0; i < n; ++i) {
            const double val = lg + lp[i];
            if (val > logw[i]) logw[i] = val;
        }
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (logw[i] < logw[worst]) worst = i;

    MixtureModel next = model;
    std::vector<double> lambda(data.dim, model.skewed ? 1.0 : 0.0);
    next.clusters[dead] =
        density::ClusterParams(data.row(worst), std::move(lambda), pooled_covariance(data));
    double floor_w = 1.0 / static_cast<double>(n);
    double rest = 0.0;
    for (int m = 0; m < l; ++m)
        if (m != dead) rest += next.weights[m];
    next.weights[dead] = floor_w;
    for (int m = 0; m < l; ++m)
        if (m != dead) next.weights[m] *= (1.0 - floor_w) / rest;
    return next;
}

} // namespace

EMReport fit(const DataSet& data, int l, const family::FamilySpec& spec, bool skewed,
             const FitConfig& config) {
    if (!(config.tol > 0.0)) throw DomainError("fit: tol <= 0");
    if (config.max_iter < 1) throw DomainError("fit: max_iter < 1");

    EMReport report;
    report.seed = config.seed;

    // burn in every init flavor briefly and continue from the best
    // log-likelihood
    auto candidates = init_candidates(data, l, spec, skewed, config.seed);
    const int burn = std::min(60, config.max_iter);

    struct Trajectory {
        MixtureModel model;
        std::vector<double> trace;
        bool dead = false;
        bool converged = false;
    };
    std::vector<Trajectory> trajectories;
    trajectories.reserve(candidates.size());
    for (auto& cand : candidates) {
        Trajectory traj{std::move(cand), {}, false, false};
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (int it = 1; it <= burn; ++it) {
            try {
                const auto buffers = e_step(data, traj.model);
                traj.model = m_step(data, buffers, traj.model, config.collapse_frac);
            } catch (const Error&) {
                traj.dead = true;
                break;
            }
            const double ll = incomplete_loglik(data, traj.model);
            traj.trace.push_back(ll);
            if (std::isfinite(prev) && std::abs(ll - prev) < config.tol) {
                traj.converged = true;
                break;
            }
            prev = ll;
        }
        trajectories.push_back(std::move(traj));
    }

    int best = -1;
    for (std::size_t c = 0; c < trajectories.size(); ++c) {
        const auto& t = trajectories[c];
        if (t.dead || t.trace.empty()) continue;
        if (best < 0 || t.trace.back() > trajectories[best].trace.back())
            best = static_cast<int>(c);
    }
    if (best < 0) throw ClusterCollapse("fit: every initialization collapsed during burn-in");

    MixtureModel model = std::move(trajectories[best].model);
    report.ll_trace = std::move(trajectories[best].trace);
    bool converged = trajectories[best].converged;

    EStepBuffers buffers;
    double prev_ll = report.ll_trace.empty() ? std::numeric_limits<double>::quiet_NaN()
                                             : report.ll_trace.back();
    int collapse_budget = 3;

    for (int it = static_cast<int>(report.ll_trace.size()) + 1;
         it <= config.max_iter && !converged; ++it) {
        buffers = e_step(data, model);
        try {
            model = m_step(data, buffers, model, config.collapse_frac);
        } catch (const ClusterCollapse&) {
            if (--collapse_budget < 0) throw;
            int dead = 0;
            double smallest = std::numeric_limits<double>::infinity();
            for (int m = 0; m < l; ++m) {
                const double sv = kernels::reduce_sum(buffers.col(buffers.v, m), data.n);
                if (sv < smallest) {
                    smallest = sv;
                    dead = m;
                }
            }
            model = reseed_cluster(data, model, dead);
            ++report.reseeds;
            prev_ll = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double ll = incomplete_loglik(data, model);
        report.ll_trace.push_back(ll);
        if (std::isfinite(prev_ll) && std::abs(ll - prev_ll) < config.tol) {
            converged = true;
            break;
        }
        prev_ll = ll;
    }

    report.converged = converged;
    report.iterations = static_cast<int>(report.ll_trace.size());
    buffers = e_step(data, model);
    report.resp = buffers.v;
    report.model = std::move(model);
    return report;
}

std::vector<ClusterGradients> grad_check_pack(const DataSet& data, const MixtureModel& model,
                                              const EStepBuffers& buffers) {
    const std::size_t n = data.n;
    const int l = model.n_clusters();
    const int r = data.dim;
    if (buffers.n != n || buffers.l != l) throw DimensionMismatch("grad_check_pack: buffer shape");

    std::vector<ClusterGradients> out(l);
    std::vector<double> d(r), u(r);
    for (int m = 0; m < l; ++m) {
        const auto& p = model.clusters[m];
        const double* v = buffers.col(buffers.v, m);
        const double* e0 = buffers.col(buffers.e0, m);
        const double* e1 = buffers.col(buffers.e1, m);
        const double* e2 = buffers.col(buffers.e2, m);

        const auto& sinv = p.scatter_inv();
        const auto& w = p.sinv_lambda(); // S^-1 lambda

        // accumulate in the untransformed coordinates, solve once at the end
        std::vector<double> acc_xi(r, 0.0), acc_lambda(r, 0.0);
        // matrix M with grad_S = vec(M)^T D_r
        std::vector<double> mmat(static_cast<std::size_t>(r) * r, 0.0);
        double sv = 0.0, sve2 = 0.0;

        for (std::size_t i = 0; i < n; ++i) {
            for (int j = 0; j < r; ++j) d[j] = data.at(i, j) - p.xi()[j];
            // u = S^-1 d
            for (int a = 0; a < r; ++a) {
                double s = 0.0;
                for (int b = 0; b < r; ++b) s += sinv[static_cast<std::size_t>(a) * r + b] * d[b];
                u[a] = s;
            }
            const double vi = v[i];
            sv += vi;
            sve2 += vi * e2[i];
            for (int j = 0; j < r; ++j) {
                acc_xi[j] += vi * (e0[i] * d[j] - e1[i] * p.lambda()[j]);
                acc_lambda[j] += vi * e1[i] * d[j];
            }
            for (int a = 0; a < r; ++a)
                for (int b = 0; b < r; ++b)
                    mmat[static_cast<std::size_t>(a) * r + b] +=
                        vi * (0.5 * e0[i] * u[a] * u[b] -
                              0.5 * e1[i] * (u[a] * w[b] + w[a] * u[b]) +
                              0.5 * e2[i] * w[a] * w[b]);
        }

        out[m].xi = p.scatter().solve(acc_xi);
        for (int j = 0; j < r; ++j) acc_lambda[j] -= sve2 * p.lambda()[j];
        out[m].lambda = p.scatter().solve(acc_lambda);

        for (int a = 0; a < r; ++a)
            for (int b = 0; b < r; ++b)
                mmat[static_cast<std::size_t>(a) * r + b] -=
                    0.5 * sv * sinv[static_cast<std::size_t>(a) * r + b];

        // vech order: (0,0),(1,0),...,(r-1,0),(1,1),...
        out[m].scatter.reserve(static_cast<std::size_t>(r) * (r + 1) / 2);
        for (int b = 0; b < r; ++b)
            for (int a = b; a < r; ++a) {
                const double g_ab = mmat[static_cast<std::size_t>(a) * r + b];
                out[m].scatter.push_back(a == b ? g_ab
                                                : g_ab + mmat[static_cast<std::size_t>(b) * r + a]);
            }
    }
    return out;
}

} // namespace resk::em
