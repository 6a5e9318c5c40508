#include "resk/enumeration.hpp"

#include <cmath>
#include <limits>

#include "resk/rng.hpp"

namespace resk::enumeration {

BicScore bic_schwarz(const em::EMReport& fit, const DataSet& data) {
    const auto& model = fit.model;
    const int l = model.n_clusters();
    const int r = model.dim();
    const std::size_t n = data.n;
    const auto assign = fit.hard_assignment();

    BicScore score;
    for (int m = 0; m < l; ++m) {
        std::size_t n_m = 0;
        double sum_rho = 0.0, sum_logf = 0.0;
        const auto& p = model.clusters[m];
        for (std::size_t i = 0; i < n; ++i) {
            if (assign[i] != m + 1) continue;
            ++n_m;
            const auto x = data.row(i);
            const auto s = density::skew_scalars(p, x);
            sum_rho += family::rho(model.spec, s.t);
            if (model.skewed) {
                const double k = density::kappa(model.spec, s.t, s.eta, s.tau);
                sum_logf += family::log_cdf_1d(model.spec, k);
            }
        }
        if (n_m == 0) throw EmptyCluster("bic_schwarz: hard assignment emptied a cluster");
        const double nm = static_cast<double>(n_m);
        double ll = -sum_rho + nm * std::log(nm / static_cast<double>(n));
        if (model.skewed) {
            ll += nm * std::log(2.0) - 0.5 * nm * p.omega().log_det() + sum_logf;
        } else {
            ll += -0.5 * nm * p.scatter().log_det();
        }
        score.loglik += ll;
    }

    const double q = model.skewed ? 0.5 * r * (r + 5) : 0.5 * r * (r + 3);
    score.penalty = 0.5 * q * l * std::log(static_cast<double>(n));
    return score;
}

BicSweep enumerate_clusters(const DataSet& data, int l_min, int l_max,
                            const family::FamilySpec& spec, bool skewed,
                            const em::FitConfig& config) {
    if (l_min < 1 || l_max < l_min) throw DomainError("enumerate: bad candidate range");

    BicSweep sweep;
    sweep.l_min = l_min;
    sweep.l_max = l_max;

    double best = -std::numeric_limits<double>::infinity();
    sweep.k_hat = l_min;
    for (int l = l_min; l <= l_max; ++l) {
        double value = -std::numeric_limits<double>::infinity();
        try {
            em::FitConfig cfg = config;
            cfg.seed = Rng::derive(config.seed, static_cast<uint64_t>(l));
            em::EMReport report = em::fit(data, l, spec, skewed, cfg);
            value = bic_schwarz(report, data).value();
            sweep.fits.emplace(l, std::move(report));
        } catch (const Error&) {
            // candidate scored -inf, sweep continues
        }
        sweep.scores[l] = value;
        if (value > best) {
            best = value;
            sweep.k_hat = l;
        }
    }
    return sweep;
}

} // namespace resk::enumeration
