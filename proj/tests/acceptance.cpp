// Acceptance suite: one pass/fail line per criterion. Quantitative targets
// are desk-scale Monte Carlo reproductions of the reference experiments; the
// wine criterion needs the downloaded quality CSVs and is skipped otherwise.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "resk/em.hpp"
#include "resk/enumeration.hpp"
#include "resk/evaluate.hpp"
#include "resk/io.hpp"
#include "resk/rng.hpp"
#include "resk/simulate.hpp"

using namespace resk;
using density::ClusterParams;
using family::FamilySpec;
using numerics::SpdMatrix;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << idx << ". " << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

void report_skip(int idx, const std::string& name, const std::string& why) {
    std::cout << "[SKIP] " << idx << ". " << name << "  (" << why << ")" << std::endl;
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream ss;
    ss.precision(prec);
    ss << std::fixed << v;
    return ss.str();
}

struct FamilySet {
    std::vector<std::string> labels;
    std::vector<FamilySpec> specs;
    std::vector<bool> skewed;
};

// the six estimators of the simulated-data tables; Huber threshold quantile
// at one dof (c = 1.282 at q_H = 0.8)
FamilySet table_families() {
    FamilySet fs;
    const auto gauss = FamilySpec::gaussian(2);
    const auto t3 = FamilySpec::student_t(2, 3.0);
    const auto hub = FamilySpec::huber(2, 0.8);
    fs.labels = {"gaussian", "t3", "huber", "skew-gaussian", "skew-t3", "skew-huber"};
    fs.specs = {gauss, t3, hub, gauss, t3, hub};
    fs.skewed = {false, false, false, true, true, true};
    return fs;
}

// --- criterion 1 -----------------------------------------------------------
void criterion_density_normalization() {
    bool pass = true;
    std::string detail;
    for (int r : {1, 2}) {
        for (int fam = 0; fam < 3; ++fam) {
            const FamilySpec spec = fam == 0   ? FamilySpec::gaussian(r)
                                    : fam == 1 ? FamilySpec::student_t(r, 3.0)
                                               : FamilySpec::huber(r, 0.8);
            for (double ls : {0.0, 1.0}) {
                std::vector<double> xi(r, 0.5), lambda(r);
                for (int j = 0; j < r; ++j) lambda[j] = ls * (j + 1.0);
                std::vector<double> s(r * r, 0.0);
                for (int i = 0; i < r; ++i) {
                    s[i * r + i] = 1.0 + 0.3 * i;
                    for (int j = 0; j < i; ++j) s[i * r + j] = s[j * r + i] = 0.2;
                }
                const ClusterParams p(xi, lambda, SpdMatrix(r, s));
                double total;
                if (r == 1) {
                    total = oracles::integrate_density_1d(
                        [&](double x) {
                            return density::resk_pdf(spec, p, std::vector<double>{x});
                        },
                        xi[0], 1.5, 1e5, 25000);
                } else {
                    total = oracles::integrate_density_2d(
                        [&](double x, double y) {
                            return density::resk_pdf(spec, p, std::vector<double>{x, y});
                        },
                        xi[0], xi[1], 2.0, 3e4, 2000);
                }
                if (std::abs(total - 1.0) > 1e-4) {
                    pass = false;
                    detail += std::string(spec.name()) + "/r=" + std::to_string(r) +
                              " integral " + fmt(total, 6) + " ";
                }
            }
        }
    }
    report(1, "density normalization 1 +- 1e-4, every family, r in {1,2}", pass,
           pass ? "max deviation within tolerance" : detail);
}

// --- criterion 2 -----------------------------------------------------------
void criterion_lambda_zero_reduction() {
    Rng rng(1002);
    double worst = 0.0;
    for (int fam = 0; fam < 3; ++fam) {
        const FamilySpec spec = fam == 0   ? FamilySpec::gaussian(2)
                                : fam == 1 ? FamilySpec::student_t(2, 3.0)
                                           : FamilySpec::huber(2, 0.8);
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> xi = {rng.normal(), rng.normal()};
            std::vector<double> mm = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
            std::vector<double> s(4, 0.0);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    for (int k = 0; k < 2; ++k) s[i * 2 + j] += mm[k * 2 + i] * mm[k * 2 + j];
                    if (i == j) s[i * 2 + j] += 0.5;
                }
            const ClusterParams p(xi, {0.0, 0.0}, SpdMatrix(2, s));
            std::vector<double> x = {xi[0] + 3.0 * rng.normal(), xi[1] + 3.0 * rng.normal()};
            const double a = density::resk_logpdf(spec, p, x);
            const double b = density::res_logpdf(spec, xi, p.scatter(), x);
            worst = std::max(worst, std::abs(a - b));
        }
    }
    report(2, "lambda = 0 reduces the skewed log-pdf to the symmetric one", worst < 1e-12,
           "max |difference| = " + fmt(worst, 16));
}

// --- criterion 3 -----------------------------------------------------------
void criterion_huber_closed_forms() {
    bool pass = true;
    std::string detail;

    const auto spec = FamilySpec::huber(1, 0.8);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double z = -3.5 + 7.0 * i / 19.0;
        const double quad =
            0.5 + oracles::integrate([&](double u) { return family::pdf_1d(spec, u); }, 0.0, z,
                                     1e-13);
        worst = std::max(worst, std::abs(family::cdf_1d(spec, z) - quad));
    }
    if (worst > 1e-8) {
        pass = false;
        detail += "cdf vs quadrature " + fmt(worst, 12) + " ";
    }

    bool rejected = false;
    try {
        FamilySpec::huber(2, 0.703);
    } catch (const ConstraintViolated&) {
        rejected = true;
    }
    if (!rejected) {
        pass = false;
        detail += "q_H = 0.703 accepted ";
    }
    rejected = false;
    try {
        FamilySpec::huber(2, 0.5);
    } catch (const ConstraintViolated&) {
        rejected = true;
    }
    if (!rejected) {
        pass = false;
        detail += "q_H = 0.5 accepted ";
    }

    const double c = FamilySpec::huber(2, 0.8, 1).c();
    if (std::abs(c - 1.282) > 1e-3) {
        pass = false;
        detail += "c = " + fmt(c, 5) + " ";
    }
    report(3, "Huber closed forms: cdf quadrature 1e-8, constraint, c = 1.282", pass,
           pass ? "cdf max err " + fmt(worst, 12) + ", c = " + fmt(c, 4) : detail);
}

// --- criterion 4 -----------------------------------------------------------
double surrogate(const DataSet& data, const em::EStepBuffers& buf, int m,
                 const std::vector<double>& xi, const std::vector<double>& lambda,
                 const std::vector<double>& s_entries) {
    const int r = data.dim;
    const double logdet = std::log(oracles::det3(s_entries, r));
    const double* v = buf.col(buf.v, m);
    const double* e0 = buf.col(buf.e0, m);
    const double* e1 = buf.col(buf.e1, m);
    const double* e2 = buf.col(buf.e2, m);
    const auto sinv_lambda = oracles::gauss_solve(s_entries, lambda);
    double lsl = 0.0;
    for (int j = 0; j < r; ++j) lsl += lambda[j] * sinv_lambda[j];
    double total = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
        std::vector<double> d(r);
        for (int j = 0; j < r; ++j) d[j] = data.at(i, j) - xi[j];
        const auto sd = oracles::gauss_solve(s_entries, d);
        double dsd = 0.0, lsd = 0.0;
        for (int j = 0; j < r; ++j) {
            dsd += d[j] * sd[j];
            lsd += lambda[j] * sd[j];
        }
        total += v[i] * (-0.5 * logdet - 0.5 * e0[i] * dsd + e1[i] * lsd - 0.5 * e2[i] * lsl);
    }
    return total;
}

void criterion_gradient_oracle() {
    Rng rng(1004);
    double worst_rel = 0.0, worst_opt = 0.0;
    for (int fixture = 0; fixture < 10; ++fixture) {
        DataSet data(2, 20);
        for (std::size_t i = 0; i < data.n; ++i)
            for (int j = 0; j < 2; ++j) data.at(i, j) = 3.0 * rng.normal();
        const FamilySpec spec = fixture % 3 == 0   ? FamilySpec::gaussian(2)
                                : fixture % 3 == 1 ? FamilySpec::student_t(2, 3.0)
                                                   : FamilySpec::huber(2, 0.8, 1);
        em::MixtureModel model{spec, true, {0.6, 0.4}, {}};
        for (int m = 0; m < 2; ++m) {
            std::vector<double> xi = {2.0 * rng.normal(), 2.0 * rng.normal()};
            std::vector<double> lambda = {rng.normal(), rng.normal()};
            std::vector<double> mm = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
            std::vector<double> s(4, 0.0);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    for (int k = 0; k < 2; ++k) s[i * 2 + j] += mm[k * 2 + i] * mm[k * 2 + j];
                    if (i == j) s[i * 2 + j] += 0.6;
                }
            model.clusters.emplace_back(xi, lambda, SpdMatrix(2, s));
        }
        const auto buf = em::e_step(data, model);
        const auto grads = em::grad_check_pack(data, model, buf);

        for (int m = 0; m < 2; ++m) {
            const auto& p = model.clusters[m];
            const auto xi = p.xi();
            const auto lambda = p.lambda();
            const auto s = p.scatter().entries();
            std::vector<double> fd;
            auto rel_err = [&](const std::vector<double>& a, const std::vector<double>& b) {
                double scale = 1e-8, err = 0.0;
                for (double v : a) scale = std::max(scale, std::abs(v));
                for (std::size_t i = 0; i < a.size(); ++i)
                    err = std::max(err, std::abs(a[i] - b[i]) / scale);
                return err;
            };
            fd.clear();
            for (int j = 0; j < 2; ++j) {
                const double h = 1e-6 * std::max(1.0, std::abs(xi[j]));
                auto lo = xi, hi = xi;
                lo[j] -= h;
                hi[j] += h;
                fd.push_back((surrogate(data, buf, m, hi, lambda, s) -
                              surrogate(data, buf, m, lo, lambda, s)) /
                             (2.0 * h));
            }
            worst_rel = std::max(worst_rel, rel_err(grads[m].xi, fd));
            fd.clear();
            for (int j = 0; j < 2; ++j) {
                const double h = 1e-6 * std::max(1.0, std::abs(lambda[j]));
                auto lo = lambda, hi = lambda;
                lo[j] -= h;
                hi[j] += h;
                fd.push_back((surrogate(data, buf, m, xi, hi, s) -
                              surrogate(data, buf, m, xi, lo, s)) /
                             (2.0 * h));
            }
            worst_rel = std::max(worst_rel, rel_err(grads[m].lambda, fd));
            fd.clear();
            for (int b = 0; b < 2; ++b)
                for (int a = b; a < 2; ++a) {
                    const double h = 1e-6 * std::max(1.0, std::abs(s[a * 2 + b]));
                    auto lo = s, hi = s;
                    lo[a * 2 + b] -= h;
                    hi[a * 2 + b] += h;
                    if (a != b) {
                        lo[b * 2 + a] -= h;
                        hi[b * 2 + a] += h;
                    }
                    fd.push_back((surrogate(data, buf, m, xi, lambda, hi) -
                                  surrogate(data, buf, m, xi, lambda, lo)) /
                                 (2.0 * h));
                }
            worst_rel = std::max(worst_rel, rel_err(grads[m].scatter, fd));
        }

        // first-order condition at the closed-form update
        const auto next = em::m_step(data, buf, model);
        em::MixtureModel hx = model, hl = model;
        for (int m = 0; m < 2; ++m) {
            hx.clusters[m] = ClusterParams(next.clusters[m].xi(), model.clusters[m].lambda(),
                                           model.clusters[m].scatter());
            hl.clusters[m] = ClusterParams(next.clusters[m].xi(), next.clusters[m].lambda(),
                                           model.clusters[m].scatter());
        }
        for (const auto& g : em::grad_check_pack(data, hx, buf))
            for (double v : g.xi) worst_opt = std::max(worst_opt, std::abs(v));
        for (const auto& g : em::grad_check_pack(data, hl, buf))
            for (double v : g.lambda) worst_opt = std::max(worst_opt, std::abs(v));
        for (const auto& g : em::grad_check_pack(data, next, buf))
            for (double v : g.scatter) worst_opt = std::max(worst_opt, std::abs(v));
    }
    const bool pass = worst_rel < 1e-5 && worst_opt < 1e-8;
    report(4, "analytic gradients: finite differences 1e-5, optimum 1e-8", pass,
           "fd rel err " + fmt(worst_rel, 8) + ", optimum max " + fmt(worst_opt, 12));
}

// --- criterion 5 -----------------------------------------------------------
void criterion_monotonicity(int threads) {
    std::atomic<int> violations{0};
    std::atomic<int> reseeds{0};
    std::vector<double> worst(50, 0.0);
    evaluate::parallel_cells(50, threads, [&](std::size_t rep) {
        const auto data = simulate::preset("dataset1", 50, 5000 + rep);
        em::FitConfig cfg;
        cfg.seed = rep;
        const auto report_ = em::fit(data, 3, FamilySpec::gaussian(2), true, cfg);
        reseeds += report_.reseeds;
        double w = 0.0;
        for (std::size_t i = 1; i < report_.ll_trace.size(); ++i)
            w = std::min(w, report_.ll_trace[i] - report_.ll_trace[i - 1]);
        worst[rep] = w;
        if (w < -1e-8) ++violations;
    });
    const double min_step = *std::min_element(worst.begin(), worst.end());
    report(5, "skew-gaussian EM log-likelihood non-decreasing over 50 runs",
           violations.load() == 0,
           "worst step " + fmt(min_step, 12) + ", reseeds " + std::to_string(reseeds.load()));
}

// --- criterion 6 -----------------------------------------------------------
double chi2_gof_p(const std::vector<double>& sample, const std::function<double(double)>& pdf,
                  double lo, double hi, int bins) {
    const double w = (hi - lo) / bins;
    std::vector<double> observed(bins + 2, 0.0), expected(bins + 2, 0.0);
    for (double x : sample) {
        int b;
        if (x < lo)
            b = 0;
        else if (x >= hi)
            b = bins + 1;
        else
            b = 1 + static_cast<int>((x - lo) / w);
        observed[b] += 1.0;
    }
    const double n = static_cast<double>(sample.size());
    expected[0] = n * oracles::integrate(pdf, lo - 60.0, lo, 1e-10);
    expected[bins + 1] = n * oracles::integrate(pdf, hi, hi + 60.0, 1e-10);
    for (int b = 0; b < bins; ++b)
        expected[b + 1] = n * oracles::integrate(pdf, lo + b * w, lo + (b + 1) * w, 1e-10);
    std::vector<double> obs_m, exp_m;
    double co = 0.0, ce = 0.0;
    for (std::size_t b = 0; b < expected.size(); ++b) {
        co += observed[b];
        ce += expected[b];
        if (ce >= 5.0) {
            obs_m.push_back(co);
            exp_m.push_back(ce);
            co = ce = 0.0;
        }
    }
    if (ce > 0.0 && !exp_m.empty()) {
        obs_m.back() += co;
        exp_m.back() += ce;
    }
    double stat = 0.0;
    for (std::size_t b = 0; b < exp_m.size(); ++b) {
        const double d = obs_m[b] - exp_m[b];
        stat += d * d / exp_m[b];
    }
    return 1.0 - numerics::chi2_cdf(static_cast<int>(exp_m.size()) - 1, stat);
}

void criterion_sampler_fidelity() {
    const auto gspec = FamilySpec::gaussian(1);
    const ClusterParams gp({0.0}, {3.0}, SpdMatrix::identity(1));
    const auto gd = simulate::sample_skew_gaussian({0.0}, SpdMatrix::identity(1), {3.0}, 100000, 601);
    std::vector<double> xs(gd.n);
    double mean = 0.0;
    for (std::size_t i = 0; i < gd.n; ++i) {
        xs[i] = gd.at(i, 0);
        mean += xs[i];
    }
    mean /= static_cast<double>(gd.n);
    const double p_gauss = chi2_gof_p(
        xs, [&](double x) { return density::resk_pdf(gspec, gp, std::vector<double>{x}); }, -4.0,
        12.0, 50);

    const auto tspec = FamilySpec::student_t(1, 3.0);
    const ClusterParams tp({0.5}, {2.0}, SpdMatrix(1, {1.2}));
    const auto td = simulate::sample_skew_t({0.5}, SpdMatrix(1, {1.2}), {2.0}, 3.0, 100000, 602);
    std::vector<double> ts(td.n);
    for (std::size_t i = 0; i < td.n; ++i) ts[i] = td.at(i, 0);
    const double p_t = chi2_gof_p(
        ts, [&](double x) { return density::resk_pdf(tspec, tp, std::vector<double>{x}); }, -8.0,
        14.0, 50);

    const double mean_target = 3.0 * std::sqrt(2.0 / M_PI);
    const bool pass = p_gauss > 0.01 && p_t > 0.01 && std::abs(mean - mean_target) < 0.03;
    report(6, "sampler fidelity: chi-square p > 0.01, half-normal mean shift", pass,
           "p_gauss = " + fmt(p_gauss) + ", p_t = " + fmt(p_t) + ", mean " + fmt(mean, 4) +
               " vs " + fmt(mean_target, 4));
}

// --- criteria 7 and 8 ------------------------------------------------------
std::vector<double> confusion_averages(double eps, int mc, int threads, uint64_t base_seed) {
    const auto fams = table_families();
    const std::size_t cells = fams.labels.size() * static_cast<std::size_t>(mc);
    std::vector<double> avg(cells, std::numeric_limits<double>::quiet_NaN());
    evaluate::parallel_cells(cells, threads, [&](std::size_t cell) {
        const std::size_t f = cell / mc;
        const std::size_t rep = cell % mc;
        const uint64_t seed = Rng::derive(base_seed, rep);
        try {
            DataSet data = simulate::preset("dataset1", 50, seed);
            if (eps > 0.0)
                data = simulate::contaminate(data, simulate::ContaminationSpec::box2d(eps),
                                             Rng::derive(seed, 3));
            em::FitConfig cfg;
            cfg.seed = seed;
            const auto fit = em::fit(data, 3, fams.specs[f], fams.skewed[f], cfg);
            avg[cell] =
                evaluate::confusion_from_resp(data.labels, fit.resp, data.n, 3, true).average;
        } catch (const Error&) {
            // cell dropped from the mean
        }
    });
    std::vector<double> means(fams.labels.size(), 0.0);
    for (std::size_t f = 0; f < fams.labels.size(); ++f) {
        double total = 0.0;
        int ok = 0;
        for (int rep = 0; rep < mc; ++rep) {
            const double v = avg[f * mc + rep];
            if (std::isnan(v)) continue;
            total += v;
            ++ok;
        }
        means[f] = ok > 0 ? total / ok : 0.0;
    }
    return means;
}

void criterion_confusion_clean(int threads) {
    const std::vector<double> target = {93.9, 96.5, 96.7, 96.9, 95.1, 97.2};
    const auto fams = table_families();
    const auto means = confusion_averages(0.0, 100, threads, 701);
    bool pass = true;
    std::string detail;
    for (std::size_t f = 0; f < means.size(); ++f) {
        if (std::abs(means[f] - target[f]) > 3.0) pass = false;
        detail += fams.labels[f] + " " + fmt(means[f], 1) + "/" + fmt(target[f], 1) + " ";
    }
    report(7, "clean-data confusion averages within 3 points of the reference", pass, detail);
}

void criterion_confusion_contaminated(int threads) {
    const auto fams = table_families();
    const auto means = confusion_averages(0.02, 100, threads, 801);
    std::string detail;
    for (std::size_t f = 0; f < means.size(); ++f)
        detail += fams.labels[f] + " " + fmt(means[f], 1) + " ";
    const bool gauss_break = means[0] < 75.0 && means[3] < 75.0;
    const bool robust_hold = means[1] > 90.0 && means[2] > 90.0 && means[4] > 90.0 &&
                             means[5] > 90.0;
    report(8, "2% outliers: gaussian variants below 75, robust variants above 90",
           gauss_break && robust_hold, detail);
}

// --- criterion 9 -----------------------------------------------------------
void criterion_enumeration(int threads) {
    const int runs = 50;
    std::atomic<int> hits{0};
    evaluate::parallel_cells(runs, threads, [&](std::size_t rep) {
        const uint64_t seed = Rng::derive(901, rep);
        const auto data = simulate::preset("dataset1", 50, seed);
        em::FitConfig cfg;
        cfg.seed = seed;
        try {
            const auto sweep = enumeration::enumerate_clusters(data, 1, 6,
                                                               FamilySpec::gaussian(2), true, cfg);
            if (sweep.k_hat == 3) ++hits;
        } catch (const Error&) {
        }
    });
    const double p = hits.load() / static_cast<double>(runs);
    report(9, "skewed criterion detects three clusters with probability 0.9", p >= 0.9,
           "P(K_hat = 3) = " + fmt(p, 2));
}

// --- criterion 10 ----------------------------------------------------------
void criterion_kl_trend(int threads) {
    const int mc = 50;
    struct Entry { std::string label; FamilySpec spec; bool skewed; };
    const std::vector<Entry> fams = {
        {"gaussian", FamilySpec::gaussian(2), false},
        {"huber", FamilySpec::huber(2, 0.8), false},
        {"skew-gaussian", FamilySpec::gaussian(2), true},
        {"skew-huber", FamilySpec::huber(2, 0.8), true},
    };
    const std::size_t cells = fams.size() * static_cast<std::size_t>(mc);
    std::vector<double> kl(cells, std::numeric_limits<double>::quiet_NaN());
    evaluate::parallel_cells(cells, threads, [&](std::size_t cell) {
        const std::size_t f = cell / mc;
        const std::size_t rep = cell % mc;
        const uint64_t seed = Rng::derive(1001, rep);
        try {
            const auto clean = simulate::preset("dataset1", 50, seed);
            const auto obs = simulate::contaminate(
                clean, simulate::ContaminationSpec::box2d(0.04), Rng::derive(seed, 3));
            em::FitConfig cfg;
            cfg.seed = seed;
            const auto fit = em::fit(obs, 3, fams[f].spec, fams[f].skewed, cfg);
            const auto truth =
                evaluate::preset_truth("dataset1", FamilySpec::gaussian(2), true);
            kl[cell] = evaluate::kl_divergence(truth, fit.model, clean);
        } catch (const Error&) {
        }
    });
    std::vector<double> means(fams.size(), 0.0);
    for (std::size_t f = 0; f < fams.size(); ++f) {
        double total = 0.0;
        int ok = 0;
        for (int rep = 0; rep < mc; ++rep) {
            if (std::isnan(kl[f * mc + rep])) continue;
            total += kl[f * mc + rep];
            ++ok;
        }
        means[f] = ok > 0 ? total / ok : 1e18;
    }
    const bool pass = means[3] < means[2] && means[0] > 2.0 * means[1];
    report(10, "4% outliers: skew-huber beats skew-gaussian, gaussian far above huber", pass,
           "gaussian " + fmt(means[0], 1) + ", huber " + fmt(means[1], 1) + ", skew-gaussian " +
               fmt(means[2], 1) + ", skew-huber " + fmt(means[3], 1));
}

// --- criterion 11 ----------------------------------------------------------
void criterion_wine(const std::string& data_dir, int threads) {
    const std::string red = data_dir + "/winequality-red.csv";
    const std::string white = data_dir + "/winequality-white.csv";
    if (!std::ifstream(red) || !std::ifstream(white)) {
        report_skip(11, "wine data: skew-huber >= skew-t >= gaussian, skew-huber >= 90",
                    "download winequality-red.csv / winequality-white.csv into " + data_dir);
        return;
    }

    io::LoadSpec spec;
    spec.feature_cols = {"volatile acidity", "residual sugar", "chlorides",
                         "total sulfur dioxide"};
    spec.sep = ';';
    const auto red_data = io::load_csv(red, spec);
    const auto white_data = io::load_csv(white, spec);
    DataSet base(4, red_data.n + white_data.n);
    base.labels.assign(base.n, 0);
    for (std::size_t i = 0; i < red_data.n; ++i) {
        for (int j = 0; j < 4; ++j) base.at(i, j) = red_data.at(i, j);
        base.labels[i] = 1;
    }
    for (std::size_t i = 0; i < white_data.n; ++i) {
        for (int j = 0; j < 4; ++j) base.at(red_data.n + i, j) = white_data.at(i, j);
        base.labels[red_data.n + i] = 2;
    }
    simulate::ContaminationSpec box;
    box.epsilon = 0.03;
    box.lo.resize(4);
    box.hi.resize(4);
    for (int j = 0; j < 4; ++j) {
        double lo = base.at(0, j), hi = base.at(0, j);
        for (std::size_t i = 1; i < base.n; ++i) {
            lo = std::min(lo, base.at(i, j));
            hi = std::max(hi, base.at(i, j));
        }
        box.lo[j] = lo;
        box.hi[j] = hi;
    }

    struct Entry { std::string label; FamilySpec spec; bool skewed; };
    const std::vector<Entry> fams = {
        {"gaussian", FamilySpec::gaussian(4), false},
        {"skew-t3", FamilySpec::student_t(4, 3.0), true},
        {"skew-huber", FamilySpec::huber(4, 0.8), true},
    };
    const int mc = 20;
    const std::size_t cells = fams.size() * static_cast<std::size_t>(mc);
    std::vector<double> avg(cells, std::numeric_limits<double>::quiet_NaN());
    evaluate::parallel_cells(cells, threads, [&](std::size_t cell) {
        const std::size_t f = cell / mc;
        const std::size_t rep = cell % mc;
        const uint64_t seed = Rng::derive(1101, rep);
        try {
            const auto obs = simulate::contaminate(base, box, seed);
            em::FitConfig cfg;
            cfg.seed = seed;
            cfg.max_iter = 500; // labeling quality saturates well before that
            const auto fit = em::fit(obs, 2, fams[f].spec, fams[f].skewed, cfg);
            avg[cell] =
                evaluate::confusion_from_resp(obs.labels, fit.resp, obs.n, 2, true).average;
        } catch (const Error&) {
        }
    });
    std::vector<double> means(fams.size(), 0.0);
    for (std::size_t f = 0; f < fams.size(); ++f) {
        double total = 0.0;
        int ok = 0;
        for (int rep = 0; rep < mc; ++rep) {
            if (std::isnan(avg[f * mc + rep])) continue;
            total += avg[f * mc + rep];
            ++ok;
        }
        means[f] = ok > 0 ? total / ok : 0.0;
    }
    const bool pass = means[2] >= means[1] && means[1] >= means[0] && means[2] >= 90.0;
    report(11, "wine data: skew-huber >= skew-t >= gaussian, skew-huber >= 90", pass,
           "gaussian " + fmt(means[0], 1) + ", skew-t3 " + fmt(means[1], 1) + ", skew-huber " +
               fmt(means[2], 1));
}

// --- criterion 12 ----------------------------------------------------------
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_reproducibility(const std::string& cli) {
    if (cli.empty()) {
        report(12, "seeded CLI runs are byte-identical", false, "no --cli binary given");
        return;
    }
    char tmpl[] = "/tmp/reskit_accept_XXXXXX";
    const std::string dir = mkdtemp(tmpl);
    auto run = [&](const std::string& args) {
        return std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    };
    bool pass = true;
    std::string detail;

    if (run("simulate --preset dataset1 --nk 50 --eps 0.02 --seed 7 --out " + dir + "/a.csv") != 0 ||
        run("simulate --preset dataset1 --nk 50 --eps 0.02 --seed 7 --out " + dir + "/b.csv") != 0 ||
        slurp(dir + "/a.csv").empty() || slurp(dir + "/a.csv") != slurp(dir + "/b.csv")) {
        pass = false;
        detail += "simulate differs ";
    }
    if (run("fit --input " + dir + "/a.csv --k 3 --family skew-huber --qh 0.8 --qh-dim 1"
            " --seed 5 --out " + dir + "/m1.json --trace " + dir + "/t1.csv") != 0 ||
        run("fit --input " + dir + "/a.csv --k 3 --family skew-huber --qh 0.8 --qh-dim 1"
            " --seed 5 --out " + dir + "/m2.json --trace " + dir + "/t2.csv") != 0 ||
        slurp(dir + "/m1.json").empty() || slurp(dir + "/m1.json") != slurp(dir + "/m2.json") ||
        slurp(dir + "/t1.csv") != slurp(dir + "/t2.csv")) {
        pass = false;
        detail += "fit differs ";
    }
    const std::string brk =
        "breakdown --preset dataset1 --nk 20 --eps 0,0.02 --families gaussian,huber --mc 3"
        " --seed 11 --lmin 2 --lmax 4 --threads 2 --qh-dim 1 --out ";
    if (run(brk + dir + "/s1.csv") != 0 || run(brk + dir + "/s2.csv") != 0 ||
        slurp(dir + "/s1.csv").empty() || slurp(dir + "/s1.csv") != slurp(dir + "/s2.csv")) {
        pass = false;
        detail += "breakdown differs ";
    }
    report(12, "seeded CLI runs are byte-identical", pass, pass ? "simulate, fit, breakdown" : detail);
}

} // namespace

int main(int argc, char** argv) {
    std::string cli, data_dir = "data";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--cli") == 0 && i + 1 < argc) cli = argv[++i];
        else if (std::strcmp(argv[i], "--data-dir") == 0 && i + 1 < argc) data_dir = argv[++i];
        else only.insert(std::atoi(argv[i]));
    }
    const int threads = 0; // all cores
    auto want = [&](int idx) { return only.empty() || only.count(idx) > 0; };

    if (want(1)) criterion_density_normalization();
    if (want(2)) criterion_lambda_zero_reduction();
    if (want(3)) criterion_huber_closed_forms();
    if (want(4)) criterion_gradient_oracle();
    if (want(5)) criterion_monotonicity(threads);
    if (want(6)) criterion_sampler_fidelity();
    if (want(7)) criterion_confusion_clean(threads);
    if (want(8)) criterion_confusion_contaminated(threads);
    if (want(9)) criterion_enumeration(threads);
    if (want(10)) criterion_kl_trend(threads);
    if (want(11)) criterion_wine(data_dir, threads);
    if (want(12)) criterion_reproducibility(cli);

    if (g_failures == 0) {
        std::cout << "acceptance: all executed criteria passed" << std::endl;
        return 0;
    }
    std::cout << "acceptance: " << g_failures << " criteria failed" << std::endl;
    return 1;
}
