// Experiment runner: simulation presets, single EM fits, cluster enumeration,
// contamination sweeps, sensitivity grids and the real-data pipelines, all
// seeded and emitting plot-ready CSV.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resk/em.hpp"
#include "resk/enumeration.hpp"
#include "resk/evaluate.hpp"
#include "resk/io.hpp"
#include "resk/rng.hpp"
#include "resk/simulate.hpp"

namespace {

using namespace resk;

struct FamilyOptions {
    std::string family = "skew-gaussian";
    double nu = 3.0;
    double q_h = 0.8;
    int qh_dim = 0; // 0 = data dimension
};

void add_family_options(CLI::App* cmd, FamilyOptions& opt) {
    cmd->add_option("--family", opt.family,
                    "gaussian | t | huber | skew-gaussian | skew-t | skew-huber")
        ->default_val(opt.family);
    cmd->add_option("--nu", opt.nu, "t degrees of freedom")->default_val(opt.nu);
    cmd->add_option("--qh", opt.q_h, "Huber tuning quantile")->default_val(opt.q_h);
    cmd->add_option("--qh-dim", opt.qh_dim,
                    "dof of the quantile defining the Huber threshold (0 = data dimension)")
        ->default_val(opt.qh_dim);
}

evaluate::FamilyChoice make_family(const FamilyOptions& opt, int dim) {
    const bool skewed = opt.family.rfind("skew-", 0) == 0;
    const std::string base = skewed ? opt.family.substr(5) : opt.family;
    if (base == "gaussian")
        return {opt.family, family::FamilySpec::gaussian(dim), skewed};
    if (base == "t")
        return {opt.family, family::FamilySpec::student_t(dim, opt.nu), skewed};
    if (base == "huber")
        return {opt.family, family::FamilySpec::huber(dim, opt.q_h, opt.qh_dim), skewed};
    throw DomainError("unknown family: " + opt.family);
}

std::vector<std::string> family_config_lines(const FamilyOptions& opt, uint64_t seed) {
    std::vector<std::string> lines;
    lines.push_back("family=" + opt.family);
    if (opt.family == "t" || opt.family == "skew-t")
        lines.push_back("nu=" + io::format_double(opt.nu));
    if (opt.family == "huber" || opt.family == "skew-huber") {
        lines.push_back("qh=" + io::format_double(opt.q_h));
        lines.push_back("qh_dim=" + std::to_string(opt.qh_dim));
    }
    lines.push_back("seed=" + std::to_string(seed));
    return lines;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<std::string> parse_string_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

void write_confusion_csv(const std::string& path, const evaluate::ConfusionMatrix& cm,
                         const std::vector<std::string>& meta) {
    std::ostringstream out;
    out << "true_class";
    for (int j = 0; j < cm.k; ++j) out << ",pred_" << (j + 1);
    out << '\n';
    for (int i = 0; i < cm.k; ++i) {
        out << (i + 1);
        for (int j = 0; j < cm.k; ++j) out << ',' << io::format_double(cm.percent(i, j));
        out << '\n';
    }
    out << "# average=" << io::format_double(cm.average) << '\n';
    for (const auto& m : meta) out << "# " << m << '\n';
    io::write_text_file(path, out.str());
}

int cmd_simulate(const std::string& preset, std::size_t nk, double eps, uint64_t seed,
                 const std::string& out_path) {
    DataSet data = simulate::preset(preset, nk, seed);
    if (eps > 0.0)
        data = simulate::contaminate(data, simulate::ContaminationSpec::box2d(eps),
                                     Rng::derive(seed, 3));
    std::vector<std::string> meta = {
        "preset=" + preset,
        "nk=" + std::to_string(nk),
        "eps=" + io::format_double(eps),
        "seed=" + std::to_string(seed),
    };
    io::save_dataset_csv(out_path, data, meta);
    return 0;
}

int cmd_fit(const std::string& input, const FamilyOptions& fam, int k, uint64_t seed, double tol,
            int max_iter, const std::string& out_path, const std::string& trace_path) {
    DataSet data = io::load_dataset_csv(input);
    const auto choice = make_family(fam, data.dim);
    em::FitConfig cfg;
    cfg.seed = seed;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    const auto report = em::fit(data, k, choice.spec, choice.skewed, cfg);
    io::write_text_file(out_path, io::model_to_json(report) + "\n");
    if (!trace_path.empty()) {
        std::ostringstream out;
        out << "iteration,loglik\n";
        for (std::size_t i = 0; i < report.ll_trace.size(); ++i)
            out << (i + 1) << ',' << io::format_double(report.ll_trace[i]) << '\n';
        for (const auto& m : family_config_lines(fam, seed)) out << "# " << m << '\n';
        out << "# input=" << input << "\n# k=" << k << '\n';
        io::write_text_file(trace_path, out.str());
    }
    return 0;
}

int cmd_enumerate(const std::string& input, const FamilyOptions& fam, int lmin, int lmax,
                  uint64_t seed, const std::string& out_path) {
    DataSet data = io::load_dataset_csv(input);
    const auto choice = make_family(fam, data.dim);
    em::FitConfig cfg;
    cfg.seed = seed;
    const auto sweep = enumeration::enumerate_clusters(data, lmin, lmax, choice.spec,
                                                       choice.skewed, cfg);
    std::ostringstream out;
    out << "l,bic\n";
    for (const auto& [l, score] : sweep.scores)
        out << l << ',' << io::format_double(score) << '\n';
    out << "# k_hat=" << sweep.k_hat << '\n';
    for (const auto& m : family_config_lines(fam, seed)) out << "# " << m << '\n';
    out << "# input=" << input << '\n';
    io::write_text_file(out_path, out.str());
    std::cout << "k_hat=" << sweep.k_hat << '\n';
    return 0;
}

int cmd_breakdown(const std::string& preset, std::size_t nk, const std::string& eps_csv,
                  const std::string& families_csv, int mc, uint64_t seed, int threads,
                  int lmin, int lmax, double nu, double qh, int qh_dim,
                  const std::string& out_path) {
    const auto eps_list = parse_double_list(eps_csv);
    const auto names = parse_string_list(families_csv);
    const int dim = simulate::preset_def(preset).dim;
    std::vector<evaluate::FamilyChoice> fams;
    for (const auto& name : names) {
        FamilyOptions fo;
        fo.family = name;
        fo.nu = nu;
        fo.q_h = qh;
        fo.qh_dim = qh_dim;
        fams.push_back(make_family(fo, dim));
    }
    evaluate::SweepConfig cfg;
    cfg.preset = preset;
    cfg.n_k = nk;
    cfg.mc = mc;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.l_min = lmin;
    cfg.l_max = lmax;
    const auto rows = evaluate::breakdown_sweep(eps_list, fams, cfg);

    std::ostringstream out;
    out << "eps,family,mean_kl_true_k,mean_kl_enum_k,p_detect,iters_mean,iters_std\n";
    for (const auto& row : rows) {
        out << io::format_double(row.epsilon) << ',' << row.family << ','
            << io::format_double(row.mean_kl_true_k) << ','
            << io::format_double(row.mean_kl_enum_k) << ',' << io::format_double(row.p_detect)
            << ',' << io::format_double(row.iters_mean) << ',' << io::format_double(row.iters_std)
            << '\n';
    }
    out << "# preset=" << preset << "\n# nk=" << nk << "\n# mc=" << mc << "\n# seed=" << seed
        << "\n# lmin=" << lmin << "\n# lmax=" << lmax << "\n# nu=" << io::format_double(nu)
        << "\n# qh=" << io::format_double(qh) << "\n# qh_dim=" << qh_dim << '\n';
    io::write_text_file(out_path, out.str());
    return 0;
}

int cmd_sensitivity(const std::string& preset, std::size_t nk, const FamilyOptions& fam,
                    double step, int mc, uint64_t seed, int threads, int lmin, int lmax,
                    const std::string& out_path) {
    const int dim = simulate::preset_def(preset).dim;
    const auto choice = make_family(fam, dim);
    evaluate::GridSpec grid;
    grid.step = step;
    evaluate::SweepConfig cfg;
    cfg.preset = preset;
    cfg.n_k = nk;
    cfg.mc = mc;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.l_min = lmin;
    cfg.l_max = lmax;
    const auto res = evaluate::sensitivity_grid(grid, choice.spec, choice.skewed, cfg);

    std::ostringstream out;
    out << "x,y,mean_kl\n";
    for (std::size_t iy = 0; iy < res.ys.size(); ++iy)
        for (std::size_t ix = 0; ix < res.xs.size(); ++ix)
            out << io::format_double(res.xs[ix]) << ',' << io::format_double(res.ys[iy]) << ','
                << io::format_double(res.mean_kl[iy * res.xs.size() + ix]) << '\n';
    out << "# preset=" << preset << "\n# nk=" << nk << "\n# mc=" << mc << "\n# step="
        << io::format_double(step) << "\n# seed=" << seed << '\n';
    for (const auto& m : family_config_lines(fam, seed)) out << "# " << m << '\n';
    io::write_text_file(out_path, out.str());
    return 0;
}

DataSet load_wine(const std::string& red_path, const std::string& white_path) {
    io::LoadSpec spec;
    spec.feature_cols = {"volatile acidity", "residual sugar", "chlorides",
                         "total sulfur dioxide"};
    spec.sep = ';';
    DataSet red = io::load_csv(red_path, spec);
    DataSet white = io::load_csv(white_path, spec);
    DataSet all(4, red.n + white.n);
    all.labels.assign(all.n, 0);
    for (std::size_t i = 0; i < red.n; ++i) {
        for (int j = 0; j < 4; ++j) all.at(i, j) = red.at(i, j);
        all.labels[i] = 1;
    }
    for (std::size_t i = 0; i < white.n; ++i) {
        for (int j = 0; j < 4; ++j) all.at(red.n + i, j) = white.at(i, j);
        all.labels[red.n + i] = 2;
    }
    return all;
}

DataSet load_crabs(const std::string& path) {
    const auto table = io::read_csv(path);
    auto find_col = [&](const std::string& name) {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) throw MissingColumn(path + ": missing column " + name);
        return static_cast<std::size_t>(it - table.header.begin());
    };
    const std::size_t sp = find_col("sp"), sex = find_col("sex");
    const std::vector<std::string> feats = {"FL", "RW", "CL", "CW", "BD"};
    std::vector<std::size_t> fcols;
    for (const auto& f : feats) fcols.push_back(find_col(f));

    DataSet data(5, table.rows.size());
    data.labels.assign(data.n, 0);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t j = 0; j < fcols.size(); ++j)
            data.at(i, static_cast<int>(j)) = std::stod(table.rows[i][fcols[j]]);
        const bool orange = table.rows[i][sp] == "O" || table.rows[i][sp] == "orange";
        const bool female = table.rows[i][sex] == "F" || table.rows[i][sex] == "female";
        data.labels[i] = 1 + (orange ? 2 : 0) + (female ? 1 : 0);
    }
    return data;
}

simulate::ContaminationSpec data_range_box(const DataSet& data, double eps) {
    simulate::ContaminationSpec spec;
    spec.epsilon = eps;
    spec.lo.resize(data.dim);
    spec.hi.resize(data.dim);
    for (int j = 0; j < data.dim; ++j) {
        double lo = data.at(0, j), hi = data.at(0, j);
        for (std::size_t i = 1; i < data.n; ++i) {
            lo = std::min(lo, data.at(i, j));
            hi = std::max(hi, data.at(i, j));
        }
        if (!(lo < hi)) hi = lo + 1.0;
        spec.lo[j] = lo;
        spec.hi[j] = hi;
    }
    return spec;
}

int cmd_realdata(const DataSet& base, int k, const FamilyOptions& fam, double eps, int mc,
                 uint64_t seed, int threads, double tol, int max_iter,
                 const std::string& out_path, const std::string& source_desc) {
    const auto choice = make_family(fam, base.dim);
    std::vector<double> averages(mc, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::vector<double>> percents(mc);

    evaluate::parallel_cells(static_cast<std::size_t>(mc), threads, [&](std::size_t rep) {
        const uint64_t run_seed = Rng::derive(seed, rep);
        try {
            DataSet obs = base;
            if (eps > 0.0)
                obs = simulate::contaminate(base, data_range_box(base, eps),
                                            Rng::derive(run_seed, 3));
            em::FitConfig cfg;
            cfg.seed = run_seed;
            cfg.tol = tol;
            cfg.max_iter = max_iter;
            const auto report = em::fit(obs, k, choice.spec, choice.skewed, cfg);
            const auto cm = evaluate::confusion_from_resp(obs.labels, report.resp, obs.n, k, true);
            averages[rep] = cm.average;
            percents[rep] = cm.percents;
        } catch (const Error&) {
            // leave NaN; isolated failure
        }
    });

    evaluate::ConfusionMatrix mean_cm;
    mean_cm.k = k;
    mean_cm.percents.assign(static_cast<std::size_t>(k) * k, 0.0);
    mean_cm.counts.assign(static_cast<std::size_t>(k) * k, 0);
    int ok = 0;
    double avg = 0.0;
    for (int rep = 0; rep < mc; ++rep) {
        if (std::isnan(averages[rep])) continue;
        ++ok;
        avg += averages[rep];
        for (std::size_t i = 0; i < mean_cm.percents.size(); ++i)
            mean_cm.percents[i] += percents[rep][i];
    }
    if (ok == 0) {
        std::cerr << "realdata: every repetition failed\n";
        return 1;
    }
    avg /= ok;
    for (auto& v : mean_cm.percents) v /= ok;
    mean_cm.average = avg;

    std::vector<std::string> meta = {
        "source=" + source_desc,
        "k=" + std::to_string(k),
        "eps=" + io::format_double(eps),
        "mc=" + std::to_string(mc),
        "ok_runs=" + std::to_string(ok),
    };
    for (const auto& m : family_config_lines(fam, seed)) meta.push_back(m);
    write_confusion_csv(out_path, mean_cm, meta);
    std::cout << "average=" << io::format_double(avg) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust skewed mixture-model toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a preset dataset CSV");
    std::string sim_preset = "dataset1", sim_out = "dataset.csv";
    std::size_t sim_nk = 50;
    double sim_eps = 0.0;
    uint64_t sim_seed = 1;
    sim->add_option("--preset", sim_preset, "dataset1 | dataset2")->default_val(sim_preset);
    sim->add_option("--nk", sim_nk, "samples per unit cluster weight")->default_val(sim_nk);
    sim->add_option("--eps", sim_eps, "replacement-outlier fraction")->default_val(sim_eps);
    sim->add_option("--seed", sim_seed)->default_val(sim_seed);
    sim->add_option("--out", sim_out)->default_val(sim_out);

    // fit
    auto* fit = app.add_subcommand("fit", "run one EM fit");
    std::string fit_input, fit_out = "model.json", fit_trace;
    FamilyOptions fit_fam;
    int fit_k = 1, fit_max_iter = 2000;
    double fit_tol = 1e-6;
    uint64_t fit_seed = 1;
    fit->add_option("--input", fit_input)->required();
    fit->add_option("--k", fit_k)->required();
    add_family_options(fit, fit_fam);
    fit->add_option("--seed", fit_seed)->default_val(fit_seed);
    fit->add_option("--tol", fit_tol)->default_val(fit_tol);
    fit->add_option("--max-iter", fit_max_iter)->default_val(fit_max_iter);
    fit->add_option("--out", fit_out)->default_val(fit_out);
    fit->add_option("--trace", fit_trace, "per-iteration log-likelihood CSV");

    // enumerate
    auto* enu = app.add_subcommand("enumerate", "BIC sweep over cluster counts");
    std::string enu_input, enu_out = "bic.csv";
    FamilyOptions enu_fam;
    int enu_lmin = 1, enu_lmax = 6;
    uint64_t enu_seed = 1;
    enu->add_option("--input", enu_input)->required();
    add_family_options(enu, enu_fam);
    enu->add_option("--lmin", enu_lmin)->default_val(enu_lmin);
    enu->add_option("--lmax", enu_lmax)->default_val(enu_lmax);
    enu->add_option("--seed", enu_seed)->default_val(enu_seed);
    enu->add_option("--out", enu_out)->default_val(enu_out);

    // breakdown
    auto* brk = app.add_subcommand("breakdown", "contamination sweep");
    std::string brk_preset = "dataset1", brk_eps = "0,0.02,0.04", brk_out = "breakdown.csv";
    std::string brk_families = "gaussian,t,huber,skew-gaussian,skew-t,skew-huber";
    std::size_t brk_nk = 50;
    int brk_mc = 100, brk_threads = 0, brk_lmin = 1, brk_lmax = 6, brk_qhdim = 0;
    double brk_nu = 3.0, brk_qh = 0.8;
    uint64_t brk_seed = 1;
    brk->add_option("--preset", brk_preset)->default_val(brk_preset);
    brk->add_option("--nk", brk_nk)->default_val(brk_nk);
    brk->add_option("--eps", brk_eps, "comma-separated fractions")->default_val(brk_eps);
    brk->add_option("--families", brk_families)->default_val(brk_families);
    brk->add_option("--mc", brk_mc)->default_val(brk_mc);
    brk->add_option("--seed", brk_seed)->default_val(brk_seed);
    brk->add_option("--threads", brk_threads, "0 = all cores")->default_val(brk_threads);
    brk->add_option("--lmin", brk_lmin)->default_val(brk_lmin);
    brk->add_option("--lmax", brk_lmax)->default_val(brk_lmax);
    brk->add_option("--nu", brk_nu)->default_val(brk_nu);
    brk->add_option("--qh", brk_qh)->default_val(brk_qh);
    brk->add_option("--qh-dim", brk_qhdim)->default_val(brk_qhdim);
    brk->add_option("--out", brk_out)->default_val(brk_out);

    // sensitivity
    auto* sen = app.add_subcommand("sensitivity", "single-outlier KL grid");
    std::string sen_preset = "dataset1", sen_out = "sensitivity.csv";
    FamilyOptions sen_fam;
    std::size_t sen_nk = 50;
    double sen_step = 5.0;
    int sen_mc = 200, sen_threads = 0, sen_lmin = 1, sen_lmax = 6;
    uint64_t sen_seed = 1;
    sen->add_option("--preset", sen_preset)->default_val(sen_preset);
    sen->add_option("--nk", sen_nk)->default_val(sen_nk);
    add_family_options(sen, sen_fam);
    sen->add_option("--step", sen_step)->default_val(sen_step);
    sen->add_option("--mc", sen_mc)->default_val(sen_mc);
    sen->add_option("--seed", sen_seed)->default_val(sen_seed);
    sen->add_option("--threads", sen_threads)->default_val(sen_threads);
    sen->add_option("--lmin", sen_lmin)->default_val(sen_lmin);
    sen->add_option("--lmax", sen_lmax)->default_val(sen_lmax);
    sen->add_option("--out", sen_out)->default_val(sen_out);

    // realdata
    auto* real = app.add_subcommand("realdata", "confusion matrices for wine / crabs");
    std::string real_which, real_red, real_white, real_csv, real_out = "confusion.csv";
    FamilyOptions real_fam;
    int real_k = 0, real_mc = 20, real_threads = 0, real_max_iter = 2000;
    double real_eps = 0.0, real_tol = 1e-6;
    uint64_t real_seed = 1;
    real->add_option("dataset", real_which, "wine | crabs")->required();
    real->add_option("--red", real_red, "red-wine CSV (';' separated)");
    real->add_option("--white", real_white, "white-wine CSV (';' separated)");
    real->add_option("--csv", real_csv, "crabs CSV");
    add_family_options(real, real_fam);
    real->add_option("--k", real_k, "number of clusters (default: 2 wine, 4 crabs)");
    real->add_option("--eps", real_eps)->default_val(real_eps);
    real->add_option("--mc", real_mc)->default_val(real_mc);
    real->add_option("--seed", real_seed)->default_val(real_seed);
    real->add_option("--threads", real_threads)->default_val(real_threads);
    real->add_option("--tol", real_tol)->default_val(real_tol);
    real->add_option("--max-iter", real_max_iter)->default_val(real_max_iter);
    real->add_option("--out", real_out)->default_val(real_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(sim_preset, sim_nk, sim_eps, sim_seed, sim_out);
        if (fit->parsed())
            return cmd_fit(fit_input, fit_fam, fit_k, fit_seed, fit_tol, fit_max_iter, fit_out,
                           fit_trace);
        if (enu->parsed())
            return cmd_enumerate(enu_input, enu_fam, enu_lmin, enu_lmax, enu_seed, enu_out);
        if (brk->parsed())
            return cmd_breakdown(brk_preset, brk_nk, brk_eps, brk_families, brk_mc, brk_seed,
                                 brk_threads, brk_lmin, brk_lmax, brk_nu, brk_qh, brk_qhdim,
                                 brk_out);
        if (sen->parsed())
            return cmd_sensitivity(sen_preset, sen_nk, sen_fam, sen_step, sen_mc, sen_seed,
                                   sen_threads, sen_lmin, sen_lmax, sen_out);
        if (real->parsed()) {
            if (real_which == "wine") {
                if (real_red.empty() || real_white.empty())
                    throw DomainError("realdata wine needs --red and --white");
                const DataSet base = load_wine(real_red, real_white);
                return cmd_realdata(base, real_k > 0 ? real_k : 2, real_fam, real_eps, real_mc,
                                    real_seed, real_threads, real_tol, real_max_iter, real_out,
                                    "wine");
            }
            if (real_which == "crabs") {
                if (real_csv.empty()) throw DomainError("realdata crabs needs --csv");
                const DataSet base = load_crabs(real_csv);
                return cmd_realdata(base, real_k > 0 ? real_k : 4, real_fam, real_eps, real_mc,
                                    real_seed, real_threads, real_tol, real_max_iter, real_out,
                                    "crabs");
            }
            throw DomainError("unknown real dataset: " + real_which);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
