#include "resk/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "resk/rng.hpp"

namespace resk::simulate {

namespace {

void fill_skewed_draws(DataSet& out, std::size_t offset, std::size_t count,
                       const std::vector<double>& xi, const numerics::SpdMatrix& scatter,
                       const std::vector<double>& lambda, double nu, Rng& rng) {
    const int r = scatter.dim();
    const auto& l = scatter.chol_lower();
    std::vector<double> z(r);
    for (std::size_t i = 0; i < count; ++i) {
        const double z0 = std::abs(rng.normal());
        for (int j = 0; j < r; ++j) z[j] = rng.normal();
        const double scale = nu > 0.0 ? 1.0 / std::sqrt(rng.chi2(nu) / nu) : 1.0;
        for (int j = 0; j < r; ++j) {
            double v = lambda[j] * z0;
            for (int k = 0; k <= j; ++k) v += l[static_cast<size_t>(j) * r + k] * z[k];
            out.at(offset + i, j) = xi[j] + v * scale;
        }
    }
}

} // namespace

DataSet sample_skew_gaussian(const std::vector<double>& xi, const numerics::SpdMatrix& scatter,
                             const std::vector<double>& lambda, std::size_t n, uint64_t seed) {
    const int r = scatter.dim();
    if (static_cast<int>(xi.size()) != r || static_cast<int>(lambda.size()) != r)
        throw DimensionMismatch("sample_skew_gaussian: parameter lengths");
    DataSet out(r, n);
    out.meta.seed = seed;
    Rng rng(seed);
    fill_skewed_draws(out, 0, n, xi, scatter, lambda, 0.0, rng);
    return out;
}

DataSet sample_skew_t(const std::vector<double>& xi, const numerics::SpdMatrix& scatter,
                      const std::vector<double>& lambda, double nu, std::size_t n, uint64_t seed) {
    if (!(nu > 0.0)) throw DomainError("sample_skew_t: nu <= 0");
    const int r = scatter.dim();
    if (static_cast<int>(xi.size()) != r || static_cast<int>(lambda.size()) != r)
        throw DimensionMismatch("sample_skew_t: parameter lengths");
    DataSet out(r, n);
    out.meta.seed = seed;
    Rng rng(seed);
    fill_skewed_draws(out, 0, n, xi, scatter, lambda, nu, rng);
    return out;
}

DataSet contaminate(const DataSet& data, const ContaminationSpec& spec, uint64_t seed) {
    if (!(spec.epsilon >= 0.0 && spec.epsilon < 1.0))
        throw DomainError("contaminate: epsilon outside [0,1)");
    if (static_cast<int>(spec.lo.size()) != data.dim ||
        static_cast<int>(spec.hi.size()) != data.dim)
        throw DimensionMismatch("contaminate: box dimension");
    for (int j = 0; j < data.dim; ++j)
        if (!(spec.lo[j] < spec.hi[j])) throw DomainError("contaminate: empty box side");

    DataSet out = data;
    out.meta.epsilon = spec.epsilon;
    const std::size_t n_out = static_cast<std::size_t>(spec.epsilon * static_cast<double>(data.n));
    if (n_out == 0) return out;
    if (out.labels.empty()) out.labels.assign(data.n, 1);

    // partial Fisher-Yates for the replaced index set
    Rng rng(seed);
    std::vector<std::size_t> idx(data.n);
    for (std::size_t i = 0; i < data.n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < n_out; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(data.n - i));
        std::swap(idx[i], idx[std::min(j, data.n - 1)]);
    }
    for (std::size_t i = 0; i < n_out; ++i) {
        const std::size_t row = idx[i];
        for (int j = 0; j < data.dim; ++j)
            out.at(row, j) = rng.uniform(spec.lo[j], spec.hi[j]);
        out.labels[row] = 0;
    }
    return out;
}

const PresetDef& preset_def(const std::string& name) {
    static const PresetDef dataset1{
        "dataset1",
        2,
        0.0,
        {
            {{2.0, 3.5}, {10.0, 4.0}, {0.2, 0.1, 0.1, 0.75}, 5},
            {{6.0, 2.0}, {1.0, -2.0}, {0.5, 0.25, 0.25, 0.5}, 4},
            {{10.0, 3.0}, {2.0, 1.0}, {1.0, 0.5, 0.5, 1.0}, 1},
        },
    };
    static const PresetDef dataset2{
        "dataset2",
        2,
        3.0,
        {
            {{2.0, 3.5}, {4.0, 3.0}, {0.2, 0.1, 0.1, 0.75}, 1},
            {{7.0, -2.0}, {1.0, -2.0}, {0.5, 0.25, 0.25, 0.5}, 1},
        },
    };
    if (name == "dataset1") return dataset1;
    if (name == "dataset2") return dataset2;
    throw UnknownPreset("unknown preset: " + name);
}

DataSet preset(const std::string& name, std::size_t n_k, uint64_t seed) {
    if (n_k < 1) throw DomainError("preset: n_k < 1");
    const PresetDef& def = preset_def(name);

    std::size_t total = 0;
    for (const auto& c : def.clusters) total += c.count_factor * n_k;

    DataSet out(def.dim, total);
    out.labels.assign(total, 0);
    out.meta.seed = seed;
    out.meta.preset = def.name;

    std::size_t offset = 0;
    for (std::size_t m = 0; m < def.clusters.size(); ++m) {
        const auto& c = def.clusters[m];
        const std::size_t count = c.count_factor * n_k;
        numerics::SpdMatrix s(def.dim, c.scatter);
        Rng rng = Rng::substream(seed, m); // independent stream per cluster
        fill_skewed_draws(out, offset, count, c.xi, s, c.lambda, def.nu, rng);
        for (std::size_t i = 0; i < count; ++i)
            out.labels[offset + i] = static_cast<int>(m) + 1;
        offset += count;
    }
    return out;
}

} // namespace resk::simulate
