#include "resk/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace resk::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    std::string out = s.substr(a, b - a + 1);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
        out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(strip(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(strip(cur));
    return out;
}

} // namespace

CsvTable read_csv(const std::string& path, char sep) {
    std::ifstream in(path);
    if (!in) throw FileNotFound("cannot open " + path);
    CsvTable table;
    std::string line;
    bool header_done = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line);
            continue;
        }
        auto fields = split_line(line, sep);
        if (!header_done) {
            table.header = std::move(fields);
            header_done = true;
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError(path + ": row " + std::to_string(lineno) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(table.header.size()));
        table.rows.push_back(std::move(fields));
    }
    if (!header_done) throw ParseError(path + ": empty file");
    return table;
}

DataSet load_csv(const std::string& path, const LoadSpec& spec) {
    const CsvTable table = read_csv(path, spec.sep);
    if (table.rows.empty()) throw ParseError(path + ": no data rows");

    auto col_index = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) throw MissingColumn(path + ": missing column " + name);
        return static_cast<std::size_t>(it - table.header.begin());
    };

    std::vector<std::size_t> cols;
    for (const auto& name : spec.feature_cols) cols.push_back(col_index(name));

    DataSet data(static_cast<int>(cols.size()), table.rows.size());
    auto parse = [&](const std::string& s, std::size_t row, std::size_t col) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
            throw ParseError(path + ": bad numeric value '" + s + "' at row " +
                             std::to_string(row + 2) + ", column " + table.header[col]);
        return v;
    };
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            data.at(i, static_cast<int>(j)) = parse(table.rows[i][cols[j]], i, cols[j]);

    if (spec.label_col) {
        const std::size_t lc = col_index(*spec.label_col);
        data.labels.resize(data.n);
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const double v = parse(table.rows[i][lc], i, lc);
            data.labels[i] = static_cast<int>(std::lround(v));
        }
    }

    if (spec.standardize) {
        data.meta.standardized = true;
        data.meta.shift.resize(data.dim);
        data.meta.scale.resize(data.dim);
        for (int j = 0; j < data.dim; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < data.n; ++i) mean += data.at(i, j);
            mean /= static_cast<double>(data.n);
            double var = 0.0;
            for (std::size_t i = 0; i < data.n; ++i) {
                const double d = data.at(i, j) - mean;
                var += d * d;
            }
            var /= static_cast<double>(data.n);
            const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
            data.meta.shift[j] = mean;
            data.meta.scale[j] = sd;
            for (std::size_t i = 0; i < data.n; ++i) data.at(i, j) = (data.at(i, j) - mean) / sd;
        }
    }
    return data;
}

void save_dataset_csv(const std::string& path, const DataSet& data,
                      const std::vector<std::string>& meta_lines) {
    std::ofstream out(path);
    if (!out) throw FileNotFound("cannot write " + path);
    for (int j = 0; j < data.dim; ++j) {
        if (j) out << ',';
        out << 'x' << (j + 1);
    }
    if (data.has_labels()) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < data.n; ++i) {
        for (int j = 0; j < data.dim; ++j) {
            if (j) out << ',';
            out << format_double(data.at(i, j));
        }
        if (data.has_labels()) out << ',' << data.labels[i];
        out << '\n';
    }
    for (const auto& line : meta_lines) out << "# " << line << '\n';
}

DataSet load_dataset_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    if (table.header.empty()) throw ParseError(path + ": empty header");
    LoadSpec spec;
    for (const auto& h : table.header) {
        if (h == "label") {
            spec.label_col = h;
        } else {
            spec.feature_cols.push_back(h);
        }
    }
    return load_csv(path, spec);
}

std::string model_to_json(const em::EMReport& report) {
    nlohmann::ordered_json j;
    const auto& model = report.model;
    j["family"] = model.spec.name();
    j["dim"] = model.spec.dim();
    j["skewed"] = model.skewed;
    if (model.spec.kind() == family::Kind::StudentT) j["nu"] = model.spec.nu();
    if (model.spec.kind() == family::Kind::Huber) {
        j["q_h"] = model.spec.q_h();
        j["c"] = model.spec.c();
        j["b"] = model.spec.b();
    }
    j["clusters"] = nlohmann::ordered_json::array();
    for (int m = 0; m < model.n_clusters(); ++m) {
        const auto& p = model.clusters[m];
        nlohmann::ordered_json c;
        c["weight"] = model.weights[m];
        c["xi"] = p.xi();
        c["lambda"] = p.lambda();
        std::vector<double> vech;
        const int r = p.dim();
        for (int b = 0; b < r; ++b)
            for (int a = b; a < r; ++a) vech.push_back(p.scatter()(a, b));
        c["scatter_vech"] = vech;
        j["clusters"].push_back(std::move(c));
    }
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["loglik"] = report.ll_trace.empty() ? 0.0 : report.ll_trace.back();
    j["seed"] = report.seed;
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw FileNotFound("cannot write " + path);
    out << text;
}

} // namespace resk::io
