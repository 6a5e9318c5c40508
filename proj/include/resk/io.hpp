#pragma once

#include <optional>
#include <string>
#include <vector>

#include "resk/data.hpp"
#include "resk/em.hpp"

namespace resk::io {

// Shortest-round-trip text form of a double (17 significant digits).
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> comments; // '#'-prefixed lines, stripped
};

// Comma (or custom) separated values with one header row; '#' lines are
// collected separately. Quotes around fields are stripped.
CsvTable read_csv(const std::string& path, char sep = ',');

struct LoadSpec {
    std::vector<std::string> feature_cols; // by header name
    std::optional<std::string> label_col;
    bool standardize = false;
    char sep = ',';
};

DataSet load_csv(const std::string& path, const LoadSpec& spec);

// Dataset format written by the simulate subcommand: x1..xr[,label] header,
// data rows, then '#'-prefixed metadata lines.
void save_dataset_csv(const std::string& path, const DataSet& data,
                      const std::vector<std::string>& meta_lines);
DataSet load_dataset_csv(const std::string& path);

std::string model_to_json(const em::EMReport& report);

void write_text_file(const std::string& path, const std::string& text);

} // namespace resk::io
