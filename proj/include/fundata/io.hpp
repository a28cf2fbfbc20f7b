#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fundata/functional_data.hpp"

namespace fundata::io {

struct CsvOptions {
    /// First column holds a row index and is skipped.
    bool index_col = true;
    /// Cell text meaning "missing"; compared case-sensitively.
    std::string na_token = "NA";
};

/// Rows are observations, the header gives the sampling points. A header
/// that is not entirely numeric is factorized to 0..M-1.
DenseFD read_csv_dense(const std::filesystem::path& path, const CsvOptions& options = {});

/// As read_csv_dense followed by to_irregular; the header must be numeric.
IrregularFD read_csv_irregular(const std::filesystem::path& path, const CsvOptions& options = {});

/// Header is the grid (1-D) or the union grid (irregular). 2-D dense objects
/// are written row-major with a flattened 0..M1*M2-1 header; use
/// write_manifest to keep their grids.
void write_csv(const DenseFD& fd, const std::filesystem::path& path, const CsvOptions& options = {});
void write_csv(const IrregularFD& fd, const std::filesystem::path& path, const CsvOptions& options = {});

struct TsData {
    DenseFD data;
    std::optional<std::vector<std::string>> labels;
    std::string problem_name;
};

/// Univariate, equal-length UEA/UCR .ts files. Series live on the implicit grid 0..M-1.
TsData read_ts(const std::filesystem::path& path);
void write_ts(const DenseFD& fd, const std::optional<std::vector<std::string>>& labels,
              const std::filesystem::path& path, const std::string& problem_name = "fundata");

/// JSON manifest listing one CSV per component (paths relative to the manifest).
MultivariateFD read_manifest(const std::filesystem::path& path, const CsvOptions& options = {});
void write_manifest(const MultivariateFD& fd, const std::filesystem::path& path,
                    const CsvOptions& options = {});

/// Loads a .json manifest, a .ts file or a dense CSV as a multivariate object.
MultivariateFD read_any(const std::filesystem::path& path, const CsvOptions& options = {});

std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(std::span<const int> labels, const std::filesystem::path& path);

/// Generic numeric table: optional row index column, header, round-trip exact cells.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const RowMatrix& values, bool with_index = true);
RowMatrix read_table(const std::filesystem::path& path, bool index_col = true);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Writes to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace fundata::io
