#include "cli_common.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "fundata/errors.hpp"
#include "fundata/io.hpp"

namespace fundata::cli {

std::uint64_t default_seed() {
    const char* env = std::getenv("FUNDATA_SEED");
    if (!env || !*env) return 0;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw UsageError("FUNDATA_SEED must be a non-negative integer, got '" + std::string(env) + "'");
    }
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(flag + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

Eigen::MatrixXd parse_matrix(const std::string& text, const std::string& flag) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_list(row, flag));
    if (rows.empty()) throw UsageError(flag + ": empty matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw UsageError(flag + ": rows have different lengths");
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

void write_data(const MultivariateFD& fd, const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".json") {
        io::write_manifest(fd, path);
        return;
    }
    if (fd.n_components() != 1) throw UsageError("multivariate output needs a .json manifest path");
    write_data(fd[0], path);
}

void write_data(const UnivariateFD& fd, const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".json") {
        io::write_manifest(MultivariateFD({fd}), path);
        return;
    }
    if (n_dim(fd) != 1) throw UsageError("2-D output needs a .json manifest path");
    if (ext == ".ts") {
        const auto* d = std::get_if<DenseFD>(&fd);
        io::write_ts(d ? *d : to_dense(std::get<IrregularFD>(fd)), std::nullopt, path);
        return;
    }
    std::visit([&](const auto& x) { io::write_csv(x, path); }, fd);
}

UnivariateFD read_univariate(const std::filesystem::path& path) {
    MultivariateFD fd = io::read_any(path);
    if (fd.n_components() != 1) throw UsageError("'" + path.string() + "' holds several components; expected one");
    return fd[0];
}

void report_error(const std::string& kind, const std::string& message) {
    const nlohmann::json line = {{"status", "error"}, {"kind", kind}, {"message", message}};
    std::cerr << line.dump() << std::endl;
}

void write_matrix(const RowMatrix& m, const std::filesystem::path& path, const std::string& prefix) {
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < m.cols(); ++j) header.push_back(prefix + std::to_string(j));
    io::write_table(path, header, m, true);
}

}  // namespace fundata::cli
