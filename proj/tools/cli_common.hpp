#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fundata/errors.hpp"
#include "fundata/functional_data.hpp"
#include "fundata/ufpca.hpp"

namespace fundata::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Inconsistent flag combination detected after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Set by the parsed subcommand; run by main after a successful parse.
using Action = std::function<void()>;

void register_simulate(CLI::App& app, Action& action);
void register_smooth(CLI::App& app, Action& action);
void register_moments(CLI::App& app, Action& action);
void register_fpca(CLI::App& app, Action& action);
void register_fcubt(CLI::App& app, Action& action);
void register_plot(CLI::App& app, Action& action);
void register_convert(CLI::App& app, Action& action);

/// Runs `parse` and turns a validation failure into a usage error naming `flag`.
template <class F>
auto flag_value(const std::string& flag, F&& parse) {
    try {
        return parse();
    } catch (const ValidationError& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

/// FUNDATA_SEED when set, otherwise 0.
std::uint64_t default_seed();

/// "a,b,c" -> doubles.
std::vector<double> parse_list(const std::string& text, const std::string& flag);

/// "a,b;c,d" -> rows separated by ';', columns by ','.
Eigen::MatrixXd parse_matrix(const std::string& text, const std::string& flag);

/// Writes a 1-D/2-D object by extension: .json manifest, .ts, otherwise CSV
/// (2-D objects require a manifest).
void write_data(const MultivariateFD& fd, const std::filesystem::path& path);
void write_data(const UnivariateFD& fd, const std::filesystem::path& path);

/// Loads a single 1-D component.
UnivariateFD read_univariate(const std::filesystem::path& path);

/// Prints one JSON line per error on stderr.
void report_error(const std::string& kind, const std::string& message);

/// Tables of scores or eigen quantities with a "0..J-1" style header.
void write_matrix(const RowMatrix& m, const std::filesystem::path& path, const std::string& prefix);

}  // namespace fundata::cli
