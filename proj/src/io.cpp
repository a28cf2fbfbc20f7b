#include "fundata/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include <json.hpp>

#include "fundata/errors.hpp"

namespace fundata::io {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::optional<double> parse_number(std::string_view text) {
    const std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+') ++first;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return v;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_raw_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    RawTable t;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": ragged row with " +
                          std::to_string(cells.size()) + " cells, header has " +
                          std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw IoError("'" + path.string() + "' is empty");
    return t;
}

// Returns the grid from the header cells and whether it was numeric.
std::pair<Grid1D, bool> header_grid(const std::vector<std::string>& cells) {
    std::vector<double> pts;
    bool numeric = true;
    for (const auto& c : cells) {
        const auto v = parse_number(c);
        if (!v) {
            numeric = false;
            break;
        }
        pts.push_back(*v);
    }
    if (numeric) return {Grid1D(std::move(pts)), true};
    // Factorize: codes by order of first appearance.
    std::map<std::string, double> codes;
    pts.clear();
    for (const auto& c : cells) {
        auto [it, inserted] = codes.emplace(c, static_cast<double>(codes.size()));
        pts.push_back(it->second);
    }
    return {Grid1D(std::move(pts)), false};
}

DenseFD table_to_dense(const RawTable& t, const CsvOptions& options, const std::filesystem::path& path,
                       bool require_numeric_header) {
    const std::size_t skip = options.index_col ? 1 : 0;
    if (t.header.size() <= skip) {
        throw IoError("'" + path.string() + "' has no data columns");
    }
    if (t.rows.empty()) {
        throw IoError("'" + path.string() + "' has no data rows");
    }
    std::vector<std::string> hdr(t.header.begin() + static_cast<std::ptrdiff_t>(skip), t.header.end());
    auto [grid, numeric] = header_grid(hdr);
    if (require_numeric_header && !numeric) {
        throw IoError("'" + path.string() + "' needs a numeric header of sampling points");
    }
    std::vector<double> values;
    values.reserve(t.rows.size() * hdr.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = skip; c < t.rows[r].size(); ++c) {
            const std::string cell = trim(t.rows[r][c]);
            if (cell == options.na_token) {
                values.push_back(kMissing);
                continue;
            }
            const auto v = parse_number(cell);
            if (!v) {
                throw IoError(path.string() + ": row " + std::to_string(r + 1) + ", column " +
                              std::to_string(c + 1) + ": cannot parse '" + cell + "'");
            }
            values.push_back(*v);
        }
    }
    return DenseFD(DenseArgvals{{default_dim_name(0), std::move(grid)}}, std::move(values));
}

std::string dense_csv_text(const DenseFD& fd, const CsvOptions& options) {
    std::string out;
    std::vector<double> header;
    if (fd.n_dim() == 1) {
        header = fd.grid(0).vector();
    } else {
        header.resize(fd.n_cells());
        for (std::size_t i = 0; i < header.size(); ++i) header[i] = static_cast<double>(i);
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0 || options.index_col) out += ',';
        out += format_double(header[i]);
    }
    out += '\n';
    for (std::size_t n = 0; n < fd.n_obs(); ++n) {
        const auto row = fd.observation(n);
        if (options.index_col) out += std::to_string(n);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0 || options.index_col) out += ',';
            out += is_missing(row[i]) ? options.na_token : format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

bool parse_bool(const std::string& s, const std::string& directive) {
    std::string l = s;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
    if (l == "true") return true;
    if (l == "false") return false;
    throw IoError("malformed ts header: " + directive + " expects true/false, got '" + s + "'");
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

DenseFD read_csv_dense(const std::filesystem::path& path, const CsvOptions& options) {
    return table_to_dense(read_raw_csv(path), options, path, false);
}

IrregularFD read_csv_irregular(const std::filesystem::path& path, const CsvOptions& options) {
    return to_irregular(table_to_dense(read_raw_csv(path), options, path, true));
}

void write_csv(const DenseFD& fd, const std::filesystem::path& path, const CsvOptions& options) {
    write_file_atomic(path, dense_csv_text(fd, options));
}

void write_csv(const IrregularFD& fd, const std::filesystem::path& path, const CsvOptions& options) {
    if (fd.n_dim() != 1) {
        throw IoError("CSV output of 2-D irregular data is not supported");
    }
    write_file_atomic(path, dense_csv_text(to_dense(fd), options));
}

// ---------------------------------------------------------------------------
// ts

TsData read_ts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string problem;
    bool class_label = false;
    bool saw_class_directive = false;
    std::vector<std::string> declared;
    bool in_data = false;
    std::vector<std::vector<double>> series;
    std::vector<std::string> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!in_data) {
            if (t[0] != '@') {
                throw IoError("malformed ts header at line " + std::to_string(line_no) +
                              ": data before @data");
            }
            std::istringstream ss(t);
            std::string directive;
            ss >> directive;
            std::string lower = directive;
            std::transform(lower.begin(), lower.end(), lower.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            std::vector<std::string> args;
            for (std::string a; ss >> a;) args.push_back(a);
            auto need_one = [&] {
                if (args.size() != 1) {
                    throw IoError("malformed ts header: " + directive + " expects one value");
                }
            };
            if (lower == "@problemname") {
                need_one();
                problem = args[0];
            } else if (lower == "@timestamps") {
                need_one();
                if (parse_bool(args[0], directive)) {
                    throw IoError("ts files with time stamps are not supported");
                }
            } else if (lower == "@missing" || lower == "@equallength") {
                need_one();
                const bool v = parse_bool(args[0], directive);
                if (lower == "@equallength" && !v) {
                    throw IoError("variable-length ts series are not supported");
                }
            } else if (lower == "@univariate") {
                need_one();
                if (!parse_bool(args[0], directive)) {
                    throw IoError("multivariate ts files are not supported");
                }
            } else if (lower == "@serieslength" || lower == "@dimensions") {
                need_one();
                if (!parse_number(args[0])) {
                    throw IoError("malformed ts header: " + directive + " expects a number");
                }
            } else if (lower == "@classlabel") {
                if (args.empty()) throw IoError("malformed ts header: @classLabel without value");
                class_label = parse_bool(args[0], directive);
                saw_class_directive = true;
                declared.assign(args.begin() + 1, args.end());
                if (class_label && declared.empty()) {
                    throw IoError("malformed ts header: @classLabel true without labels");
                }
            } else if (lower == "@targetlabel") {
                throw IoError("regression ts files (@targetLabel) are not supported");
            } else if (lower == "@data") {
                in_data = true;
            } else {
                throw IoError("malformed ts header: unknown directive " + directive);
            }
            continue;
        }
        std::string body = t;
        if (class_label) {
            const auto pos = body.rfind(':');
            if (pos == std::string::npos) {
                throw IoError("ts line " + std::to_string(line_no) + " lacks a class label");
            }
            std::string label = trim(body.substr(pos + 1));
            if (std::find(declared.begin(), declared.end(), label) == declared.end()) {
                throw IoError("ts line " + std::to_string(line_no) + ": undeclared label '" + label + "'");
            }
            labels.push_back(std::move(label));
            body = body.substr(0, pos);
        }
        if (body.find(':') != std::string::npos) {
            throw IoError("ts line " + std::to_string(line_no) + " has several dimensions");
        }
        std::vector<double> s;
        for (const auto& cell : split_csv_line(body)) {
            const std::string c = trim(cell);
            if (c == "?" || c == "NaN" || c == "nan") {
                s.push_back(kMissing);
                continue;
            }
            const auto v = parse_number(c);
            if (!v) {
                throw IoError("ts line " + std::to_string(line_no) + ": cannot parse '" + c + "'");
            }
            s.push_back(*v);
        }
        if (!series.empty() && s.size() != series.front().size()) {
            throw IoError("ts line " + std::to_string(line_no) +
                          ": variable-length series are not supported");
        }
        series.push_back(std::move(s));
    }
    if (!in_data) throw IoError("malformed ts header: missing @data");
    if (!saw_class_directive) throw IoError("malformed ts header: missing @classLabel");
    if (series.empty()) throw IoError("ts file has no series");
    const std::size_t m = series.front().size();
    std::vector<double> grid(m), values;
    for (std::size_t i = 0; i < m; ++i) grid[i] = static_cast<double>(i);
    for (const auto& s : series) values.insert(values.end(), s.begin(), s.end());
    TsData out{DenseFD(DenseArgvals{{default_dim_name(0), Grid1D(std::move(grid))}}, std::move(values)),
               std::nullopt, problem};
    if (class_label) out.labels = std::move(labels);
    return out;
}

void write_ts(const DenseFD& fd, const std::optional<std::vector<std::string>>& labels,
              const std::filesystem::path& path, const std::string& problem_name) {
    if (fd.n_dim() != 1) throw IoError("ts output needs 1-D data");
    if (labels && labels->size() != fd.n_obs()) {
        throw IoError("label count does not match the number of series");
    }
    std::string out = "@problemName " + problem_name + "\n@timeStamps false\n";
    out += std::string("@missing ") + (fd.has_missing() ? "true" : "false") + "\n";
    out += "@univariate true\n@equalLength true\n";
    out += "@seriesLength " + std::to_string(fd.n_cells()) + "\n";
    if (labels) {
        std::vector<std::string> distinct;
        for (const auto& l : *labels) {
            if (std::find(distinct.begin(), distinct.end(), l) == distinct.end()) distinct.push_back(l);
        }
        out += "@classLabel true";
        for (const auto& l : distinct) out += " " + l;
        out += "\n";
    } else {
        out += "@classLabel false\n";
    }
    out += "@data\n";
    for (std::size_t n = 0; n < fd.n_obs(); ++n) {
        const auto row = fd.observation(n);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += is_missing(row[i]) ? std::string("?") : format_double(row[i]);
        }
        if (labels) out += ":" + (*labels)[n];
        out += '\n';
    }
    write_file_atomic(path, out);
}

// ---------------------------------------------------------------------------
// Manifest

MultivariateFD read_manifest(const std::filesystem::path& path, const CsvOptions& options) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse manifest '" + path.string() + "': " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "fundata-manifest") {
            throw IoError("'" + path.string() + "' is not a fundata manifest");
        }
        const auto dir = path.parent_path();
        std::vector<UnivariateFD> comps;
        for (const auto& c : j.at("components")) {
            const auto file = dir / c.at("file").get<std::string>();
            const std::string kind = c.value("kind", "dense");
            if (c.contains("dims") && c.at("dims").size() == 2) {
                DenseFD flat = read_csv_dense(file, options);
                DenseArgvals argvals;
                for (const auto& d : c.at("dims")) {
                    argvals.push_back({d.at("name").get<std::string>(),
                                       Grid1D(d.at("points").get<std::vector<double>>())});
                }
                std::vector<double> v(flat.values().begin(), flat.values().end());
                DenseFD image(std::move(argvals), std::move(v));
                if (image.n_cells() != flat.n_cells()) {
                    throw IoError("manifest grids do not match the width of '" + file.string() + "'");
                }
                if (kind == "irregular") {
                    comps.emplace_back(to_irregular(image));
                } else {
                    comps.emplace_back(std::move(image));
                }
            } else if (kind == "irregular") {
                comps.emplace_back(read_csv_irregular(file, options));
            } else if (kind == "dense") {
                comps.emplace_back(read_csv_dense(file, options));
            } else {
                throw IoError("unknown component kind '" + kind + "'");
            }
        }
        return MultivariateFD(std::move(comps));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest '" + path.string() + "': " + e.what());
    }
}

void write_manifest(const MultivariateFD& fd, const std::filesystem::path& path, const CsvOptions& options) {
    const auto dir = path.parent_path();
    const std::string stem = path.stem().string();
    nlohmann::json comps = nlohmann::json::array();
    for (std::size_t p = 0; p < fd.n_components(); ++p) {
        const std::string file = stem + "_" + std::to_string(p) + ".csv";
        nlohmann::json c;
        c["file"] = file;
        const auto& comp = fd[p];
        if (const auto* d = std::get_if<DenseFD>(&comp)) {
            c["kind"] = "dense";
            write_csv(*d, dir / file, options);
            if (d->n_dim() == 2) {
                for (const auto& dim : d->argvals()) {
                    c["dims"].push_back({{"name", dim.name}, {"points", dim.grid.vector()}});
                }
            }
        } else {
            const auto& irr = std::get<IrregularFD>(comp);
            c["kind"] = "irregular";
            if (irr.n_dim() == 2) {
                const DenseFD dense = to_dense(irr);
                write_csv(dense, dir / file, options);
                for (const auto& dim : dense.argvals()) {
                    c["dims"].push_back({{"name", dim.name}, {"points", dim.grid.vector()}});
                }
            } else {
                write_csv(irr, dir / file, options);
            }
        }
        comps.push_back(std::move(c));
    }
    nlohmann::json j{{"format", "fundata-manifest"}, {"version", 1}, {"components", comps}};
    write_file_atomic(path, j.dump(2) + "\n");
}

MultivariateFD read_any(const std::filesystem::path& path, const CsvOptions& options) {
    const auto ext = path.extension().string();
    if (ext == ".json") return read_manifest(path, options);
    if (ext == ".ts") return MultivariateFD({read_ts(path).data});
    return MultivariateFD({read_csv_dense(path, options)});
}

// ---------------------------------------------------------------------------
// Labels and tables

std::vector<int> read_labels(const std::filesystem::path& path) {
    const RawTable t = read_raw_csv(path);
    std::vector<int> out;
    for (const auto& row : t.rows) {
        const auto v = parse_number(row.back());
        if (!v || *v != static_cast<double>(static_cast<int>(*v))) {
            throw IoError("'" + path.string() + "': label '" + row.back() + "' is not an integer");
        }
        out.push_back(static_cast<int>(*v));
    }
    return out;
}

void write_labels(std::span<const int> labels, const std::filesystem::path& path) {
    std::string out = ",label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += std::to_string(i) + "," + std::to_string(labels[i]) + "\n";
    }
    write_file_atomic(path, out);
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const RowMatrix& values, bool with_index) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0 || with_index) out += ',';
        out += header[i];
    }
    out += '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        if (with_index) out += std::to_string(r);
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (c > 0 || with_index) out += ',';
            out += is_missing(values(r, c)) ? std::string("NA") : format_double(values(r, c));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

RowMatrix read_table(const std::filesystem::path& path, bool index_col) {
    const RawTable t = read_raw_csv(path);
    const std::size_t skip = index_col ? 1 : 0;
    const std::size_t cols = t.header.size() - skip;
    RowMatrix m(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::string cell = trim(t.rows[r][c + skip]);
            if (cell == "NA") {
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = kMissing;
                continue;
            }
            const auto v = parse_number(cell);
            if (!v) throw IoError("'" + path.string() + "': cannot parse '" + cell + "'");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
        }
    }
    return m;
}

}  // namespace fundata::io
