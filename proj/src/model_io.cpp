#include "fundata/model_io.hpp"

#include <json.hpp>

#include "fundata/errors.hpp"
#include "fundata/io.hpp"

namespace fundata::pca {

namespace {

using nlohmann::json;

constexpr int kVersion = 1;

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

template <class M>
json mat(const M& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
        rows.push_back(std::move(r));
    }
    return rows;
}

Eigen::VectorXd to_vec(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <class M>
M to_mat(const json& j, Eigen::Index cols_if_empty = 0) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = rows.empty() ? cols_if_empty : static_cast<Eigen::Index>(rows[0].size());
    M m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c) {
            throw IoError("model file: ragged matrix");
        }
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return m;
}

json dims_json(const DenseArgvals& argvals) {
    json dims = json::array();
    for (const auto& d : argvals) dims.push_back({{"name", d.name}, {"points", d.grid.vector()}});
    return dims;
}

DenseArgvals dims_from(const json& j) {
    DenseArgvals out;
    for (const auto& d : j) out.push_back({d.at("name").get<std::string>(), Grid1D(d.at("points").get<std::vector<double>>())});
    return out;
}

json basis_json(const ComponentBasis& basis) {
    if (const auto* u = std::get_if<UfpcaModel>(&basis)) {
        return {{"kind", "ufpca"},
                {"dims", dims_json({{u->dim_name, u->grid}})},
                {"mean", vec(u->mean)},
                {"eigenfunctions", mat(u->eigenfunctions)},
                {"eigenvalues", vec(u->eigenvalues)},
                {"spectrum", vec(u->spectrum)},
                {"n_clipped", u->n_clipped},
                {"n_comp", u->n_comp},
                {"noise_variance", u->noise_variance}};
    }
    const auto& f = std::get<FcptpaModel>(basis);
    const auto& d = f.decomposition;
    std::vector<int> degenerate(d.degenerate.begin(), d.degenerate.end());
    return {{"kind", "fcptpa"},
            {"dims", dims_json(f.argvals)},
            {"mean", vec(f.mean)},
            {"lambda", vec(d.lambda)},
            {"u", mat(d.u)},
            {"v", mat(d.v)},
            {"w", mat(d.w)},
            {"alpha_v", d.alpha_v},
            {"alpha_w", d.alpha_w},
            {"degenerate", degenerate},
            {"iterations", d.iterations},
            {"eigenimages", mat(f.eigenimages)},
            {"training_scores", mat(f.training_scores)},
            {"n_comp", f.n_comp}};
}

ComponentBasis basis_from(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    const DenseArgvals dims = dims_from(j.at("dims"));
    if (kind == "ufpca") {
        if (dims.size() != 1) throw IoError("model file: ufpca component needs one dimension");
        const auto cells = static_cast<Eigen::Index>(dims[0].grid.size());
        return UfpcaModel{dims[0].name,
                          dims[0].grid,
                          to_vec(j.at("mean")),
                          to_mat<RowMatrix>(j.at("eigenfunctions"), cells),
                          to_vec(j.at("eigenvalues")),
                          to_vec(j.at("spectrum")),
                          j.at("n_clipped").get<std::size_t>(),
                          j.at("n_comp").get<double>(),
                          j.at("noise_variance").get<double>()};
    }
    if (kind == "fcptpa") {
        if (dims.size() != 2) throw IoError("model file: fcptpa component needs two dimensions");
        CpDecomposition d;
        d.lambda = to_vec(j.at("lambda"));
        d.u = to_mat<Eigen::MatrixXd>(j.at("u"));
        d.v = to_mat<Eigen::MatrixXd>(j.at("v"));
        d.w = to_mat<Eigen::MatrixXd>(j.at("w"));
        d.alpha_v = j.at("alpha_v").get<std::vector<double>>();
        d.alpha_w = j.at("alpha_w").get<std::vector<double>>();
        for (int g : j.at("degenerate").get<std::vector<int>>()) d.degenerate.push_back(g != 0);
        d.iterations = j.at("iterations").get<std::vector<std::size_t>>();
        const auto cells = static_cast<Eigen::Index>(dims[0].grid.size() * dims[1].grid.size());
        return FcptpaModel{dims,
                           to_vec(j.at("mean")),
                           std::move(d),
                           to_mat<RowMatrix>(j.at("eigenimages"), cells),
                           to_mat<RowMatrix>(j.at("training_scores")),
                           j.at("n_comp").get<double>()};
    }
    throw IoError("model file: unknown component kind '" + kind + "'");
}

}  // namespace

std::string model_to_json(const MfpcaModel& model) {
    json comps = json::array();
    for (const auto& b : model.bases) comps.push_back(basis_json(b));
    json eigenfunctions = json::array();
    for (const auto& f : model.eigenfunctions) eigenfunctions.push_back(mat(f));
    const json doc = {{"format", "fundata-mfpca"},
                      {"version", kVersion},
                      {"method", to_string(model.method)},
                      {"components", comps},
                      {"offsets", model.offsets},
                      {"stacked_scores", mat(model.stacked_scores)},
                      {"eigenvalues", vec(model.eigenvalues)},
                      {"eigenvectors", mat(model.eigenvectors)},
                      {"n_clipped", model.n_clipped},
                      {"eigenfunctions", eigenfunctions},
                      {"scores", mat(model.scores)}};
    return doc.dump(1) + "\n";
}

MfpcaModel model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "fundata-mfpca") throw IoError("not a fundata MFPCA model file");
        const int version = doc.at("version").get<int>();
        if (version != kVersion) throw IoError("unsupported model file version " + std::to_string(version));
        MfpcaModel m;
        m.method = parse_score_method(doc.at("method").get<std::string>());
        for (const auto& c : doc.at("components")) m.bases.push_back(basis_from(c));
        m.offsets = doc.at("offsets").get<std::vector<std::size_t>>();
        m.stacked_scores = to_mat<RowMatrix>(doc.at("stacked_scores"));
        m.eigenvalues = to_vec(doc.at("eigenvalues"));
        m.eigenvectors = to_mat<Eigen::MatrixXd>(doc.at("eigenvectors"));
        m.n_clipped = doc.at("n_clipped").get<std::size_t>();
        for (const auto& f : doc.at("eigenfunctions")) m.eigenfunctions.push_back(to_mat<RowMatrix>(f));
        m.scores = to_mat<RowMatrix>(doc.at("scores"));
        if (m.offsets.size() != m.bases.size() || m.eigenfunctions.size() != m.bases.size()) {
            throw IoError("model file: component layout is inconsistent");
        }
        return m;
    } catch (const json::exception& e) {
        throw IoError(std::string("model file is malformed: ") + e.what());
    }
}

void save_model(const MfpcaModel& model, const std::filesystem::path& path) {
    io::write_file_atomic(path, model_to_json(model));
}

MfpcaModel load_model(const std::filesystem::path& path) { return model_from_json(io::read_file(path)); }

}  // namespace fundata::pca
