#include "fundata/functional_data.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "fundata/errors.hpp"

namespace fundata {

std::string default_dim_name(std::size_t k) { return "input_dim_" + std::to_string(k); }

namespace {

std::size_t product_of_sizes(const std::vector<Grid1D>& grids) {
    std::size_t p = 1;
    for (const auto& g : grids) p *= g.size();
    return p;
}

void check_dim_count(std::size_t d) {
    if (d == 0 || d > 2) {
        throw ValidationError("domains must have 1 or 2 dimensions, got " + std::to_string(d));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// DenseFD

DenseFD::DenseFD(DenseArgvals argvals, std::vector<double> values)
    : argvals_(std::move(argvals)), values_(std::move(values)) {
    check_dim_count(argvals_.size());
    std::set<std::string> names;
    cells_ = 1;
    for (const auto& d : argvals_) {
        if (!names.insert(d.name).second) {
            throw ValidationError("duplicate dimension name '" + d.name + "'");
        }
        cells_ *= d.grid.size();
    }
    if (values_.empty()) {
        throw ValidationError("dense functional data needs at least one observation");
    }
    if (values_.size() % cells_ != 0) {
        throw ValidationError("values size " + std::to_string(values_.size()) +
                              " is not a multiple of the grid size " + std::to_string(cells_));
    }
    n_obs_ = values_.size() / cells_;
    for (std::size_t n = 0; n < n_obs_; ++n) {
        bool any = false;
        for (std::size_t i = 0; i < cells_; ++i) {
            const double v = values_[n * cells_ + i];
            if (is_missing(v)) continue;
            if (!std::isfinite(v)) {
                throw ValidationError("observation " + std::to_string(n) + " has a non-finite value");
            }
            any = true;
        }
        if (!any) {
            throw ValidationError("observation " + std::to_string(n) + " has no observed cell");
        }
    }
}

DenseFD::DenseFD(Grid1D grid, const RowMatrix& values)
    : DenseFD(DenseArgvals{{default_dim_name(0), std::move(grid)}},
              std::vector<double>(values.data(), values.data() + values.size())) {
    if (static_cast<std::size_t>(values.cols()) != argvals_[0].grid.size()) {
        throw ValidationError("values have " + std::to_string(values.cols()) +
                              " columns but the grid has " +
                              std::to_string(argvals_[0].grid.size()) + " points");
    }
}

std::vector<std::size_t> DenseFD::shape() const {
    std::vector<std::size_t> s{n_obs_};
    for (const auto& d : argvals_) s.push_back(d.grid.size());
    return s;
}

bool DenseFD::has_missing() const {
    return std::any_of(values_.begin(), values_.end(), [](double v) { return is_missing(v); });
}

DenseArgvals DenseFD::argvals_stand() const {
    DenseArgvals out;
    for (const auto& d : argvals_) out.push_back({d.name, d.grid.standardized()});
    return out;
}

// ---------------------------------------------------------------------------
// IrregularFD

IrregularFD::IrregularFD(std::vector<std::string> dim_names, std::vector<IrregularObs> obs)
    : dim_names_(std::move(dim_names)), obs_(std::move(obs)) {
    check_dim_count(dim_names_.size());
    if (obs_.empty()) {
        throw ValidationError("irregular functional data needs at least one observation");
    }
    for (std::size_t n = 0; n < obs_.size(); ++n) {
        const auto& o = obs_[n];
        if (o.grids.size() != dim_names_.size()) {
            throw ValidationError("observation " + std::to_string(n) + " has " +
                                  std::to_string(o.grids.size()) + " grids, expected " +
                                  std::to_string(dim_names_.size()));
        }
        if (o.values.size() != product_of_sizes(o.grids)) {
            throw ValidationError("observation " + std::to_string(n) +
                                  ": values do not match the grid shape");
        }
        for (double v : o.values) {
            if (is_missing(v)) {
                throw ValidationError("observation " + std::to_string(n) +
                                      " contains a missing value; irregular data cannot");
            }
            if (!std::isfinite(v)) {
                throw ValidationError("observation " + std::to_string(n) + " has a non-finite value");
            }
        }
    }
}

IrregularFD IrregularFD::from_maps(const IrregularArgvals& argvals,
                                   const std::map<std::size_t, std::vector<double>>& values) {
    check_dim_count(argvals.size());
    std::vector<std::string> names;
    for (const auto& [name, per_obs] : argvals) {
        names.push_back(name);
        if (per_obs.size() != values.size() ||
            !std::equal(per_obs.begin(), per_obs.end(), values.begin(),
                        [](const auto& a, const auto& b) { return a.first == b.first; })) {
            throw ValidationError("argvals for '" + name +
                                  "' and values have different observation keys");
        }
    }
    std::vector<IrregularObs> obs;
    obs.reserve(values.size());
    for (const auto& [key, vals] : values) {
        IrregularObs o;
        for (const auto& [name, per_obs] : argvals) o.grids.push_back(per_obs.at(key));
        o.values = vals;
        obs.push_back(std::move(o));
    }
    return IrregularFD(std::move(names), std::move(obs));
}

Grid1D IrregularFD::union_grid(std::size_t dim) const {
    std::vector<Grid1D> gs;
    gs.reserve(obs_.size());
    for (const auto& o : obs_) gs.push_back(o.grids.at(dim));
    return fundata::union_grid(gs);
}

IrregularArgvals IrregularFD::argvals() const {
    IrregularArgvals out;
    for (std::size_t d = 0; d < dim_names_.size(); ++d) {
        std::map<std::size_t, Grid1D> per;
        for (std::size_t n = 0; n < obs_.size(); ++n) per.emplace(n, obs_[n].grids[d]);
        out.emplace_back(dim_names_[d], std::move(per));
    }
    return out;
}

IrregularArgvals IrregularFD::argvals_stand() const {
    IrregularArgvals out;
    for (std::size_t d = 0; d < dim_names_.size(); ++d) {
        const Grid1D all = union_grid(d);
        const double lo = all.front();
        const double span = all.length();
        std::map<std::size_t, Grid1D> per;
        for (std::size_t n = 0; n < obs_.size(); ++n) {
            std::vector<double> p(obs_[n].grids[d].vector());
            for (double& x : p) x = span > 0.0 ? (x - lo) / span : 0.0;
            per.emplace(n, Grid1D(std::move(p)));
        }
        out.emplace_back(dim_names_[d], std::move(per));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Variant helpers and MultivariateFD

std::size_t n_obs(const UnivariateFD& fd) {
    return std::visit([](const auto& x) { return x.n_obs(); }, fd);
}

std::size_t n_dim(const UnivariateFD& fd) {
    return std::visit([](const auto& x) { return x.n_dim(); }, fd);
}

MultivariateFD::MultivariateFD(std::vector<UnivariateFD> components)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw ValidationError("multivariate functional data needs at least one component");
    }
    const std::size_t n = fundata::n_obs(components_.front());
    for (std::size_t p = 1; p < components_.size(); ++p) {
        if (fundata::n_obs(components_[p]) != n) {
            throw ValidationError("component " + std::to_string(p) + " has " +
                                  std::to_string(fundata::n_obs(components_[p])) +
                                  " observations, expected " + std::to_string(n));
        }
    }
}

std::size_t MultivariateFD::n_obs() const { return fundata::n_obs(components_.front()); }

void MultivariateFD::append(UnivariateFD component) {
    if (fundata::n_obs(component) != n_obs()) {
        throw ValidationError("appended component has " +
                              std::to_string(fundata::n_obs(component)) +
                              " observations, expected " + std::to_string(n_obs()));
    }
    components_.push_back(std::move(component));
}

void MultivariateFD::extend(const MultivariateFD& other) {
    if (other.n_obs() != n_obs()) {
        throw ValidationError("cannot extend with an object of " + std::to_string(other.n_obs()) +
                              " observations");
    }
    components_.insert(components_.end(), other.components_.begin(), other.components_.end());
}

UnivariateFD MultivariateFD::pop(std::size_t p) {
    if (p >= components_.size()) {
        throw ValidationError("component index out of range");
    }
    if (components_.size() == 1) {
        throw ValidationError("cannot remove the only component");
    }
    UnivariateFD out = std::move(components_[p]);
    components_.erase(components_.begin() + static_cast<std::ptrdiff_t>(p));
    return out;
}

// ---------------------------------------------------------------------------
// Summaries

FDSummary summary(const DenseFD& fd) {
    FDSummary s;
    s.n_obs = fd.n_obs();
    s.n_dim = fd.n_dim();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double v : fd.values()) {
        if (is_missing(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    s.range_obs = {lo, hi};
    for (const auto& d : fd.argvals()) {
        s.n_points.push_back(static_cast<double>(d.grid.size()));
        s.range_points.emplace_back(d.grid.front(), d.grid.back());
    }
    return s;
}

FDSummary summary(const IrregularFD& fd) {
    FDSummary s;
    s.n_obs = fd.n_obs();
    s.n_dim = fd.n_dim();
    s.n_points_is_mean = true;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& o : fd.observations()) {
        for (double v : o.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    s.range_obs = {lo, hi};
    for (std::size_t d = 0; d < fd.n_dim(); ++d) {
        double total = 0.0;
        for (const auto& o : fd.observations()) total += static_cast<double>(o.grids[d].size());
        s.n_points.push_back(total / static_cast<double>(fd.n_obs()));
        const Grid1D all = fd.union_grid(d);
        s.range_points.emplace_back(all.front(), all.back());
    }
    return s;
}

FDSummary summary(const UnivariateFD& fd) {
    return std::visit([](const auto& x) { return summary(x); }, fd);
}

std::vector<FDSummary> summary(const MultivariateFD& fd) {
    std::vector<FDSummary> out;
    for (const auto& c : fd) out.push_back(summary(c));
    return out;
}

std::string describe(const UnivariateFD& fd) {
    return "Univariate functional data object with " + std::to_string(n_obs(fd)) +
           " observations on a " + std::to_string(n_dim(fd)) + "-dimensional support.";
}

std::string describe(const MultivariateFD& fd) {
    return "Multivariate functional data object with " + std::to_string(fd.n_components()) +
           " functions of " + std::to_string(fd.n_obs()) + " observations.";
}

// ---------------------------------------------------------------------------
// Subsetting

namespace {

void check_range(std::size_t lo, std::size_t hi, std::size_t n) {
    if (lo > hi || hi > n) {
        throw ValidationError("subset [" + std::to_string(lo) + "," + std::to_string(hi) +
                              ") out of range for " + std::to_string(n) + " observations");
    }
    if (lo == hi) {
        throw ValidationError("empty subset [" + std::to_string(lo) + "," + std::to_string(hi) + ")");
    }
}

std::vector<std::size_t> iota(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> idx(hi - lo);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = lo + i;
    return idx;
}

}  // namespace

DenseFD subset(const DenseFD& fd, std::size_t lo, std::size_t hi) {
    check_range(lo, hi, fd.n_obs());
    const auto idx = iota(lo, hi);
    return select(fd, idx);
}

IrregularFD subset(const IrregularFD& fd, std::size_t lo, std::size_t hi) {
    check_range(lo, hi, fd.n_obs());
    const auto idx = iota(lo, hi);
    return select(fd, idx);
}

UnivariateFD subset(const UnivariateFD& fd, std::size_t lo, std::size_t hi) {
    return std::visit([&](const auto& x) -> UnivariateFD { return subset(x, lo, hi); }, fd);
}

DenseFD select(const DenseFD& fd, std::span<const std::size_t> idx) {
    if (idx.empty()) throw ValidationError("empty selection");
    std::vector<double> v;
    v.reserve(idx.size() * fd.n_cells());
    for (std::size_t n : idx) {
        if (n >= fd.n_obs()) throw ValidationError("observation index out of range");
        const auto row = fd.observation(n);
        v.insert(v.end(), row.begin(), row.end());
    }
    return DenseFD(fd.argvals(), std::move(v));
}

IrregularFD select(const IrregularFD& fd, std::span<const std::size_t> idx) {
    if (idx.empty()) throw ValidationError("empty selection");
    std::vector<IrregularObs> obs;
    obs.reserve(idx.size());
    for (std::size_t n : idx) {
        if (n >= fd.n_obs()) throw ValidationError("observation index out of range");
        obs.push_back(fd.obs(n));
    }
    return IrregularFD(fd.dim_names(), std::move(obs));
}

UnivariateFD select(const UnivariateFD& fd, std::span<const std::size_t> idx) {
    return std::visit([&](const auto& x) -> UnivariateFD { return select(x, idx); }, fd);
}

MultivariateFD select(const MultivariateFD& fd, std::span<const std::size_t> idx) {
    std::vector<UnivariateFD> comps;
    for (const auto& c : fd) comps.push_back(select(c, idx));
    return MultivariateFD(std::move(comps));
}

std::vector<MultivariateFD> iterate_obs(const MultivariateFD& fd) {
    std::vector<MultivariateFD> out;
    out.reserve(fd.n_obs());
    for (std::size_t n = 0; n < fd.n_obs(); ++n) {
        const std::size_t one[] = {n};
        out.push_back(select(fd, one));
    }
    return out;
}

UnivariateFD concatenate(std::span<const UnivariateFD> parts) {
    if (parts.empty()) throw ValidationError("nothing to concatenate");
    if (std::holds_alternative<DenseFD>(parts.front())) {
        const auto& first = std::get<DenseFD>(parts.front());
        std::vector<double> v;
        for (const auto& p : parts) {
            const auto* d = std::get_if<DenseFD>(&p);
            if (d == nullptr || !(d->argvals() == first.argvals())) {
                throw ValidationError("dense parts must share identical argvals");
            }
            v.insert(v.end(), d->values().begin(), d->values().end());
        }
        return DenseFD(first.argvals(), std::move(v));
    }
    const auto& first = std::get<IrregularFD>(parts.front());
    std::vector<IrregularObs> obs;
    for (const auto& p : parts) {
        const auto* d = std::get_if<IrregularFD>(&p);
        if (d == nullptr || d->dim_names() != first.dim_names()) {
            throw ValidationError("irregular parts must share dimension names");
        }
        obs.insert(obs.end(), d->observations().begin(), d->observations().end());
    }
    return IrregularFD(first.dim_names(), std::move(obs));
}

MultivariateFD concatenate(std::span<const MultivariateFD> parts) {
    if (parts.empty()) throw ValidationError("nothing to concatenate");
    const std::size_t p_count = parts.front().n_components();
    std::vector<UnivariateFD> comps;
    for (std::size_t p = 0; p < p_count; ++p) {
        std::vector<UnivariateFD> column;
        for (const auto& part : parts) {
            if (part.n_components() != p_count) {
                throw ValidationError("parts have different component counts");
            }
            column.push_back(part[p]);
        }
        comps.push_back(concatenate(std::span<const UnivariateFD>(column)));
    }
    return MultivariateFD(std::move(comps));
}

// ---------------------------------------------------------------------------
// Conversions

IrregularFD to_irregular(const DenseFD& fd) {
    std::vector<std::string> names;
    for (const auto& d : fd.argvals()) names.push_back(d.name);
    std::vector<IrregularObs> obs;
    obs.reserve(fd.n_obs());
    if (fd.n_dim() == 1) {
        const Grid1D& g = fd.grid(0);
        for (std::size_t n = 0; n < fd.n_obs(); ++n) {
            std::vector<double> pts, vals;
            const auto row = fd.observation(n);
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (is_missing(row[i])) continue;
                pts.push_back(g[i]);
                vals.push_back(row[i]);
            }
            obs.push_back({{Grid1D(std::move(pts))}, std::move(vals)});
        }
        return IrregularFD(std::move(names), std::move(obs));
    }
    const Grid1D& gx = fd.grid(0);
    const Grid1D& gy = fd.grid(1);
    for (std::size_t n = 0; n < fd.n_obs(); ++n) {
        std::vector<std::size_t> rows, cols;
        for (std::size_t i = 0; i < gx.size(); ++i) {
            bool any = false;
            for (std::size_t j = 0; j < gy.size(); ++j) any = any || !is_missing(fd.at(n, i, j));
            if (any) rows.push_back(i);
        }
        for (std::size_t j = 0; j < gy.size(); ++j) {
            bool any = false;
            for (std::size_t i = 0; i < gx.size(); ++i) any = any || !is_missing(fd.at(n, i, j));
            if (any) cols.push_back(j);
        }
        std::vector<double> px, py, vals;
        for (auto i : rows) px.push_back(gx[i]);
        for (auto j : cols) py.push_back(gy[j]);
        for (auto i : rows) {
            for (auto j : cols) {
                const double v = fd.at(n, i, j);
                if (is_missing(v)) {
                    throw ValidationError("observation " + std::to_string(n) +
                                          " has scattered missing cells; a 2-D irregular "
                                          "observation needs a full sub-grid");
                }
                vals.push_back(v);
            }
        }
        obs.push_back({{Grid1D(std::move(px)), Grid1D(std::move(py))}, std::move(vals)});
    }
    return IrregularFD(std::move(names), std::move(obs));
}

DenseFD to_dense(const IrregularFD& fd) {
    DenseArgvals argvals;
    for (std::size_t d = 0; d < fd.n_dim(); ++d) {
        argvals.push_back({fd.dim_names()[d], fd.union_grid(d)});
    }
    std::size_t cells = 1;
    for (const auto& a : argvals) cells *= a.grid.size();
    std::vector<double> values(fd.n_obs() * cells, kMissing);
    for (std::size_t n = 0; n < fd.n_obs(); ++n) {
        const auto& o = fd.obs(n);
        double* out = values.data() + n * cells;
        if (fd.n_dim() == 1) {
            for (std::size_t i = 0; i < o.grids[0].size(); ++i) {
                out[argvals[0].grid.find(o.grids[0][i])] = o.values[i];
            }
        } else {
            const std::size_t my = argvals[1].grid.size();
            for (std::size_t i = 0; i < o.grids[0].size(); ++i) {
                const std::size_t gi = argvals[0].grid.find(o.grids[0][i]);
                for (std::size_t j = 0; j < o.grids[1].size(); ++j) {
                    const std::size_t gj = argvals[1].grid.find(o.grids[1][j]);
                    out[gi * my + gj] = o.values[i * o.grids[1].size() + j];
                }
            }
        }
    }
    return DenseFD(std::move(argvals), std::move(values));
}

bool same_content(const DenseFD& a, const DenseFD& b) {
    if (!(a.argvals() == b.argvals()) || a.n_obs() != b.n_obs()) return false;
    const auto va = a.values();
    const auto vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) {
        const bool ma = is_missing(va[i]);
        const bool mb = is_missing(vb[i]);
        if (ma != mb) return false;
        if (!ma && va[i] != vb[i]) return false;
    }
    return true;
}

bool same_content(const IrregularFD& a, const IrregularFD& b) {
    if (a.dim_names() != b.dim_names() || a.n_obs() != b.n_obs()) return false;
    for (std::size_t n = 0; n < a.n_obs(); ++n) {
        if (a.obs(n).grids != b.obs(n).grids || a.obs(n).values != b.obs(n).values) return false;
    }
    return true;
}

}  // namespace fundata
