#include "edgelab/indices.hpp"

#include "edgelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace edgelab {

std::string to_string(EdgeSide side) {
    switch (side) {
    case EdgeSide::bottom:
        return "bottom";
    case EdgeSide::top:
        return "top";
    case EdgeSide::bulk:
        return "bulk";
    }
    return "bulk";
}

double EdgeSpectrumReport::edge_weight(Index k, Index n) const {
    return std::max(weight_bottom(k, n), weight_top(k, n));
}

EdgeSide EdgeSpectrumReport::which_edge(Index k, Index n) const {
    if (weight_bottom(k, n) >= 0.5)
        return EdgeSide::bottom;
    if (weight_top(k, n) >= 0.5)
        return EdgeSide::top;
    return EdgeSide::bulk;
}

namespace {

PairIndexReport pair_index_from_difference(Eigen::MatrixXcd d, const PairIndexOptions& options) {
    const Index n = d.rows();
    d = 0.5 * (d + d.adjoint()).eval();

    Eigen::VectorXd window = options.window;
    if (window.size() == 0)
        window = Eigen::VectorXd::Ones(n);
    if (window.size() != n)
        throw ValidationError("dimension_mismatch", "trace window does not match dimension");

    const SpectralDecomposition dec = eigh(d);
    const Eigen::VectorXd mass =
        (dec.eigenvectors.cwiseAbs2().transpose() * window).eval();

    PairIndexReport r;
    r.tau = options.tau;
    r.eigenvalues_of_difference = dec.eigenvalues;
    r.window_sites = Index(std::llround(window.sum()));
    for (Index j = 0; j < n; ++j) {
        const double lambda = dec.eigenvalues(j);
        if (mass(j) <= 0.5)
            continue;
        if (std::abs(lambda - 1.0) <= options.tau)
            ++r.count_plus;
        else if (std::abs(lambda + 1.0) <= options.tau)
            ++r.count_minus;
    }
    for (int k = 0; k < 3; ++k) {
        const int power = 2 * (k + 1) + 1;
        double s = 0.0;
        for (Index j = 0; j < n; ++j)
            s += mass(j) * std::pow(dec.eigenvalues(j), power);
        r.odd_traces[k] = s;
    }

    // second route for the n = 1 trace, by matrix products
    const Eigen::MatrixXcd d2 = d * d;
    cplx direct = 0.0;
    for (Index x = 0; x < n; ++x)
        if (window(x) != 0.0)
            direct += window(x) * d2.row(x).dot(d.col(x).conjugate());
    r.trace_imag_defect = std::max(std::abs(direct.imag()), std::abs(direct.real() - r.odd_traces[0]));

    r.rounded_index = int(std::lround(r.odd_traces[2]));
    r.residual = std::abs(r.odd_traces[2] - r.rounded_index);
    for (int k = 1; k < 3; ++k)
        if (std::abs(r.odd_traces[k] - r.rounded_index) >
            std::abs(r.odd_traces[k - 1] - r.rounded_index) + 1e-6)
            r.monotone = false;
    r.conclusive = r.residual <= 0.1 && r.count_plus - r.count_minus == r.rounded_index;
    return r;
}

void check_projection(const Eigen::MatrixXcd& p) {
    if (p.rows() != p.cols())
        throw ValidationError("not_square", "projection must be square");
    if (p.size() > 0 && (p * p - p).cwiseAbs().maxCoeff() > 1e-8)
        throw ValidationError("not_a_projection", "P^2 != P to 1e-8");
}

} // namespace

PairIndexReport pair_index(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& u,
                           const PairIndexOptions& options) {
    check_projection(p);
    if (u.rows() != p.rows() || u.cols() != p.cols())
        throw ValidationError("dimension_mismatch", "P and U differ in dimension");
    const Index n = u.rows();
    if (n > 0 && (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
        throw ValidationError("not_unitary", "U^dag U != 1 to 1e-8");
    return pair_index_from_difference(p - u * p * u.adjoint(), options);
}

PairIndexReport pair_index(const Eigen::MatrixXcd& p, const Eigen::VectorXcd& u_diagonal,
                           const PairIndexOptions& options) {
    check_projection(p);
    if (u_diagonal.size() != p.rows())
        throw ValidationError("dimension_mismatch", "P and U differ in dimension");
    for (Index i = 0; i < u_diagonal.size(); ++i)
        if (std::abs(std::abs(u_diagonal(i)) - 1.0) > 1e-8)
            throw ValidationError("not_unitary", "diagonal U has an entry off the unit circle");
    const Eigen::MatrixXcd upu =
        u_diagonal.asDiagonal() * p * u_diagonal.conjugate().asDiagonal();
    return pair_index_from_difference(p - upu, options);
}

Eigen::VectorXcd arg_position_unitary(const LatticePatch& patch, bool flat_positions) {
    if (!flat_positions &&
        (patch.bc_x1() == Boundary::periodic || patch.bc_x2() == Boundary::periodic))
        throw ValidationError("periodic_patch",
                              "arg(X) is not single-valued on a periodic patch");
    const auto o = patch.origin();
    Eigen::VectorXcd u(patch.size());
    for (Index i = 0; i < patch.size(); ++i) {
        const Site s = patch.site(i);
        u(i) = std::polar(1.0, std::atan2(s.x2 - o[1], s.x1 - o[0]));
    }
    return u;
}

IndexResult bulk_index(const HermitianOperator& h, double mu, const Interval& bulk_gap,
                       const BulkIndexOptions& options) {
    const LatticePatch& patch = h.patch();
    if (!bulk_gap.contains(mu))
        throw ValidationError("mu_not_in_gap", "mu not in gap");
    const Eigen::VectorXcd u = arg_position_unitary(patch);

    const double radius = options.window_radius.value_or(
        0.25 * std::min(patch.extent_x1(), patch.extent_x2()));
    const auto o = patch.origin();
    PairIndexOptions po;
    po.tau = options.tau;
    po.window = Eigen::VectorXd::Zero(patch.size());
    for (Index i = 0; i < patch.size(); ++i) {
        const Site s = patch.site(i);
        if (std::abs(s.x1 - o[0]) <= radius && std::abs(s.x2 - o[1]) <= radius)
            po.window(i) = 1.0;
    }

    const Eigen::MatrixXcd pf = fermi_projection(eigh(h), mu);
    IndexResult r;
    r.report = pair_index(pf, u, po);
    if (r.report.conclusive)
        r.index = -r.report.rounded_index;
    return r;
}

int edge_step(const LatticePatch& patch) {
    return patch.first_x1() + patch.extent_x1() / 2;
}

EdgeIndexConfig default_edge_config(const LatticePatch& patch, double mu, const Interval& gap,
                                    double switch_fraction) {
    const bool periodic = patch.bc_x1() == Boundary::periodic;
    return EdgeIndexConfig{
        periodic ? patch.extent_x1() / 4 : patch.extent_x1() / 2,
        patch.extent_x2() / 2,
        make_switch(mu, gap, default_half_width(mu, gap, switch_fraction)),
        0.2,
    };
}

Eigen::MatrixXcd edge_unitary(const SpectralDecomposition& d, const SwitchFunction& g) {
    return apply_function(d, [&g](double x) { return w_g(x, g); });
}

namespace {

Eigen::VectorXd edge_window(const LatticePatch& patch, int step, int half_width, int depth) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(patch.size());
    for (Index i = 0; i < patch.size(); ++i) {
        const Site s = patch.site(i);
        if (s.x1 >= step - half_width && s.x1 <= step + half_width - 1 && patch.depth(s) < depth)
            w(i) = 1.0;
    }
    return w;
}

} // namespace

EdgeIndexResult edge_index(const HermitianOperator& h_edge, const EdgeIndexConfig& cfg) {
    const LatticePatch& patch = h_edge.patch();
    if (patch.bc_x2() != Boundary::open)
        throw ValidationError("no_edge", "edge index needs an open x2 boundary");
    if (cfg.window_half_width < 1 || cfg.edge_depth < 1 || cfg.edge_depth > patch.extent_x2())
        throw ValidationError("bad_window", "edge window must be nonempty and fit the patch");

    const int step = edge_step(patch);
    int widest = (patch.extent_x1() + 1) / 2;
    if (patch.bc_x1() == Boundary::periodic) {
        // the seam at first_x1 is a second step; keep 2 xi away from it
        const double xi = h_edge.locality() ? h_edge.locality()->xi : 1.0;
        widest = patch.extent_x1() / 2 - int(std::ceil(2.0 * xi));
        if (cfg.window_half_width > widest)
            throw ValidationError("window_too_wide",
                                  "edge window must keep a 2 xi margin from the seam");
    }

    Eigen::VectorXd pi(patch.size());
    for (Index i = 0; i < patch.size(); ++i)
        pi(i) = patch.site(i).x1 >= step ? 1.0 : 0.0;

    const Eigen::MatrixXcd w = edge_unitary(eigh(h_edge), cfg.g);
    const Eigen::MatrixXcd wpw = w * pi.asDiagonal() * w.adjoint();
    const Eigen::MatrixXcd d = Eigen::MatrixXcd(pi.cast<cplx>().asDiagonal()) - wpw;

    PairIndexOptions po;
    po.tau = cfg.tau;
    po.window = edge_window(patch, step, cfg.window_half_width, cfg.edge_depth);
    EdgeIndexResult r;
    r.report = pair_index_from_difference(d, po);
    po.window = edge_window(patch, step, std::max(widest, cfg.window_half_width), cfg.edge_depth);
    r.unwindowed = pair_index_from_difference(d, po);
    r.window_disagreement = std::abs(r.report.odd_traces[2] - r.unwindowed.odd_traces[2]);
    if (r.report.conclusive && r.window_disagreement < 0.5)
        r.index = -r.report.rounded_index;
    return r;
}

SpectralFlowReport spectral_flow(const EdgeSpectrumReport& bands, double mu, double tolerance) {
    if (!bands.gap.contains(mu))
        throw ValidationError("mu_not_in_gap", "mu not in gap");
    SpectralFlowReport r;
    const auto nk = Index(bands.momenta.size());
    for (Index i = 0; i < nk; ++i) {
        const Index j = (i + 1) % nk;
        for (Index n = 0; n < bands.band_count(); ++n) {
            const double e0 = bands.bands(i, n) - mu;
            const double e1 = bands.bands(j, n) - mu;
            if (std::abs(e0) <= tolerance) {
                r.flagged = true;
                continue;
            }
            int down = 0;
            if (e0 > 0.0 && e1 < 0.0)
                down = 1;
            else if (e0 < 0.0 && e1 > 0.0)
                down = -1;
            if (down == 0)
                continue;
            const EdgeSide a = bands.which_edge(i, n);
            const EdgeSide b = bands.which_edge(j, n);
            const EdgeSide side = a == b ? a : EdgeSide::bulk;
            // moving forward in k, a downward crossing has dE/dk < 0
            if (side == EdgeSide::bottom) {
                r.bottom += down;
                r.bottom_by_slope -= down;
            } else if (side == EdgeSide::top) {
                r.top += down;
                r.top_by_slope -= down;
            } else {
                r.bulk += down;
            }
        }
    }
    return r;
}

} // namespace edgelab
