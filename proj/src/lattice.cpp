#include "edgelab/lattice.hpp"

#include "edgelab/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <vector>

namespace edgelab {

std::string to_string(Boundary bc) {
    return bc == Boundary::periodic ? "periodic" : "open";
}

Boundary boundary_from_string(const std::string& s) {
    if (s == "periodic")
        return Boundary::periodic;
    if (s == "open")
        return Boundary::open;
    throw ValidationError("bad_boundary", "unknown boundary condition '" + s + "'");
}

LatticePatch::LatticePatch(int extent_x1, int extent_x2, Boundary bc_x1, Boundary bc_x2,
                           int first_x1, int first_x2)
    : extent_x1_(extent_x1), extent_x2_(extent_x2), bc_x1_(bc_x1), bc_x2_(bc_x2),
      first_x1_(first_x1), first_x2_(first_x2) {
    if (extent_x1 < 1 || extent_x2 < 1)
        throw ValidationError("degenerate_patch", "patch extents must be positive");
}

std::array<double, 2> LatticePatch::origin() const noexcept {
    return {first_x1_ - 1 + extent_x1_ / 2 + 0.5, first_x2_ - 1 + extent_x2_ / 2 + 0.5};
}

Index LatticePatch::index(Site s) const {
    if (!contains(s))
        throw ValidationError("site_outside_patch", "site is not part of the patch");
    return Index(s.x2 - first_x2_) * extent_x1_ + (s.x1 - first_x1_);
}

Site LatticePatch::site(Index i) const {
    return {first_x1_ + int(i % extent_x1_), first_x2_ + int(i / extent_x1_)};
}

bool LatticePatch::contains(Site s) const noexcept {
    return s.x1 >= first_x1_ && s.x1 < first_x1_ + extent_x1_ && s.x2 >= first_x2_ &&
           s.x2 < first_x2_ + extent_x2_;
}

int LatticePatch::graph_distance(Index i, Index j) const {
    const Site a = site(i);
    const Site b = site(j);
    int d1 = std::abs(a.x1 - b.x1);
    int d2 = std::abs(a.x2 - b.x2);
    if (bc_x1_ == Boundary::periodic)
        d1 = std::min(d1, extent_x1_ - d1);
    if (bc_x2_ == Boundary::periodic)
        d2 = std::min(d2, extent_x2_ - d2);
    return d1 + d2;
}

LatticePatch build_patch(int extent_x1, int extent_x2, Boundary bc_x1, Boundary bc_x2) {
    if (extent_x1 < 2 || extent_x2 < 2)
        throw ValidationError("degenerate_patch", "patch extents must be at least 2");
    return LatticePatch(extent_x1, extent_x2, bc_x1, bc_x2);
}

Flux::Flux(std::int64_t p_, std::int64_t q_) : p(p_), q(q_) {
    if (q <= 0)
        throw ValidationError("flux_denominator", "flux denominator must be positive");
    if (p < 0 || p >= q)
        throw ValidationError("flux_range", "flux must satisfy 0 <= p/q < 1");
    if (std::gcd(p, q) != 1)
        throw ValidationError("flux_not_reduced", "flux p/q must be in lowest terms");
}

std::string Flux::str() const {
    return std::to_string(p) + "/" + std::to_string(q);
}

Flux Flux::parse(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos)
            return Flux(std::stoll(s), 1);
        return Flux(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
        throw ValidationError("bad_flux", "cannot parse flux '" + s + "'");
    } catch (const std::out_of_range&) {
        throw ValidationError("bad_flux", "cannot parse flux '" + s + "'");
    }
}

std::string to_string(ModelKind kind) {
    return kind == ModelKind::hofstadter ? "hofstadter" : "trivial_atomic";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "hofstadter")
        return ModelKind::hofstadter;
    if (s == "trivial_atomic")
        return ModelKind::trivial_atomic;
    throw ValidationError("bad_model_kind", "unknown model kind '" + s + "'");
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
    if (m.size() == 0)
        return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd matrix, LatticePatch patch,
                                     std::optional<ModelSpec> spec,
                                     std::optional<LocalityCertificate> locality)
    : matrix_(std::move(matrix)), patch_(std::move(patch)), spec_(std::move(spec)),
      locality_(locality) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() != patch_.size())
        throw ValidationError("dimension_mismatch", "operator does not match patch size");
    const double scale = max_abs();
    if (hermiticity_defect(matrix_) > 1e-12 * scale)
        throw NumericalContractError("not_hermitian", "operator violates Hermiticity");
}

double HermitianOperator::max_abs() const {
    return matrix_.size() == 0 ? 0.0 : matrix_.cwiseAbs().maxCoeff();
}

namespace {

void add_hopping(Eigen::MatrixXcd& m, Index to, Index from, cplx amplitude) {
    m(to, from) += amplitude;
    m(from, to) += std::conj(amplitude);
}

} // namespace

HermitianOperator hofstadter(const LatticePatch& patch, const ModelSpec& spec) {
    if (spec.kind != ModelKind::hofstadter)
        throw ValidationError("wrong_model_kind", "hofstadter() needs kind = hofstadter");
    const Flux flux(spec.flux.p, spec.flux.q);
    if (patch.bc_x2() == Boundary::periodic && patch.extent_x2() % flux.q != 0)
        throw ValidationError("flux_incommensurate",
                              "periodic extent_x2 must be a multiple of the flux denominator");
    if (spec.disorder_strength < 0.0)
        throw ValidationError("negative_disorder", "disorder strength must be nonnegative");

    const Index n = patch.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    const int l1 = patch.extent_x1();
    const int l2 = patch.extent_x2();
    const double phi = flux.value();

    for (Index i = 0; i < n; ++i) {
        const Site s = patch.site(i);
        const bool right = s.x1 + 1 < patch.first_x1() + l1;
        if (right || (patch.bc_x1() == Boundary::periodic && l1 >= 2)) {
            const Site t{right ? s.x1 + 1 : patch.first_x1(), s.x2};
            const double theta = -2.0 * std::numbers::pi * phi * s.x2;
            add_hopping(m, patch.index(t), i, -std::polar(1.0, theta));
        }
        const bool up = s.x2 + 1 < patch.first_x2() + l2;
        if (up || (patch.bc_x2() == Boundary::periodic && l2 >= 2)) {
            const Site t{s.x1, up ? s.x2 + 1 : patch.first_x2()};
            add_hopping(m, patch.index(t), i, cplx(-1.0, 0.0));
        }
    }

    if (spec.disorder_strength > 0.0) {
        UniformStream rng(spec.rng_seed);
        for (Index i = 0; i < n; ++i)
            m(i, i) += rng.symmetric(0.5 * spec.disorder_strength);
    }
    return HermitianOperator(std::move(m), patch, spec,
                             LocalityCertificate{std::max(1.0, 0.5 * spec.disorder_strength), 1.0});
}

HermitianOperator trivial_atomic(const LatticePatch& patch, const ModelSpec& spec) {
    if (spec.kind != ModelKind::trivial_atomic)
        throw ValidationError("wrong_model_kind", "trivial_atomic() needs kind = trivial_atomic");
    if (!(spec.onsite_gap > 0.0))
        throw ValidationError("nonpositive_gap", "onsite_gap must be positive");
    const Index n = patch.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        const Site s = patch.site(i);
        m(i, i) = ((s.x1 + s.x2) % 2 == 0 ? -0.5 : 0.5) * spec.onsite_gap;
    }
    return HermitianOperator(std::move(m), patch, spec,
                             LocalityCertificate{0.5 * spec.onsite_gap, 1.0});
}

HermitianOperator build_model(const LatticePatch& patch, const ModelSpec& spec) {
    switch (spec.kind) {
    case ModelKind::hofstadter:
        return hofstadter(patch, spec);
    case ModelKind::trivial_atomic:
        return trivial_atomic(patch, spec);
    }
    throw ValidationError("bad_model_kind", "unknown model kind");
}

HermitianOperator restrict(const HermitianOperator& h, const SitePredicate& keep) {
    const LatticePatch& patch = h.patch();
    std::vector<Index> kept;
    int lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;
    for (Index i = 0; i < patch.size(); ++i) {
        const Site s = patch.site(i);
        if (!keep(s))
            continue;
        if (kept.empty()) {
            lo1 = hi1 = s.x1;
            lo2 = hi2 = s.x2;
        }
        lo1 = std::min(lo1, s.x1);
        hi1 = std::max(hi1, s.x1);
        lo2 = std::min(lo2, s.x2);
        hi2 = std::max(hi2, s.x2);
        kept.push_back(i);
    }
    if (kept.empty())
        throw ValidationError("empty_selection", "restriction keeps no sites");
    const int e1 = hi1 - lo1 + 1;
    const int e2 = hi2 - lo2 + 1;
    if (Index(kept.size()) != Index(e1) * e2)
        throw ValidationError("non_rectangular_selection", "restriction must keep a rectangle");

    const Boundary bc1 = e1 == patch.extent_x1() ? patch.bc_x1() : Boundary::open;
    const Boundary bc2 = e2 == patch.extent_x2() ? patch.bc_x2() : Boundary::open;
    LatticePatch sub(e1, e2, bc1, bc2, lo1, lo2);

    // kept is in increasing linear order, which is also the sub-patch order
    const auto count = Index(kept.size());
    Eigen::MatrixXcd m(count, count);
    for (Index a = 0; a < count; ++a)
        for (Index b = 0; b < count; ++b)
            m(a, b) = h.matrix()(kept[a], kept[b]);

    const bool unchanged = sub == patch;
    return HermitianOperator(std::move(m), sub, unchanged ? h.spec() : std::nullopt,
                             h.locality());
}

HermitianOperator edge_perturbation(const HermitianOperator& h, double amplitude,
                                    double xi_prime, std::uint64_t rng_seed, double xi) {
    const LatticePatch& patch = h.patch();
    if (patch.bc_x2() != Boundary::open)
        throw ValidationError("no_edge", "edge perturbation needs an open x2 boundary");
    if (amplitude < 0.0 || !(xi_prime > 0.0) || !(xi > 0.0))
        throw ValidationError("bad_perturbation", "amplitude >= 0 and xi, xi' > 0 required");
    if (amplitude == 0.0)
        return h;

    const Index n = patch.size();
    Eigen::MatrixXcd raw(n, n);
    UniformStream rng(rng_seed);
    const double r = 1.0 / std::numbers::sqrt2;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            raw(i, j) = cplx(rng.symmetric(r), rng.symmetric(r));

    Eigen::MatrixXcd delta(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const int depth = std::max(patch.depth(patch.site(i)), patch.depth(patch.site(j)));
            const double bound =
                amplitude * std::exp(-patch.graph_distance(i, j) / xi - depth / xi_prime);
            delta(i, j) = 0.5 * (raw(i, j) + std::conj(raw(j, i))) * bound;
        }
    }
    LocalityCertificate cert{amplitude, xi};
    if (h.locality()) {
        cert.C += h.locality()->C;
        cert.xi = std::max(cert.xi, h.locality()->xi);
    }
    return HermitianOperator(h.matrix() + delta, patch, std::nullopt, cert);
}

} // namespace edgelab
