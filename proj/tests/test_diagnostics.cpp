#include "doctest.h"

#include "edgelab/diagnostics.hpp"
#include "edgelab/errors.hpp"
#include "edgelab/indices.hpp"

#include <numbers>

using namespace edgelab;

namespace {

ModelSpec hof(std::int64_t p, std::int64_t q, double disorder = 0.0) {
    ModelSpec s;
    s.flux = Flux(p, q);
    s.disorder_strength = disorder;
    s.rng_seed = 3;
    return s;
}

ModelSpec trivial() {
    ModelSpec s;
    s.kind = ModelKind::trivial_atomic;
    s.onsite_gap = 2.0;
    return s;
}

Eigen::MatrixXcd random_hermitian(Index n, std::uint64_t seed) {
    UniformStream rng(seed);
    Eigen::MatrixXcd x(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            x(i, j) = cplx(rng.symmetric(1.0), rng.symmetric(1.0));
    return 0.25 * (x + x.adjoint());
}

Interval lowest_gap(const ModelSpec& s, int l1, int l2) {
    const auto torus = build_patch(l1, l2, Boundary::periodic, Boundary::periodic);
    return gap_detect(eigh(build_model(torus, s)), 0.5).at(0);
}

} // namespace

TEST_CASE("locality of model operators") {
    const auto patch = build_patch(8, 6, Boundary::periodic, Boundary::open);
    for (double w : {0.0, 0.3}) {
        const auto fit = check_locality(hofstadter(patch, hof(1, 3, w)));
        CHECK(fit.strictly_local);
        CHECK(fit.fitted_xi <= 1.01);
        for (const auto& [d, m] : fit.pairs)
            if (d > 1)
                CHECK(m == 0.0);
    }
    const auto id = check_locality(Eigen::MatrixXcd::Identity(patch.size(), patch.size()), patch);
    for (const auto& [d, m] : id.pairs)
        CHECK((d == 0 ? m == 1.0 : m == 0.0));
}

TEST_CASE("smooth function of a gapped operator decays exponentially") {
    const ModelSpec s = hof(1, 3);
    // the period-3 magnetic cell makes the binned maxima scatter; the fit
    // settles above 0.95 from about 30 x 30 on
    const auto torus = build_patch(30, 30, Boundary::periodic, Boundary::periodic);
    const auto d = eigh(build_model(torus, s));
    const Interval gap = gap_detect(d, 0.5).at(0);
    const SwitchFunction g = make_switch(gap.center(), gap);
    const auto fit = check_locality(apply_function(d, [&](double x) { return cplx(g(x)); }), torus);
    CHECK(!fit.strictly_local);
    CHECK(fit.r_squared >= 0.95);
    CHECK(fit.fitted_xi > 0.0);
    for (const auto& [dist, m] : fit.pairs)
        CHECK(m <= fit.fitted_C * std::exp(-dist / fit.fitted_xi) * (1 + 1e-9));
}

TEST_CASE("boundary term decay") {
    const auto cyl = build_patch(12, 10, Boundary::periodic, Boundary::open);
    const auto h = hofstadter(cyl, hof(1, 3));
    const auto zero = boundary_decay(h, h, 1.0);
    CHECK(zero.fit.zero);
    CHECK(zero.bound_ok);
    const auto pert = boundary_decay(h, edge_perturbation(h, 0.3, 1.0, 17), 1.0);
    CHECK(pert.bound_ok);
    CHECK(std::abs(pert.rate - 1.0) <= 0.15);
    const auto other = build_patch(12, 9, Boundary::periodic, Boundary::open);
    CHECK_THROWS_AS(boundary_decay(h, hofstadter(other, hof(1, 3)), 1.0), ValidationError);
}

TEST_CASE("commutator with the half-line projection") {
    const auto patch = build_patch(12, 8, Boundary::open, Boundary::open);
    const auto t = build_model(patch, trivial());
    const auto tw = edge_unitary(eigh(t), make_switch(0.0, {-1.0, 1.0}, 0.9));
    const auto tr = commutator_decay(tw, patch);
    CHECK(tr.max_entry <= 1e-14);
    CHECK(tr.nuclear_norm <= 1e-12);

    const ModelSpec s = hof(1, 3);
    const Interval gap = lowest_gap(s, 24, 18);
    const auto edge = build_patch(24, 16, Boundary::open, Boundary::open);
    const auto cfg = default_edge_config(edge, gap.center(), gap);
    const auto r = commutator_decay(edge_unitary(eigh(build_model(edge, s)), cfg.g), edge);
    CHECK(r.adjoint_identity_defect <= 1e-10);
    CHECK(r.nuclear_norm > 0.5);
    CHECK(r.singular_values.front() <= 1.0 + 1e-10);
    CHECK(r.partial_sums.back() == doctest::Approx(r.nuclear_norm));
    CHECK(r.knee > 0);
}

TEST_CASE("spectral mapping on a diagonal operator") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(5, 5);
    a.diagonal() << -2.0, -0.3, 0.0, 0.2, 1.5;
    const SwitchFunction g = make_switch(0.0, {-1.0, 1.0}, 0.5);
    const auto r = verify_spectral_mapping(a, g, 1);
    CHECK(r.eigenvalue_deviation <= 1e-14);
    CHECK(r.measure_deviation <= 1e-14);

    // an eigenvector pushes forward to one atom at exp(2 pi i g(lambda))
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(5);
    e(1) = 1.0;
    const Eigen::MatrixXcd b = edge_unitary(eigh(a), g);
    int atoms = 0;
    for (const auto& atom : unitary_spectral_measure(b, e))
        if (atom.weight > 1e-20) {
            ++atoms;
            CHECK(std::abs(atom.z - w_g(-0.3, g)) <= 1e-14);
            CHECK(atom.weight == doctest::Approx(1.0));
        }
    CHECK(atoms == 1);
}

TEST_CASE("spectral mapping on random matrices") {
    const SwitchFunction g = make_switch(-0.1, {-1.2, 1.0}, 1.05);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto r = verify_spectral_mapping(random_hermitian(50, seed), g, seed);
        CHECK(r.eigenvalue_deviation <= 1e-10);
        CHECK(r.measure_deviation <= 1e-10);
        const auto w = verify_windowed_mapping(random_hermitian(50, seed), g, {-1.2, 1.0}, 0.1);
        CHECK(w.injective);
        CHECK(w.bijection);
        CHECK(w.count_a > 0);
    }
}

TEST_CASE("windowed mapping") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(4, 4);
    a.diagonal() << -2.0, -1.5, 1.5, 2.0;
    const Interval gap{-1.0, 1.0};
    const SwitchFunction g = make_switch(0.0, gap, 0.9);
    const auto r = verify_windowed_mapping(a, g, gap, 0.1);
    CHECK(r.count_a == 0);
    CHECK(r.count_b == 0);
    CHECK(r.bijection);
    CHECK_THROWS_AS(verify_windowed_mapping(a, g, gap, 1.0), ValidationError);

    // near the limit the shrunk gap is the window interior
    const auto lim = verify_windowed_mapping(a, make_switch(0.0, gap, 0.05), gap, 0.94);
    CHECK(lim.shrunk_gap.lo == doctest::Approx(-0.06));
    CHECK(lim.arc_lo == doctest::Approx(0.0));
    CHECK(lim.arc_hi == doctest::Approx(2.0 * std::numbers::pi));
    CHECK_FALSE(lim.injective);

    // a narrow switch is flat over part of the shrunk gap
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(3, 3);
    c.diagonal() << -0.7, 0.0, 0.7;
    const auto narrow = verify_windowed_mapping(c, make_switch(0.0, gap, 0.3), gap, 0.1);
    CHECK_FALSE(narrow.injective);
    CHECK(verify_windowed_mapping(c, make_switch(0.0, gap, 0.9), gap, 0.1).injective);

    const ModelSpec s = hof(1, 3);
    const Interval bulk = lowest_gap(s, 24, 18);
    const auto edge = build_patch(24, 16, Boundary::open, Boundary::open);
    const auto cfg = default_edge_config(edge, bulk.center(), bulk);
    const auto e = verify_windowed_mapping(build_model(edge, s).matrix(), cfg.g, bulk,
                                           0.1 * bulk.width());
    CHECK(e.count_a > 0);
    CHECK(e.injective);
    CHECK(e.bijection);
}

TEST_CASE("edge bands") {
    const auto cyl = build_patch(2, 16, Boundary::periodic, Boundary::open);
    const auto t = edge_spectrum(trivial(), cyl, 8, {-1.0, 1.0});
    for (Index k = 0; k < t.bands.rows(); ++k)
        for (Index n = 0; n < t.band_count(); ++n)
            CHECK(std::abs(std::abs(t.bands(k, n)) - 1.0) < 1e-14);
    CHECK(t.band_count() == 32);

    const ModelSpec s = hof(1, 3);
    const Interval gap = lowest_gap(s, 24, 18);
    const auto b = edge_spectrum(s, cyl, 96, gap);
    CHECK(b.band_count() == 16);
    CHECK(b.momenta.size() == 96);
    CHECK(b.weight_bottom.maxCoeff() <= 1.0 + 1e-12);
    CHECK(b.weight_top.minCoeff() >= 0.0);
    const double eps = 0.1 * gap.width();
    const Interval shrunk{gap.lo + eps, gap.hi - eps};
    const double c96 = gap_coverage(b, shrunk);
    const double c192 = gap_coverage(edge_spectrum(s, cyl, 192, gap), shrunk);
    CHECK(c96 <= gap.width() / 20);
    CHECK(c192 < c96);

    // a cylinder built from the real-space operator has the same spectrum
    const auto ring = build_patch(12, 16, Boundary::periodic, Boundary::open);
    const auto d = eigh(build_model(ring, s));
    const auto coarse = edge_spectrum(s, cyl, 12, gap);
    std::vector<double> bloch(coarse.bands.data(), coarse.bands.data() + coarse.bands.size());
    std::sort(bloch.begin(), bloch.end());
    for (Index i = 0; i < d.dim(); ++i)
        CHECK(std::abs(bloch[std::size_t(i)] - d.eigenvalues(i)) <= 1e-10);

    CHECK_THROWS_AS(edge_spectrum(hof(1, 3, 0.1), cyl, 8, gap), ValidationError);
    CHECK_THROWS_AS(edge_spectrum(s, build_patch(4, 4, Boundary::open, Boundary::open), 8, gap),
                    ValidationError);
}

TEST_CASE("transport") {
    const auto cyl = build_patch(12, 8, Boundary::periodic, Boundary::open);
    CHECK_THROWS_WITH_AS(transport_spread(build_model(cyl, trivial()), {-1.0, 1.0}, {6, 1}, {0.0, 1.0}),
                         "no gap weight at x0", ValidationError);

    const ModelSpec s = hof(1, 3);
    const Interval gap = lowest_gap(s, 48, 18);
    const auto big = build_patch(48, 16, Boundary::periodic, Boundary::open);
    std::vector<double> times;
    for (int i = 0; i <= 48; ++i)
        times.push_back(0.25 * i);
    const auto tr = transport_spread(build_model(big, s), gap, {24, 1}, times);
    CHECK(tr.trusted >= 4);
    CHECK(tr.alpha >= 1.8);
    CHECK(tr.alpha <= 2.0);
    for (Index i = 0; i < tr.trusted; ++i) {
        CHECK(tr.spread[std::size_t(i)] >= 0.0);
        CHECK(tr.edge_weight[std::size_t(i)] >= 0.9);
        CHECK(tr.boundary_mass[std::size_t(i)] <= 0.01);
    }
}

TEST_CASE("csv layout") {
    DecayFitReport f = fit_decay({{0, 1.0}, {1, 0.5}});
    std::ostringstream os;
    write_decay_csv(os, f);
    CHECK(os.str() == "d,max_entry\n0,1\n1,0.5\n");
    CHECK(format_double(0.1) == "0.1");
}
