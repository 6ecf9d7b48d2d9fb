#include "doctest.h"
#include "oracles.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/spectral.hpp"

using namespace edgelab;

namespace {

Eigen::MatrixXcd random_hermitian(Index n, std::uint64_t seed) {
    UniformStream rng(seed);
    Eigen::MatrixXcd x(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            x(i, j) = cplx(rng.symmetric(1.0), rng.symmetric(1.0));
    return 0.5 * (x + x.adjoint());
}

double max_abs(const Eigen::MatrixXcd& m) {
    return m.cwiseAbs().maxCoeff();
}

ModelSpec hof13() {
    ModelSpec s;
    s.flux = Flux(1, 3);
    return s;
}

} // namespace

TEST_CASE("eigh contract") {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
    d.diagonal() << 3.0, -1.0, 2.0, 0.5;
    const auto dd = eigh(d);
    CHECK(dd.eigenvalues(0) == -1.0);
    CHECK(dd.eigenvalues(1) == 0.5);
    CHECK(dd.eigenvalues(3) == 3.0);

    const Eigen::MatrixXcd h = random_hermitian(100, 1);
    const auto r = eigh(h);
    const Eigen::MatrixXcd back =
        r.eigenvectors * r.eigenvalues.cast<cplx>().asDiagonal() * r.eigenvectors.adjoint();
    CHECK(max_abs(back - h) <= 1e-10 * max_abs(h));
    CHECK(max_abs(r.eigenvectors.adjoint() * r.eigenvectors - Eigen::MatrixXcd::Identity(100, 100)) <=
          1e-12);
    for (Index i = 1; i < r.dim(); ++i)
        CHECK(r.eigenvalues(i - 1) <= r.eigenvalues(i));

    Eigen::MatrixXcd bad = h;
    bad(0, 1) += 1e-3;
    CHECK_THROWS_AS(eigh(bad), NumericalContractError);
}

TEST_CASE("free torus through eigh") {
    const auto torus = build_patch(6, 6, Boundary::periodic, Boundary::periodic);
    ModelSpec s;
    const auto d = eigh(hofstadter(torus, s));
    const auto ref = oracle::free_dispersion(6, 6);
    for (Index i = 0; i < d.dim(); ++i)
        CHECK(std::abs(d.eigenvalues(i) - ref[std::size_t(i)]) <= 1e-10);
}

TEST_CASE("functional calculus") {
    const Eigen::MatrixXcd h = random_hermitian(50, 2);
    const auto d = eigh(h);
    CHECK(max_abs(apply_function(d, [](double x) { return cplx(x); }) - h) <= 1e-10 * max_abs(h));

    const auto f = [](double x) { return cplx(std::sin(x), x * x); };
    const auto g = [](double x) { return cplx(std::exp(-x), 1.0); };
    const auto fg = [&](double x) { return f(x) * g(x); };
    CHECK(max_abs(apply_function(d, fg) - apply_function(d, f) * apply_function(d, g)) <= 1e-10);

    const Eigen::MatrixXcd p = fermi_projection(d, 0.0);
    CHECK(max_abs(p * p - p) <= 1e-10);
    CHECK_THROWS_AS(apply_function(d, [](double) { return cplx(NAN); }), NumericalContractError);
}

TEST_CASE("switch function") {
    const Interval gap{-2.0, -0.7};
    const SwitchFunction g = make_switch(-1.35, gap, 0.5);
    CHECK(g(-1.35) == doctest::Approx(0.5));
    CHECK(g(-1.85) == 1.0);
    CHECK(g(-0.85) == 0.0);
    CHECK(g(-5.0) == 1.0);
    CHECK(g.derivative(-1.85) == 0.0);
    CHECK(g.derivative(-0.85) == 0.0);
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = g(-2.5 + 2.0 * i / 1000.0);
        CHECK(v <= prev);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    CHECK_THROWS_AS(make_switch(-1.35, gap, 0.7), ValidationError);
    CHECK_THROWS_AS(make_switch(0.0, gap, 0.1), ValidationError);
    CHECK(make_switch(-1.35, gap).half_width() == doctest::Approx(0.45 * 0.65));

    CHECK(std::abs(w_g(-3.0, g) - 1.0) < 1e-15);
    CHECK(std::abs(w_g(3.0, g) - 1.0) < 1e-15);
    CHECK(std::abs(w_g(-1.35, g) + 1.0) < 1e-15);
}

TEST_CASE("edge unitary and Fermi projection from the switch") {
    const auto torus = build_patch(12, 12, Boundary::periodic, Boundary::periodic);
    const auto d = eigh(hofstadter(torus, hof13()));
    const auto gaps = gap_detect(d, 0.5);
    REQUIRE(gaps.size() == 2);
    const double mu = gaps[0].center();
    const SwitchFunction g = make_switch(mu, gaps[0]);
    const Eigen::MatrixXcd w = apply_function(d, [&](double x) { return w_g(x, g); });
    CHECK(max_abs(w.adjoint() * w - Eigen::MatrixXcd::Identity(d.dim(), d.dim())) <= 1e-10);
    const Eigen::MatrixXcd gh = apply_function(d, [&](double x) { return cplx(g(x)); });
    CHECK(max_abs(gh - fermi_projection(d, mu)) <= 1e-10);
    // on a gapped torus no eigenvalue sits in the window, so W = 1
    CHECK(max_abs(w - Eigen::MatrixXcd::Identity(d.dim(), d.dim())) <= 1e-10);
}

TEST_CASE("spectral measure") {
    const Eigen::MatrixXcd h = random_hermitian(30, 3);
    const auto d = eigh(h);
    const Eigen::VectorXcd v = d.eigenvectors.col(7) * 2.0;
    const auto single = spectral_measure(d, v);
    int nonzero = 0;
    for (const auto& a : single.atoms)
        if (a.weight > 1e-20) {
            ++nonzero;
            CHECK(a.lambda == d.eigenvalues(7));
            CHECK(a.weight == doctest::Approx(4.0));
        }
    CHECK(nonzero == 1);

    UniformStream rng(4);
    Eigen::VectorXcd psi(30);
    for (Index i = 0; i < 30; ++i)
        psi(i) = cplx(rng.symmetric(1.0), rng.symmetric(1.0));
    const auto m = spectral_measure(d, psi);
    CHECK(std::abs(m.total() - psi.squaredNorm()) <= 1e-12 * psi.squaredNorm());
    double moment = 0.0;
    for (const auto& a : m.atoms)
        moment += a.weight * a.lambda * a.lambda;
    const cplx direct = psi.dot(h * h * psi);
    CHECK(std::abs(direct - moment) <= 1e-10 * psi.squaredNorm() * max_abs(h) * max_abs(h) * 30);
    CHECK_THROWS_AS(spectral_measure(d, Eigen::VectorXcd::Zero(3)), ValidationError);

    Eigen::MatrixXcd deg = Eigen::MatrixXcd::Zero(3, 3);
    deg.diagonal() << 1.0, 1.0, 2.0;
    CHECK(spectral_measure(eigh(deg), Eigen::VectorXcd::Ones(3)).atoms.size() == 2);
}

TEST_CASE("gap detection") {
    ModelSpec t;
    t.kind = ModelKind::trivial_atomic;
    t.onsite_gap = 2.0;
    const auto trivial = eigh(trivial_atomic(build_patch(4, 4, Boundary::open, Boundary::open), t));
    const auto gaps = gap_detect(trivial, 0.2);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].contains(-0.9, 0.9));

    const auto big = build_patch(24, 24, Boundary::periodic, Boundary::periodic);
    ModelSpec free;
    CHECK(gap_detect(eigh(hofstadter(big, free)), 0.5).empty());
    CHECK_THROWS_AS(gap_detect(trivial, 0.0), ValidationError);
}
