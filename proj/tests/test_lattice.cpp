#include "doctest.h"
#include "oracles.hpp"

#include "edgelab/errors.hpp"
#include "edgelab/lattice.hpp"
#include "edgelab/spectral.hpp"

#include <numeric>

using namespace edgelab;

namespace {

ModelSpec hof(std::int64_t p, std::int64_t q, double disorder = 0.0, std::uint64_t seed = 0) {
    ModelSpec s;
    s.kind = ModelKind::hofstadter;
    s.flux = Flux(p, q);
    s.disorder_strength = disorder;
    s.rng_seed = seed;
    return s;
}

std::vector<double> spectrum(const HermitianOperator& h) {
    const auto d = eigh(h);
    return {d.eigenvalues.data(), d.eigenvalues.data() + d.dim()};
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("patch geometry") {
    CHECK(build_patch(4, 4, Boundary::periodic, Boundary::periodic).size() == 16);
    CHECK(build_patch(8, 6, Boundary::periodic, Boundary::open).size() == 48);
    const auto p = build_patch(2, 2, Boundary::open, Boundary::open);
    CHECK(p.size() == 4);
    CHECK(p.origin()[0] == 1.5);
    CHECK(p.origin()[1] == 1.5);
    CHECK_THROWS_AS(build_patch(1, 4, Boundary::open, Boundary::open), ValidationError);

    const auto q = build_patch(5, 3, Boundary::periodic, Boundary::open);
    for (Index i = 0; i < q.size(); ++i)
        CHECK(q.index(q.site(i)) == i);
    CHECK(q.graph_distance(q.index({1, 1}), q.index({5, 1})) == 1);
    CHECK(q.graph_distance(q.index({1, 1}), q.index({1, 3})) == 2);
}

TEST_CASE("flux validation") {
    CHECK_THROWS_AS(Flux(1, 0), ValidationError);
    CHECK_THROWS_AS(Flux(2, 4), ValidationError);
    CHECK_THROWS_AS(Flux(3, 3), ValidationError);
    CHECK(Flux::parse("2/3") == Flux(2, 3));
    CHECK(Flux::parse("0") == Flux(0, 1));
    CHECK_THROWS_AS(Flux::parse("a/b"), ValidationError);
}

TEST_CASE("free lattice dispersion") {
    const auto torus = build_patch(6, 6, Boundary::periodic, Boundary::periodic);
    CHECK(max_diff(spectrum(hofstadter(torus, hof(0, 1))), oracle::free_dispersion(6, 6)) <= 1e-10);
}

TEST_CASE("Harper Bloch spectra for q up to 6") {
    for (int q = 1; q <= 6; ++q)
        for (int p = 0; p < q; ++p) {
            if (std::gcd(p, q) != 1)
                continue;
            CAPTURE(p);
            CAPTURE(q);
            const int l2 = 2 * q;
            const auto torus = build_patch(4, l2, Boundary::periodic, Boundary::periodic);
            CHECK(max_diff(spectrum(hofstadter(torus, hof(p, q))),
                           oracle::harper_torus_spectrum(p, q, 4, l2)) <= 1e-10);
        }
}

TEST_CASE("flux one third splits into three bands") {
    const auto torus = build_patch(12, 12, Boundary::periodic, Boundary::periodic);
    const auto gaps = gap_detect(eigh(hofstadter(torus, hof(1, 3))), 0.5);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0].lo == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(gaps[1].hi == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("plaquette phase") {
    const auto patch = build_patch(4, 4, Boundary::open, Boundary::open);
    const auto h = hofstadter(patch, hof(1, 5)).matrix();
    const auto i = [&](int a, int b) { return patch.index({a, b}); };
    // <to|H|from> around x -> x+e1 -> x+e1+e2 -> x+e2 -> x
    const cplx loop = h(i(2, 2), i(1, 2)) * h(i(2, 3), i(2, 2)) * h(i(1, 3), i(2, 3)) *
                      h(i(1, 2), i(1, 3));
    CHECK(std::abs(loop - std::polar(1.0, 2.0 * std::numbers::pi / 5.0)) < 1e-14);
}

TEST_CASE("commensurability on a periodic x2 axis") {
    const auto bad = build_patch(6, 4, Boundary::periodic, Boundary::periodic);
    CHECK_THROWS_AS(hofstadter(bad, hof(1, 3)), ValidationError);
    const auto open = build_patch(6, 4, Boundary::periodic, Boundary::open);
    CHECK_NOTHROW(hofstadter(open, hof(1, 3)));
}

TEST_CASE("seeded disorder") {
    const auto patch = build_patch(6, 6, Boundary::open, Boundary::open);
    const auto a = hofstadter(patch, hof(1, 3, 0.1, 42));
    const auto b = hofstadter(patch, hof(1, 3, 0.1, 42));
    const auto c = hofstadter(patch, hof(1, 3, 0.1, 43));
    CHECK(a.matrix() == b.matrix());
    CHECK(a.matrix() != c.matrix());
    for (Index k = 0; k < a.dim(); ++k)
        CHECK(std::abs(a.matrix()(k, k).real()) <= 0.05);
    CHECK(hermiticity_defect(a.matrix()) <= 1e-12 * a.max_abs());
}

TEST_CASE("trivial atomic model") {
    ModelSpec s;
    s.kind = ModelKind::trivial_atomic;
    s.onsite_gap = 2.0;
    const auto h = trivial_atomic(build_patch(5, 4, Boundary::open, Boundary::open), s);
    for (double e : spectrum(h))
        CHECK(std::abs(std::abs(e) - 1.0) < 1e-15);
    CHECK(h.matrix().isDiagonal());
    s.onsite_gap = 0.0;
    CHECK_THROWS_AS(trivial_atomic(build_patch(2, 2, Boundary::open, Boundary::open), s),
                    ValidationError);
}

TEST_CASE("Dirichlet restriction") {
    const auto torus = build_patch(6, 6, Boundary::periodic, Boundary::periodic);
    const auto h = hofstadter(torus, hof(1, 3));
    const auto keep = [](Site s) { return s.x2 >= 3; };
    const auto r = restrict(h, keep);
    CHECK(r.patch().extent_x2() == 4);
    CHECK(r.patch().bc_x1() == Boundary::periodic);
    CHECK(r.patch().bc_x2() == Boundary::open);
    CHECK(r.patch().first_x2() == 3);
    CHECK(!r.spec().has_value());
    for (Index a = 0; a < r.dim(); ++a)
        for (Index b = 0; b < r.dim(); ++b)
            CHECK(r.matrix()(a, b) ==
                  h.matrix()(torus.index(r.patch().site(a)), torus.index(r.patch().site(b))));
    const auto rr = restrict(r, keep);
    CHECK(rr.patch() == r.patch());
    CHECK(rr.matrix() == r.matrix());
    CHECK_THROWS_AS(restrict(h, [](Site) { return false; }), ValidationError);
    CHECK_THROWS_AS(restrict(h, [](Site s) { return s.x1 == 1 || s.x1 == 3; }), ValidationError);
}

TEST_CASE("edge perturbation") {
    const auto cyl = build_patch(8, 8, Boundary::periodic, Boundary::open);
    const auto h = hofstadter(cyl, hof(1, 3));
    CHECK(edge_perturbation(h, 0.0, 1.0, 5).matrix() == h.matrix());

    const auto p = edge_perturbation(h, 0.3, 1.0, 5);
    CHECK(hermiticity_defect(p.matrix()) <= 1e-12 * p.max_abs());
    const Eigen::MatrixXcd delta = p.matrix() - h.matrix();
    double at_five = 0.0;
    for (Index i = 0; i < cyl.size(); ++i)
        for (Index j = 0; j < cyl.size(); ++j) {
            const int depth = std::max(cyl.depth(cyl.site(i)), cyl.depth(cyl.site(j)));
            const double bound = 0.3 * std::exp(-cyl.graph_distance(i, j) - depth);
            CHECK(std::abs(delta(i, j)) <= bound * (1 + 1e-12));
            if (depth == 5)
                at_five = std::max(at_five, std::abs(delta(i, j)));
        }
    CHECK(at_five <= 0.3 * std::exp(-5.0));

    const auto torus = build_patch(6, 6, Boundary::periodic, Boundary::periodic);
    CHECK_THROWS_AS(edge_perturbation(hofstadter(torus, hof(1, 3)), 0.3, 1.0, 5), ValidationError);
}
