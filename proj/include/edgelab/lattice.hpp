#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>

namespace edgelab {

using cplx = std::complex<double>;
using Index = Eigen::Index;

enum class Boundary { periodic, open };

std::string to_string(Boundary bc);
Boundary boundary_from_string(const std::string& s);

/// Absolute lattice coordinates of a site.
struct Site {
    int x1;
    int x2;
    bool operator==(const Site&) const = default;
};

/**
 Finite rectangular set of sites with per-axis boundary conditions.

 Sites carry absolute coordinates x1 in [first_x1, first_x1 + extent_x1 - 1]
 (likewise x2). A freshly built patch starts at (1, 1). The linear index is
 row-major along x1: index = (x2 - first_x2) * extent_x1 + (x1 - first_x1).
 */
class LatticePatch {
public:
    LatticePatch(int extent_x1, int extent_x2, Boundary bc_x1, Boundary bc_x2,
                 int first_x1 = 1, int first_x2 = 1);

    int extent_x1() const noexcept { return extent_x1_; }
    int extent_x2() const noexcept { return extent_x2_; }
    Boundary bc_x1() const noexcept { return bc_x1_; }
    Boundary bc_x2() const noexcept { return bc_x2_; }
    int first_x1() const noexcept { return first_x1_; }
    int first_x2() const noexcept { return first_x2_; }
    Index size() const noexcept { return Index(extent_x1_) * extent_x2_; }

    /// Center of the patch; both components are half-integers.
    std::array<double, 2> origin() const noexcept;

    Index index(Site s) const;
    Site site(Index i) const;
    bool contains(Site s) const noexcept;

    /// Distance from the lower x2 boundary (0 on the first row).
    int depth(Site s) const noexcept { return s.x2 - first_x2_; }

    /// Manhattan distance, wrapping along periodic axes.
    int graph_distance(Index i, Index j) const;

    bool operator==(const LatticePatch&) const = default;

private:
    int extent_x1_;
    int extent_x2_;
    Boundary bc_x1_;
    Boundary bc_x2_;
    int first_x1_;
    int first_x2_;
};

LatticePatch build_patch(int extent_x1, int extent_x2, Boundary bc_x1, Boundary bc_x2);

/// Rational flux p/q per plaquette, 0 <= p/q < 1, gcd(p, q) = 1.
struct Flux {
    std::int64_t p = 0;
    std::int64_t q = 1;

    Flux() = default;
    Flux(std::int64_t p, std::int64_t q);

    double value() const noexcept { return double(p) / double(q); }
    std::string str() const;
    static Flux parse(const std::string& s);
    bool operator==(const Flux&) const = default;
};

enum class ModelKind { hofstadter, trivial_atomic };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::hofstadter;
    Flux flux;
    double disorder_strength = 0.0;
    std::uint64_t rng_seed = 0;
    double onsite_gap = 0.0;

    bool operator==(const ModelSpec&) const = default;
};

/// |H_xy| <= C exp(-d(x, y) / xi).
struct LocalityCertificate {
    double C = 0.0;
    double xi = 0.0;
};

/**
 Dense Hermitian matrix over a patch.

 The constructor enforces max|M - M^dag| <= 1e-12 max|M| and throws
 NumericalContractError otherwise. `spec` is empty for derived operators
 (restrictions, perturbations, functions of other operators).
 */
class HermitianOperator {
public:
    HermitianOperator(Eigen::MatrixXcd matrix, LatticePatch patch,
                      std::optional<ModelSpec> spec = std::nullopt,
                      std::optional<LocalityCertificate> locality = std::nullopt);

    const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    const LatticePatch& patch() const noexcept { return patch_; }
    const std::optional<ModelSpec>& spec() const noexcept { return spec_; }
    const std::optional<LocalityCertificate>& locality() const noexcept { return locality_; }
    Index dim() const noexcept { return matrix_.rows(); }
    double max_abs() const;

private:
    Eigen::MatrixXcd matrix_;
    LatticePatch patch_;
    std::optional<ModelSpec> spec_;
    std::optional<LocalityCertificate> locality_;
};

/// Largest entry of |M - M^dag|.
double hermiticity_defect(const Eigen::MatrixXcd& m);

/// Uniform doubles in [0, 1) from a seeded mt19937_64. The engine output is
/// fixed by the standard; the conversion to double is done here rather than
/// by std::uniform_real_distribution so the stream is portable.
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
    double next() { return double(engine_() >> 11) * 0x1.0p-53; }
    double symmetric(double half_width) { return half_width * (2.0 * next() - 1.0); }

private:
    std::mt19937_64 engine_;
};

/**
 Square-lattice Hofstadter model, unit nearest-neighbour hopping.

 <x + e1|H|x> = -exp(-2 pi i flux x2), <x + e2|H|x> = -1, so the phase
 around every plaquette is exp(2 pi i flux) and the model is invariant
 under x1 translations. On-site disorder is i.i.d. uniform in
 [-W/2, W/2], drawn in site-index order from UniformStream(rng_seed).
 A periodic x2 axis requires extent_x2 to be a multiple of q.
 */
HermitianOperator hofstadter(const LatticePatch& patch, const ModelSpec& spec);

/// Diagonal checkerboard -gap/2 (x1 + x2 even), +gap/2 (odd). No hopping.
HermitianOperator trivial_atomic(const LatticePatch& patch, const ModelSpec& spec);

/// Dispatch on spec.kind.
HermitianOperator build_model(const LatticePatch& patch, const ModelSpec& spec);

using SitePredicate = std::function<bool(Site)>;

/**
 Dirichlet truncation: the principal submatrix on the kept sites.

 The kept set must be a nonempty rectangle. Absolute coordinates are
 preserved, so restricting twice with the same predicate is a no-op. An
 axis stays periodic only if it is kept in full.
 */
HermitianOperator restrict(const HermitianOperator& h, const SitePredicate& keep);

/**
 Adds a random Hermitian boundary term localized at the lower x2 edge:
 |Delta_xy| <= amplitude exp(-d(x,y)/xi - max(depth x, depth y)/xi_prime).
 Requires bc_x2 = open.
 */
HermitianOperator edge_perturbation(const HermitianOperator& h, double amplitude,
                                    double xi_prime, std::uint64_t rng_seed,
                                    double xi = 1.0);

} // namespace edgelab
