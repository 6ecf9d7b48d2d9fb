#pragma once

#include "edgelab/lattice.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace edgelab {

/// Open interval (lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    double center() const noexcept { return 0.5 * (lo + hi); }
    bool contains(double x) const noexcept { return x > lo && x < hi; }
    /// [a, b] lies strictly inside.
    bool contains(double a, double b) const noexcept { return a > lo && b < hi; }
    bool operator==(const Interval&) const = default;
};

/**
 H = V diag(lambda) V^dag with ascending eigenvalues and orthonormal V.

 `scale` is max|H_ij| of the source operator; all relative tolerances
 (reconstruction, degeneracy merging) are taken against it.
 */
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;
    double scale = 0.0;

    Index dim() const noexcept { return eigenvalues.size(); }
};

/// Full Hermitian eigendecomposition (Eigen's self-adjoint solver).
/// Rejects non-Hermitian input before factorizing.
SpectralDecomposition eigh(const HermitianOperator& h);
SpectralDecomposition eigh(const Eigen::MatrixXcd& m);

using ScalarFunction = std::function<cplx(double)>;

/// V diag(f(lambda)) V^dag. Throws NumericalContractError if f is not finite
/// at some eigenvalue.
Eigen::MatrixXcd apply_function(const SpectralDecomposition& d, const ScalarFunction& f);

/// Characteristic function of (-inf, mu] applied to the spectrum.
Eigen::MatrixXcd fermi_projection(const SpectralDecomposition& d, double mu);

/**
 Smooth switch g with g = 1 left of the window, 0 right of it.

 g(x) = S((mu + w - x) / (2w)) with the quintic smoothstep
 S(t) = 6t^5 - 15t^4 + 10t^3 clamped to [0, 1]. The window
 [mu - w, mu + w] lies strictly inside the gap.
 */
class SwitchFunction {
public:
    SwitchFunction(double mu, Interval gap, double half_width);

    double mu() const noexcept { return mu_; }
    const Interval& gap() const noexcept { return gap_; }
    double half_width() const noexcept { return w_; }
    Interval window() const noexcept { return {mu_ - w_, mu_ + w_}; }

    double operator()(double x) const noexcept;
    double derivative(double x) const noexcept;

private:
    double mu_;
    Interval gap_;
    double w_;
};

/// Default half-width: 0.45 * min(mu - gap.lo, gap.hi - mu).
double default_half_width(double mu, const Interval& gap, double fraction = 0.45);

SwitchFunction make_switch(double mu, const Interval& gap, double half_width);
SwitchFunction make_switch(double mu, const Interval& gap);

/// exp(2 pi i g(x)).
cplx w_g(double x, const SwitchFunction& g);

struct SpectralAtom {
    double lambda;
    double weight;
};

struct DiscreteSpectralMeasure {
    std::vector<SpectralAtom> atoms;

    double total() const;
    /// Sum of weights of atoms with lambda in the open interval.
    double mass(const Interval& set) const;
};

/// Atoms (lambda_i, |<v_i, psi>|^2), merged over eigenvalues closer than
/// 1e-9 * scale.
DiscreteSpectralMeasure spectral_measure(const SpectralDecomposition& d,
                                         const Eigen::VectorXcd& psi);

/// Maximal gaps between consecutive eigenvalues of width >= min_width.
std::vector<Interval> gap_detect(const SpectralDecomposition& d, double min_width);

} // namespace edgelab
