#include "edgelab/spectral.hpp"

#include "edgelab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace edgelab {

SpectralDecomposition eigh(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols())
        throw ValidationError("not_square", "eigh needs a square matrix");
    const double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
    if (hermiticity_defect(m) > 1e-12 * scale)
        throw NumericalContractError("not_hermitian", "eigh input is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw NumericalContractError("eigh_failed", "Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors(), scale};
}

SpectralDecomposition eigh(const HermitianOperator& h) {
    return eigh(h.matrix());
}

Eigen::MatrixXcd apply_function(const SpectralDecomposition& d, const ScalarFunction& f) {
    Eigen::VectorXcd values(d.dim());
    for (Index i = 0; i < d.dim(); ++i) {
        values(i) = f(d.eigenvalues(i));
        if (!std::isfinite(values(i).real()) || !std::isfinite(values(i).imag()))
            throw NumericalContractError("function_not_finite",
                                         "function is undefined at an eigenvalue");
    }
    return d.eigenvectors * values.asDiagonal() * d.eigenvectors.adjoint();
}

Eigen::MatrixXcd fermi_projection(const SpectralDecomposition& d, double mu) {
    Index filled = 0;
    while (filled < d.dim() && d.eigenvalues(filled) <= mu)
        ++filled;
    const auto v = d.eigenvectors.leftCols(filled);
    return v * v.adjoint();
}

SwitchFunction::SwitchFunction(double mu, Interval gap, double half_width)
    : mu_(mu), gap_(gap), w_(half_width) {
    if (!(half_width > 0.0))
        throw ValidationError("bad_switch", "switch half-width must be positive");
    if (!(gap.lo < gap.hi) || !gap.contains(mu))
        throw ValidationError("mu_not_in_gap", "mu must lie inside the gap");
    if (!gap.contains(mu - half_width, mu + half_width))
        throw ValidationError("window_exceeds_gap", "switch window must lie inside the gap");
}

double SwitchFunction::operator()(double x) const noexcept {
    const double t = std::clamp((mu_ + w_ - x) / (2.0 * w_), 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double SwitchFunction::derivative(double x) const noexcept {
    const double t = (mu_ + w_ - x) / (2.0 * w_);
    if (t <= 0.0 || t >= 1.0)
        return 0.0;
    // dS/dt = 30 t^2 (1 - t)^2, dt/dx = -1/(2w)
    return -30.0 * t * t * (1.0 - t) * (1.0 - t) / (2.0 * w_);
}

double default_half_width(double mu, const Interval& gap, double fraction) {
    return fraction * std::min(mu - gap.lo, gap.hi - mu);
}

SwitchFunction make_switch(double mu, const Interval& gap, double half_width) {
    return SwitchFunction(mu, gap, half_width);
}

SwitchFunction make_switch(double mu, const Interval& gap) {
    if (!gap.contains(mu))
        throw ValidationError("mu_not_in_gap", "mu must lie inside the gap");
    return SwitchFunction(mu, gap, default_half_width(mu, gap));
}

cplx w_g(double x, const SwitchFunction& g) {
    return std::polar(1.0, 2.0 * std::numbers::pi * g(x));
}

double DiscreteSpectralMeasure::total() const {
    double s = 0.0;
    for (const auto& a : atoms)
        s += a.weight;
    return s;
}

double DiscreteSpectralMeasure::mass(const Interval& set) const {
    double s = 0.0;
    for (const auto& a : atoms)
        if (set.contains(a.lambda))
            s += a.weight;
    return s;
}

DiscreteSpectralMeasure spectral_measure(const SpectralDecomposition& d,
                                         const Eigen::VectorXcd& psi) {
    if (psi.size() != d.dim())
        throw ValidationError("dimension_mismatch", "state does not match operator dimension");
    const Eigen::VectorXcd overlaps = d.eigenvectors.adjoint() * psi;
    const double merge = 1e-9 * d.scale;

    DiscreteSpectralMeasure m;
    for (Index i = 0; i < d.dim(); ++i) {
        const double lambda = d.eigenvalues(i);
        const double weight = std::norm(overlaps(i));
        if (!m.atoms.empty() && lambda - m.atoms.back().lambda <= merge)
            m.atoms.back().weight += weight;
        else
            m.atoms.push_back({lambda, weight});
    }
    return m;
}

std::vector<Interval> gap_detect(const SpectralDecomposition& d, double min_width) {
    if (!(min_width > 0.0))
        throw ValidationError("bad_min_width", "gap min_width must be positive");
    std::vector<Interval> gaps;
    for (Index i = 0; i + 1 < d.dim(); ++i) {
        const double lo = d.eigenvalues(i);
        const double hi = d.eigenvalues(i + 1);
        if (hi - lo >= min_width)
            gaps.push_back({lo, hi});
    }
    return gaps;
}

} // namespace edgelab
