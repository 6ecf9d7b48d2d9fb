#pragma once

#include "edgelab/edge_bands.hpp"
#include "edgelab/lattice.hpp"
#include "edgelab/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace edgelab {

/**
 Fit of max|entry| against a distance, m(d) ~ C exp(-d / xi).

 Bins below 1e-13 of the largest bin are treated as zero. With at most two
 nonzero bins the operator is called strictly local: xi = 1 and
 C = max m(d) e^d. Otherwise xi comes from a least-squares line through
 log m(d) and C = max m(d) e^(d / xi) makes the bound hold at every bin.
 */
struct DecayFitReport {
    std::vector<std::pair<double, double>> pairs;
    double fitted_C = 0.0;
    double fitted_xi = 1.0;
    double r_squared = 1.0;
    bool strictly_local = false;
    bool zero = false; ///< every bin vanished
};

DecayFitReport fit_decay(std::vector<std::pair<double, double>> pairs);

/// Max entry per graph distance.
DecayFitReport check_locality(const Eigen::MatrixXcd& m, const LatticePatch& patch);
DecayFitReport check_locality(const HermitianOperator& h);

struct BoundaryDecayReport {
    DecayFitReport fit; ///< distance = max(depth x, depth y)
    double rate = 0.0;  ///< 1 / fitted_xi, infinite for a vanishing difference
    bool bound_ok = false;
};

/// Decay of the boundary term H_restricted - H_perturbed away from the
/// lower edge; bound_ok means rate >= 1/xi_prime - 0.1.
BoundaryDecayReport boundary_decay(const HermitianOperator& h_restricted,
                                   const HermitianOperator& h_perturbed, double xi_prime);

struct CommutatorReport {
    /// distance = max over the two sites of |x1 - (step - 1/2)|, wrapping to the
    /// seam for periodic x1
    DecayFitReport decay;
    std::vector<double> singular_values;
    std::vector<double> partial_sums;
    double nuclear_norm = 0.0;
    double max_entry = 0.0;
    Index knee = 0; ///< number of singular values >= 1e-2 sigma_1
    double tail_fraction = 0.0;
    /// max of |K^dag + [W^dag, Pi]| and |W^dag Pi W - Pi + W^dag K|
    double adjoint_identity_defect = 0.0;
};

/// K = [W, Pi_1] with Pi_1 on x1 >= edge_step(patch).
CommutatorReport commutator_decay(const Eigen::MatrixXcd& w, const LatticePatch& patch);

struct MappingReport {
    Index dim = 0;
    double eigenvalue_deviation = 0.0;
    double measure_deviation = 0.0;
    int arcs = 0;
    int states = 0;
};

/**
 Two-route check of B = exp(2 pi i g(A)). Eigenvalues and eigenvectors of B
 are taken from a complex Schur factorization of B itself and compared with
 the images exp(2 pi i g(lambda_i)) of A's spectrum: multisets by greedy
 nearest matching, spectral measures on random arcs (theta_a, theta_b)
 inside (0.01, 2 pi - 0.01) for random unit states.
 */
MappingReport verify_spectral_mapping(const Eigen::MatrixXcd& a, const SwitchFunction& g,
                                      std::uint64_t seed, int arcs = 100, int states = 20);

struct UnitaryAtom {
    cplx z;
    double weight;
};

/// Atoms (z_j, |<q_j, psi>|^2) of a unitary from its Schur factorization.
std::vector<UnitaryAtom> unitary_spectral_measure(const Eigen::MatrixXcd& b,
                                                  const Eigen::VectorXcd& psi);

struct WindowedMappingReport {
    Interval shrunk_gap;      ///< Delta_eps
    double arc_lo = 0.0;      ///< the arc is {exp(i theta) : arc_lo < theta < arc_hi}
    double arc_hi = 0.0;
    double delta = 0.0;       ///< angular distance of the arc from 1
    int count_a = 0;          ///< eigenvalues of A in Delta_eps with images on the arc
    int count_b = 0;          ///< eigenvalues of B on the arc
    double max_deviation = 0.0;
    bool injective = true;    ///< W_g invertible on Delta_eps; bijection is only claimed then
    bool bijection = false;
};

WindowedMappingReport verify_windowed_mapping(const Eigen::MatrixXcd& a, const SwitchFunction& g,
                                              const Interval& gap, double epsilon);

/**
 Bloch decomposition of a clean model along a periodic x1 axis.

 Each block is read off a three-cell ring of the model, so the bands are those
 of the infinite strip with the patch's transverse geometry. Hofstadter uses a
 one-site cell; trivial_atomic, whose checkerboard has period 2, a two-site
 cell (band count 2 * extent_x2). Momenta are 2 pi n / k_points.
 */
EdgeSpectrumReport edge_spectrum(const ModelSpec& spec, const LatticePatch& patch, int k_points,
                                 const Interval& gap, int localization_length = 4);

/// Largest distance from a point of `window` (closed) to the nearest
/// edge-localized band energy (edge weight >= 0.5).
double gap_coverage(const EdgeSpectrumReport& bands, const Interval& window);

struct TransportOptions {
    double eps_fraction = 0.1;
    int localization_length = 4;
    int boundary_margin = 2;
    double boundary_tolerance = 0.01;
};

struct TransportTrace {
    std::vector<double> times;
    std::vector<double> spread;      ///< variance of X1
    std::vector<double> msd;         ///< mean square displacement from x0
    std::vector<double> edge_weight;
    std::vector<double> boundary_mass;
    Index trusted = 0;               ///< leading times with boundary_mass <= tolerance
    double alpha = 0.0;
    double alpha_r_squared = 0.0;
    double filter_norm = 0.0;
};

/**
 psi0 = f(H)|x0> / |f(H)|x0>| with f = cos^2 bump supported strictly inside
 Delta_eps, evolved by exp(-i H t) through the eigendecomposition. alpha is
 the log-log slope of msd(t) - msd(0) over the trusted times t > 0.
 */
TransportTrace transport_spread(const HermitianOperator& h, const Interval& gap, Site x0,
                                const std::vector<double>& times,
                                const TransportOptions& options = {});

void write_bands_csv(std::ostream& os, const EdgeSpectrumReport& bands);
void write_transport_csv(std::ostream& os, const TransportTrace& trace);
void write_decay_csv(std::ostream& os, const DecayFitReport& fit);

/// Shortest round-trip decimal form, used by every text emitter.
std::string format_double(double x);

} // namespace edgelab
