#pragma once

#include "edgelab/edge_bands.hpp"
#include "edgelab/lattice.hpp"
#include "edgelab/spectral.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>

namespace edgelab {

/**
 Estimates of Ind(P, U) = dim ker(D - 1) - dim ker(D + 1), D = P - U P U^dag.

 On a finite patch every odd trace of D vanishes, so both estimators are
 localized by a 0/1 site window: odd_traces[n-1] = sum over window sites x
 of (D^(2n+1))_xx, and an eigenvector of D counts towards count_plus /
 count_minus only if its eigenvalue is within tau of +1 / -1 and more than
 half of its mass lies in the window.
 */
struct PairIndexReport {
    Eigen::VectorXd eigenvalues_of_difference;
    int count_plus = 0;
    int count_minus = 0;
    double tau = 0.2;
    std::array<double, 3> odd_traces{}; ///< n = 1, 2, 3
    int rounded_index = 0;
    double residual = 0.0;
    bool monotone = true;   ///< |odd_trace(n) - rounded| nonincreasing in n
    bool conclusive = false;
    double trace_imag_defect = 0.0;
    Index window_sites = 0;
};

struct PairIndexOptions {
    double tau = 0.2;
    /// 0/1 weight per site; empty means the whole space.
    Eigen::VectorXd window;
};

PairIndexReport pair_index(const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& u,
                           const PairIndexOptions& options = {});
/// Same, with U given by its diagonal.
PairIndexReport pair_index(const Eigen::MatrixXcd& p, const Eigen::VectorXcd& u_diagonal,
                           const PairIndexOptions& options = {});

/// Diagonal of U = exp(i arg(x - origin)). Periodic patches are refused
/// unless `flat_positions` is set.
Eigen::VectorXcd arg_position_unitary(const LatticePatch& patch, bool flat_positions = false);

/// An index value, or nothing when the report is inconclusive.
struct IndexResult {
    std::optional<int> index;
    PairIndexReport report;
};

struct BulkIndexOptions {
    double tau = 0.2;
    /// Chebyshev radius of the trace window around the origin;
    /// default min(extent_x1, extent_x2) / 4.
    std::optional<double> window_radius;
};

/**
 Ind_B = -Ind(P_F, U) with P_F = chi(H <= mu) and U from
 arg_position_unitary. H lives on an open patch; `bulk_gap` is a gap of the
 corresponding bulk (torus) operator and must contain mu.
 */
IndexResult bulk_index(const HermitianOperator& h, double mu, const Interval& bulk_gap,
                       const BulkIndexOptions& options = {});

/// x1 >= step_x1 is the half-line projection of the edge index.
int edge_step(const LatticePatch& patch);

struct EdgeIndexConfig {
    /// Trace window |x1 - (step - 1/2)| <= window_half_width.
    int window_half_width = 0;
    /// Rows with depth < edge_depth belong to the lower edge.
    int edge_depth = 0;
    SwitchFunction g;
    double tau = 0.2;
};

/// window_half_width = extent_x1/2 (open x1) or extent_x1/4 (periodic x1),
/// edge_depth = extent_x2/2, g with half-width switch_fraction * distance
/// from mu to the nearer gap edge.
EdgeIndexConfig default_edge_config(const LatticePatch& patch, double mu, const Interval& gap,
                                    double switch_fraction = 0.9);

struct EdgeIndexResult {
    std::optional<int> index;
    PairIndexReport report;
    /// Same estimator over the widest admissible x1 range.
    PairIndexReport unwindowed;
    double window_disagreement = 0.0;
};

/**
 Ind_E = Ind(W, Pi_1) = -Ind(Pi_1, W) with W = exp(2 pi i g(H^)) and Pi_1
 the projection on x1 >= edge_step. Both indices are taken in the
 (unitary, projection) order, which is the order for which Ind_B = Ind_E.
 The trace is restricted to the lower edge (depth < edge_depth) and to the
 x1 window; a disagreement >= 0.5 with the unwindowed estimate marks the
 result inconclusive.
 */
EdgeIndexResult edge_index(const HermitianOperator& h_edge, const EdgeIndexConfig& cfg);

/// exp(2 pi i g(H)) through the spectral calculus.
Eigen::MatrixXcd edge_unitary(const SpectralDecomposition& d, const SwitchFunction& g);

struct SpectralFlowReport {
    /// Downward minus upward crossings of mu by bands on the given side.
    int bottom = 0;
    int top = 0;
    int bulk = 0;
    /// Same counts weighted by sign(dE/dk) instead.
    int bottom_by_slope = 0;
    int top_by_slope = 0;
    bool flagged = false; ///< a band touched mu within tolerance
};

/**
 Signed crossings of mu along the periodic momentum grid. A crossing between
 k_i and k_(i+1) is attributed to the edge on which both endpoint states
 carry more than half of their weight.
 */
SpectralFlowReport spectral_flow(const EdgeSpectrumReport& bands, double mu,
                                 double tolerance = 1e-9);

} // namespace edgelab
