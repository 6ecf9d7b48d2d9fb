#pragma once

#include "edgelab/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace edgelab {

enum class EdgeSide { bottom, top, bulk };

std::string to_string(EdgeSide side);

/**
 Momentum-resolved spectrum of a translation-invariant strip.

 Row k of `bands` holds the ascending eigenvalues of the Bloch block at
 momenta[k]. weight_bottom / weight_top are the l^2 mass of each state
 within `localization_length` sites of the lower / upper x2 edge.
 */
struct EdgeSpectrumReport {
    std::vector<double> momenta;
    Eigen::MatrixXd bands;
    Eigen::MatrixXd weight_bottom;
    Eigen::MatrixXd weight_top;
    Interval gap;
    int localization_length = 4;

    Index band_count() const noexcept { return bands.cols(); }
    double edge_weight(Index k, Index n) const;
    EdgeSide which_edge(Index k, Index n) const;
};

} // namespace edgelab
