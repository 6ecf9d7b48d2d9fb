#include "edgelab/report_json.hpp"

#include <cmath>

namespace edgelab {

nlohmann::json number(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

nlohmann::json to_json(const Interval& i) {
    return nlohmann::json::array({number(i.lo), number(i.hi)});
}

nlohmann::json to_json(const PairIndexReport& r, bool with_spectrum) {
    nlohmann::json j{
        {"count_plus", r.count_plus},
        {"count_minus", r.count_minus},
        {"tau", r.tau},
        {"odd_traces", {{"1", number(r.odd_traces[0])},
                        {"2", number(r.odd_traces[1])},
                        {"3", number(r.odd_traces[2])}}},
        {"rounded_index", r.rounded_index},
        {"residual", number(r.residual)},
        {"monotone", r.monotone},
        {"conclusive", r.conclusive},
        {"trace_imag_defect", number(r.trace_imag_defect)},
        {"window_sites", r.window_sites},
        {"dim", r.eigenvalues_of_difference.size()},
    };
    if (with_spectrum) {
        auto& ev = j["eigenvalues_of_difference"] = nlohmann::json::array();
        for (Index i = 0; i < r.eigenvalues_of_difference.size(); ++i)
            ev.push_back(number(r.eigenvalues_of_difference(i)));
    }
    return j;
}

nlohmann::json to_json(const IndexResult& r, bool with_spectrum) {
    return {{"index", r.index ? nlohmann::json(*r.index) : nlohmann::json(nullptr)},
            {"report", to_json(r.report, with_spectrum)}};
}

nlohmann::json to_json(const EdgeIndexResult& r, bool with_spectrum) {
    return {{"index", r.index ? nlohmann::json(*r.index) : nlohmann::json(nullptr)},
            {"report", to_json(r.report, with_spectrum)},
            {"unwindowed", to_json(r.unwindowed, false)},
            {"window_disagreement", number(r.window_disagreement)}};
}

nlohmann::json to_json(const SpectralFlowReport& r) {
    return {{"bottom", r.bottom},
            {"top", r.top},
            {"bulk", r.bulk},
            {"bottom_by_slope", r.bottom_by_slope},
            {"top_by_slope", r.top_by_slope},
            {"flagged", r.flagged}};
}

nlohmann::json to_json(const DecayFitReport& r) {
    auto pairs = nlohmann::json::array();
    for (const auto& [d, m] : r.pairs)
        pairs.push_back({number(d), number(m)});
    return {{"pairs", pairs},
            {"fitted_C", number(r.fitted_C)},
            {"fitted_xi", number(r.fitted_xi)},
            {"r_squared", number(r.r_squared)},
            {"strictly_local", r.strictly_local},
            {"zero", r.zero}};
}

nlohmann::json to_json(const BoundaryDecayReport& r) {
    return {{"fit", to_json(r.fit)}, {"rate", number(r.rate)}, {"bound_ok", r.bound_ok}};
}

nlohmann::json to_json(const CommutatorReport& r) {
    return {{"decay", to_json(r.decay)},
            {"nuclear_norm", number(r.nuclear_norm)},
            {"max_entry", number(r.max_entry)},
            {"knee", r.knee},
            {"tail_fraction", number(r.tail_fraction)},
            {"adjoint_identity_defect", number(r.adjoint_identity_defect)},
            {"rank", r.singular_values.size()}};
}

nlohmann::json to_json(const MappingReport& r) {
    return {{"dim", r.dim},
            {"eigenvalue_deviation", number(r.eigenvalue_deviation)},
            {"measure_deviation", number(r.measure_deviation)},
            {"arcs", r.arcs},
            {"states", r.states}};
}

nlohmann::json to_json(const WindowedMappingReport& r) {
    return {{"shrunk_gap", to_json(r.shrunk_gap)},
            {"arc", {number(r.arc_lo), number(r.arc_hi)}},
            {"delta", number(r.delta)},
            {"count_a", r.count_a},
            {"count_b", r.count_b},
            {"max_deviation", number(r.max_deviation)},
            {"injective", r.injective},
            {"bijection", r.bijection}};
}

nlohmann::json to_json(const TransportTrace& r) {
    double min_edge = 1.0;
    for (Index i = 0; i < r.trusted; ++i)
        min_edge = std::min(min_edge, r.edge_weight[std::size_t(i)]);
    return {{"samples", r.times.size()},
            {"trusted_samples", r.trusted},
            {"trusted_until", r.trusted > 0 ? number(r.times[std::size_t(r.trusted - 1)])
                                            : nlohmann::json(nullptr)},
            {"alpha", number(r.alpha)},
            {"alpha_r_squared", number(r.alpha_r_squared)},
            {"filter_norm", number(r.filter_norm)},
            {"min_edge_weight_trusted", number(min_edge)}};
}

} // namespace edgelab
