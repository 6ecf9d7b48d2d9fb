#pragma once

#include "edgelab/diagnostics.hpp"
#include "edgelab/indices.hpp"

#include "json.hpp"

namespace edgelab {

/// Non-finite doubles become null.
nlohmann::json number(double x);

nlohmann::json to_json(const Interval& i);
nlohmann::json to_json(const PairIndexReport& r, bool with_spectrum = false);
nlohmann::json to_json(const IndexResult& r, bool with_spectrum = false);
nlohmann::json to_json(const EdgeIndexResult& r, bool with_spectrum = false);
nlohmann::json to_json(const SpectralFlowReport& r);
nlohmann::json to_json(const DecayFitReport& r);
nlohmann::json to_json(const BoundaryDecayReport& r);
nlohmann::json to_json(const CommutatorReport& r);
nlohmann::json to_json(const MappingReport& r);
nlohmann::json to_json(const WindowedMappingReport& r);
/// Summary only; the series go to CSV.
nlohmann::json to_json(const TransportTrace& r);

} // namespace edgelab
