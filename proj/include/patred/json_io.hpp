#pragma once

#include <json.hpp>

#include "patred/core_data.hpp"
#include "patred/metrics.hpp"
#include "patred/mid.hpp"
#include "patred/raster.hpp"
#include "patred/redundancy.hpp"
#include "patred/search.hpp"

namespace patred {

using json = nlohmann::json;

// Flat object: {"kind", "n", "copies", "shift", "eta", "sd", "seed"}. Missing
// keys keep their defaults; the result is validated.
json to_json(const RedundancyConfig& cfg);
RedundancyConfig redundancy_from_json(const json& j);

json to_json(const DistanceValue& d);
json to_json(const MatchResult& m);
json to_json(const MidPoint& p);

/// Dense integer matrix, row 0 (bottom, lowest y) first.
json to_json(const RasterImage& img);

json to_json(const Pattern& p);
Pattern pattern_from_json(const json& j);

/// Request parameters (not the series values) for reproducibility records.
json to_json(const SearchRequest& req);

}  // namespace patred
