#pragma once

#include "coastline/raster.hpp"

#include <optional>

#include "json.hpp"

namespace coastline {

struct ScoreConfig {
    double miss_penalty = 100.0;
    // When set, a point farther than this from every mask pixel counts as a
    // miss; without it any nonempty mask always yields the nearest pixel.
    std::optional<double> miss_radius;
};

struct PointScore {
    EvaluationPoint point;
    double distance = 0.0; // meaningful only when !miss
    bool miss = false;
};

struct ScoreReport {
    std::vector<PointScore> per_point;
    double mean_score = 0.0;        // (sum of hit distances + misses * penalty) / point count
    double hit_distance_mean = 0.0; // over hits only; 0 when there are none
    int hit_count = 0;
    int miss_count = 0;
};

/// Score a predicted coastline mask against evaluation points: per point the
/// Euclidean distance to the nearest set pixel (pixel centers at integer
/// coordinates), misses charged at the configured penalty.
/// Throws on an empty point list.
ScoreReport score(const CoastMask& pred, const std::vector<EvaluationPoint>& points,
                  const ScoreConfig& cfg = {});

nlohmann::json score_report_json(const ScoreReport& report, const ScoreConfig& cfg);

/// Emit a ScoreReport as JSON (pretty-printed, trailing newline).
void write_score_json(const ScoreReport& report, const ScoreConfig& cfg, const std::string& path);

} // namespace coastline
