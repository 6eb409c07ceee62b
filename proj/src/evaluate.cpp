#include "coastline/evaluate.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include "json.hpp"

namespace coastline {

ScoreReport score(const CoastMask& pred, const std::vector<EvaluationPoint>& points,
                  const ScoreConfig& cfg) {
    if (points.empty())
        throw Error("score: empty evaluation point list");
    if (cfg.miss_penalty < 0.0)
        throw Error("score: miss penalty must be non-negative");

    std::vector<std::pair<int, int>> pixels;
    for (int y = 0; y < pred.height; ++y)
        for (int x = 0; x < pred.width; ++x)
            if (pred.at(x, y))
                pixels.emplace_back(x, y);

    ScoreReport report;
    report.per_point.reserve(points.size());
    double hit_sum = 0.0;
    for (const EvaluationPoint& pt : points) {
        PointScore ps;
        ps.point = pt;
        if (pixels.empty()) {
            ps.miss = true;
        } else {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [px, py] : pixels) {
                double dx = px - pt.x, dy = py - pt.y;
                best = std::min(best, dx * dx + dy * dy);
            }
            ps.distance = std::sqrt(best);
            if (cfg.miss_radius && ps.distance > *cfg.miss_radius)
                ps.miss = true;
        }
        if (ps.miss) {
            ++report.miss_count;
        } else {
            ++report.hit_count;
            hit_sum += ps.distance;
        }
        report.per_point.push_back(ps);
    }
    report.mean_score =
        (hit_sum + report.miss_count * cfg.miss_penalty) / static_cast<double>(points.size());
    report.hit_distance_mean = report.hit_count > 0 ? hit_sum / report.hit_count : 0.0;
    return report;
}

nlohmann::json score_report_json(const ScoreReport& report, const ScoreConfig& cfg) {
    nlohmann::json j;
    j["mean_score"] = report.mean_score;
    j["hit_count"] = report.hit_count;
    j["miss_count"] = report.miss_count;
    j["hit_distance_mean"] = report.hit_distance_mean;
    j["miss_penalty"] = cfg.miss_penalty;
    if (cfg.miss_radius)
        j["miss_radius"] = *cfg.miss_radius;
    nlohmann::json pts = nlohmann::json::array();
    for (const PointScore& ps : report.per_point) {
        nlohmann::json p;
        p["x"] = ps.point.x;
        p["y"] = ps.point.y;
        if (ps.miss)
            p["miss"] = true;
        else
            p["distance"] = ps.distance;
        pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    return j;
}

void write_score_json(const ScoreReport& report, const ScoreConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path + " for writing");
    out << score_report_json(report, cfg).dump(2) << '\n';
}

} // namespace coastline
