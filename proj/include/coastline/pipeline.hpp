#pragma once

#include "coastline/evaluate.hpp"
#include "coastline/extract.hpp"
#include "coastline/predict.hpp"
#include "coastline/preprocess.hpp"

#include <string>
#include <vector>

namespace coastline {

/// Inference pipeline description, normally loaded from a TOML config.
/// For every predictor the image is normalized per its input mode, swept by
/// the floating window, and reduced to a coastline path; the paths are then
/// ensembled, gap-filled and scored.
struct PipelineConfig {
    std::string image_path;
    std::string truth_classes_path; // required by oracle backends
    std::string points_path;        // optional; scoring is skipped without it
    std::string out_dir = "out";

    PreprocessConfig preprocess; // log-transform parameters
    TilingConfig tiling;
    std::vector<PredictorSpec> predictors;
    bool interpolate_gaps = true;
    ScoreConfig scoring;
    OrientationMode orientation = OrientationMode::automatic;
    int threads = 1;
};

PipelineConfig load_pipeline_config(const std::string& path);

struct PredictorOutcome {
    std::string id;
    double weight = 0.0;
    CoastlinePath path;
    ScoreReport score; // meaningful when scored
    bool scored = false;
};

struct PipelineResult {
    CoastlinePath fused;
    CoastMask mask;
    ScoreReport score; // meaningful when scored
    bool scored = false;
    std::vector<PredictorOutcome> predictors;
};

/// Run the pipeline, writing per-predictor coastline CSVs, the fused
/// coastline CSV and mask PGM, and score.json into cfg.out_dir. Errors are
/// tagged with the failing stage.
PipelineResult run_pipeline(const PipelineConfig& cfg);

} // namespace coastline
