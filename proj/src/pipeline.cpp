#include "coastline/pipeline.hpp"

#include "coastline/config.hpp"
#include "coastline/ensemble.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <utility>

namespace coastline {

namespace {

using nlohmann::json;

const json* find(const json& parent, const std::string& key) {
    if (!parent.is_object())
        return nullptr;
    auto it = parent.find(key);
    return it == parent.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw Error("config: " + where + " must be a number");
    return v.get<double>();
}

double num_or(const json& t, const std::string& key, double def, const std::string& where) {
    const json* v = find(t, key);
    return v ? as_number(*v, where + "." + key) : def;
}

int int_or(const json& t, const std::string& key, int def, const std::string& where) {
    const json* v = find(t, key);
    if (!v)
        return def;
    if (!v->is_number_integer())
        throw Error("config: " + where + "." + key + " must be an integer");
    return v->get<int>();
}

bool bool_or(const json& t, const std::string& key, bool def, const std::string& where) {
    const json* v = find(t, key);
    if (!v)
        return def;
    if (!v->is_boolean())
        throw Error("config: " + where + "." + key + " must be a boolean");
    return v->get<bool>();
}

std::string str_or(const json& t, const std::string& key, const std::string& def,
                   const std::string& where) {
    const json* v = find(t, key);
    if (!v)
        return def;
    if (!v->is_string())
        throw Error("config: " + where + "." + key + " must be a string");
    return v->get<std::string>();
}

InputMode parse_input_mode(const std::string& s, const std::string& where) {
    if (s == "linear")
        return InputMode::linear;
    if (s == "log")
        return InputMode::log;
    throw Error("config: " + where + " must be 'linear' or 'log', got '" + s + "'");
}

Head parse_head(const std::string& s, const std::string& where) {
    if (s == "softmax3" || s == "softmax")
        return Head::softmax3;
    if (s == "sigmoid1" || s == "sigmoid")
        return Head::sigmoid1;
    throw Error("config: " + where + " must be 'softmax3' or 'sigmoid1', got '" + s + "'");
}

OrientationMode parse_orientation(const std::string& s) {
    if (s == "auto")
        return OrientationMode::automatic;
    if (s == "landscape")
        return OrientationMode::landscape;
    if (s == "portrait")
        return OrientationMode::portrait;
    throw Error("config: orientation must be 'auto', 'landscape' or 'portrait', got '" + s + "'");
}

PredictorSpec parse_predictor(const json& p, size_t index) {
    const std::string where = "predictors[" + std::to_string(index) + "]";
    PredictorSpec spec;
    spec.id = str_or(p, "id", "predictor" + std::to_string(index), where);
    if (spec.id.empty())
        throw Error("config: " + where + ".id is empty");
    for (char c : spec.id)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
            throw Error("config: " + where + ".id '" + spec.id +
                        "' may only contain letters, digits, '_' and '-'");
    spec.input_mode = parse_input_mode(str_or(p, "input", "log", where), where + ".input");
    spec.head = parse_head(str_or(p, "head", "softmax3", where), where + ".head");
    spec.ensemble_weight = num_or(p, "weight", 1.0, where);

    std::string backend = str_or(p, "backend", "", where);
    if (backend == "constant") {
        spec.backend = ConstantBackend{num_or(p, "value", 0.5, where)};
    } else if (backend == "oracle") {
        OracleBackend ob;
        // The truth class map is loaded by run_pipeline; only parameters here.
        ob.cfg.sharpness = num_or(p, "sharpness", 1.0, where);
        ob.cfg.noise_sigma = num_or(p, "noise_sigma", 0.0, where);
        ob.cfg.seed = static_cast<uint64_t>(num_or(p, "oracle_seed", 0.0, where));
        spec.backend = std::move(ob);
    } else if (backend == "file") {
        FileBackend fb{str_or(p, "pattern", "", where)};
        if (fb.pattern.empty())
            throw Error("config: " + where + " file backend needs a 'pattern'");
        spec.backend = std::move(fb);
    } else if (backend == "external") {
        ExternalBackend eb{str_or(p, "command", "", where)};
        if (eb.command.empty())
            throw Error("config: " + where + " external backend needs a 'command'");
        spec.backend = std::move(eb);
    } else {
        throw Error("config: " + where +
                    ".backend must be 'oracle', 'constant', 'file' or 'external', got '" +
                    backend + "'");
    }
    return spec;
}

template <typename F>
auto run_stage(const std::string& name, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(name + ": " + e.what());
    }
}

} // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
    json root = parse_toml_file(path);
    PipelineConfig cfg;

    const json* paths = find(root, "paths");
    if (!paths)
        throw Error("config: missing [paths] table");
    cfg.image_path = str_or(*paths, "image", "", "paths");
    if (cfg.image_path.empty())
        throw Error("config: paths.image is required");
    cfg.truth_classes_path = str_or(*paths, "truth_classes", "", "paths");
    cfg.points_path = str_or(*paths, "points", "", "paths");
    cfg.out_dir = str_or(*paths, "out_dir", "out", "paths");

    if (const json* pre = find(root, "preprocess")) {
        cfg.preprocess.noise_coefficient =
            num_or(*pre, "noise_coefficient", cfg.preprocess.noise_coefficient, "preprocess");
        cfg.preprocess.log_floor = num_or(*pre, "log_floor", cfg.preprocess.log_floor, "preprocess");
        if (const json* range = find(*pre, "log_range")) {
            if (!range->is_array() || range->size() != 2)
                throw Error("config: preprocess.log_range must be [lo, hi]");
            cfg.preprocess.log_range_lo = as_number((*range)[0], "preprocess.log_range[0]");
            cfg.preprocess.log_range_hi = as_number((*range)[1], "preprocess.log_range[1]");
        }
        cfg.preprocess.validate();
    }

    if (const json* tiling = find(root, "tiling")) {
        cfg.tiling.tile_side = int_or(*tiling, "tile_side", cfg.tiling.tile_side, "tiling");
        cfg.tiling.stride = int_or(*tiling, "stride", cfg.tiling.stride, "tiling");
        if (const json* scales = find(*tiling, "scales")) {
            if (!scales->is_array() || scales->empty())
                throw Error("config: tiling.scales must be a nonempty array");
            cfg.tiling.scales.clear();
            for (size_t i = 0; i < scales->size(); ++i)
                cfg.tiling.scales.push_back(
                    as_number((*scales)[i], "tiling.scales[" + std::to_string(i) + "]"));
        }
        cfg.tiling.smoothing_sigma =
            num_or(*tiling, "smoothing_sigma", cfg.tiling.smoothing_sigma, "tiling");
        std::string agg = str_or(*tiling, "aggregation", "coverage_mean", "tiling");
        if (agg == "sum")
            cfg.tiling.aggregation = Aggregation::sum;
        else if (agg == "coverage_mean")
            cfg.tiling.aggregation = Aggregation::coverage_mean;
        else
            throw Error("config: tiling.aggregation must be 'sum' or 'coverage_mean', got '" +
                        agg + "'");
        cfg.tiling.validate();
    }

    if (const json* ens = find(root, "ensemble"))
        cfg.interpolate_gaps = bool_or(*ens, "interpolate_gaps", true, "ensemble");

    if (const json* sc = find(root, "scoring")) {
        cfg.scoring.miss_penalty = num_or(*sc, "miss_penalty", 100.0, "scoring");
        if (find(*sc, "miss_radius"))
            cfg.scoring.miss_radius = num_or(*sc, "miss_radius", 0.0, "scoring");
    }

    cfg.orientation = parse_orientation(str_or(root, "orientation", "auto", "config"));
    cfg.threads = int_or(root, "threads", 1, "config");
    if (cfg.threads < 1)
        throw Error("config: threads must be >= 1");

    const json* preds = find(root, "predictors");
    if (!preds || !preds->is_array() || preds->empty())
        throw Error("config: at least one [[predictors]] table is required");
    for (size_t i = 0; i < preds->size(); ++i)
        cfg.predictors.push_back(parse_predictor((*preds)[i], i));
    for (size_t i = 0; i < cfg.predictors.size(); ++i)
        for (size_t j = i + 1; j < cfg.predictors.size(); ++j)
            if (cfg.predictors[i].id == cfg.predictors[j].id)
                throw Error("config: duplicate predictor id '" + cfg.predictors[i].id + "'");

    return cfg;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    namespace fs = std::filesystem;
    if (cfg.predictors.empty())
        throw Error("pipeline: no predictors configured");
    cfg.tiling.validate();
    cfg.preprocess.validate();

    RasterImage image = run_stage("load-image", [&] { return read_pgm(cfg.image_path); });

    std::vector<EvaluationPoint> points;
    bool have_points = !cfg.points_path.empty();
    if (have_points)
        points = run_stage("load-points", [&] { return read_points_csv(cfg.points_path); });

    bool needs_truth = false;
    for (const PredictorSpec& spec : cfg.predictors)
        if (std::holds_alternative<OracleBackend>(spec.backend))
            needs_truth = true;
    ClassMap truth;
    if (needs_truth) {
        if (cfg.truth_classes_path.empty())
            throw Error("pipeline: an oracle backend requires paths.truth_classes");
        truth = run_stage("load-truth", [&] { return read_class_pgm(cfg.truth_classes_path); });
    }

    run_stage("output", [&] {
        fs::create_directories(cfg.out_dir);
        return 0;
    });

    Orientation orient = resolve_orientation(cfg.orientation, image.width, image.height);
    int extent = orient == Orientation::landscape ? image.height : image.width;

    // Normalizations shared across predictors, computed on first use.
    FloatRaster linear_map, log_map;
    auto input_for = [&](InputMode mode) -> const FloatRaster& {
        if (mode == InputMode::linear) {
            if (linear_map.width == 0)
                linear_map = normalize_linear(image);
            return linear_map;
        }
        if (log_map.width == 0) {
            PreprocessConfig pc = cfg.preprocess;
            pc.mode = PreprocessConfig::Mode::log;
            log_map = normalize_log(image, pc);
        }
        return log_map;
    };

    PipelineResult result;
    std::vector<CoastlinePath> paths;
    std::vector<double> weights;
    for (const PredictorSpec& spec : cfg.predictors) {
        PredictorSpec instance = spec;
        if (auto* oracle = std::get_if<OracleBackend>(&instance.backend))
            if (oracle->cfg.truth.width == 0)
                oracle->cfg.truth = truth;

        Predictor predictor(std::move(instance));
        const std::string& id = spec.id;
        FloatRaster prob = run_stage("infer[" + id + "]", [&] {
            return tiled_predict(predictor, input_for(spec.input_mode), cfg.tiling, cfg.threads);
        });
        CoastMask mask = run_stage("extract[" + id + "]", [&] {
            return spec.head == Head::softmax3 ? extract_softmax(prob)
                                               : extract_sigmoid(prob, cfg.orientation);
        });
        PredictorOutcome outcome;
        outcome.id = id;
        outcome.weight = spec.ensemble_weight;
        outcome.path = mask_to_path(mask, cfg.orientation);
        run_stage("output", [&] {
            write_coastline_csv(outcome.path, cfg.out_dir + "/" + id + ".csv");
            return 0;
        });
        if (have_points) {
            outcome.score = run_stage("evaluate[" + id + "]", [&] {
                return score(fill_gaps(outcome.path, extent, cfg.interpolate_gaps), points,
                             cfg.scoring);
            });
            outcome.scored = true;
        }
        paths.push_back(outcome.path);
        weights.push_back(spec.ensemble_weight);
        result.predictors.push_back(std::move(outcome));
    }

    result.fused = run_stage("ensemble", [&] { return ensemble_paths(paths, weights); });
    result.mask = run_stage("postprocess", [&] {
        return fill_gaps(result.fused, extent, cfg.interpolate_gaps);
    });
    run_stage("output", [&] {
        CoastlinePath dense = cfg.interpolate_gaps ? interpolate_gaps(result.fused) : result.fused;
        write_coastline_csv(dense, cfg.out_dir + "/coastline.csv");
        write_mask_pgm(result.mask, cfg.out_dir + "/coastline.pgm");
        return 0;
    });

    if (have_points) {
        result.score = run_stage("evaluate", [&] { return score(result.mask, points, cfg.scoring); });
        result.scored = true;
        run_stage("output", [&] {
            nlohmann::json j = score_report_json(result.score, cfg.scoring);
            nlohmann::json per = nlohmann::json::array();
            for (const PredictorOutcome& oc : result.predictors) {
                nlohmann::json e;
                e["id"] = oc.id;
                e["weight"] = oc.weight;
                if (oc.scored) {
                    e["mean_score"] = oc.score.mean_score;
                    e["hit_count"] = oc.score.hit_count;
                    e["miss_count"] = oc.score.miss_count;
                }
                per.push_back(std::move(e));
            }
            j["predictors"] = std::move(per);
            std::ofstream out(cfg.out_dir + "/score.json", std::ios::binary);
            if (!out)
                throw IoError("cannot open " + cfg.out_dir + "/score.json for writing");
            out << j.dump(2) << '\n';
            return 0;
        });
    }
    return result;
}

} // namespace coastline
