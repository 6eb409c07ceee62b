#include "CLI11.hpp"
#include "json.hpp"

#include "coastline/augment.hpp"
#include "coastline/ensemble.hpp"
#include "coastline/evaluate.hpp"
#include "coastline/extract.hpp"
#include "coastline/pipeline.hpp"
#include "coastline/predict.hpp"
#include "coastline/preprocess.hpp"
#include "coastline/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace {

using namespace coastline;

InputMode parse_input_mode(const std::string& s) {
    if (s == "linear")
        return InputMode::linear;
    if (s == "log")
        return InputMode::log;
    throw Error("input mode must be 'linear' or 'log', got '" + s + "'");
}

Head parse_head(const std::string& s) {
    if (s == "softmax3" || s == "softmax")
        return Head::softmax3;
    if (s == "sigmoid1" || s == "sigmoid")
        return Head::sigmoid1;
    throw Error("head must be 'softmax3' or 'sigmoid1', got '" + s + "'");
}

OrientationMode parse_orientation(const std::string& s) {
    if (s == "auto")
        return OrientationMode::automatic;
    if (s == "landscape")
        return OrientationMode::landscape;
    if (s == "portrait")
        return OrientationMode::portrait;
    throw Error("orientation must be 'auto', 'landscape' or 'portrait', got '" + s + "'");
}

Rect parse_rect(const std::string& s) {
    Rect r;
    if (std::sscanf(s.c_str(), "%d,%d,%d,%d", &r.x, &r.y, &r.w, &r.h) != 4)
        throw Error("expected a rect as 'x,y,w,h', got '" + s + "'");
    return r;
}

void add_synth(CLI::App& app) {
    struct Opts {
        std::string out_dir;
        int width = 1024, height = 768;
        double base = std::nan("");
        std::vector<double> amplitudes, frequencies, phases;
        std::string land_side = "below";
        double land_mean = 9000.0, sea_mean = 2500.0;
        int looks = 4;
        std::vector<std::string> nodata;
        int point_stride = 64;
        uint64_t seed = 0;
    };
    auto o = std::make_shared<Opts>();
    CLI::App* cmd = app.add_subcommand("synth", "Generate a synthetic SAR-like scene");
    cmd->add_option("-o,--out-dir", o->out_dir, "Output directory")->required();
    cmd->add_option("--width", o->width, "Scene width in pixels");
    cmd->add_option("--height", o->height, "Scene height in pixels");
    cmd->add_option("--base", o->base, "Coastline base row (default: height/2)");
    cmd->add_option("--amplitude", o->amplitudes, "Sine amplitudes, px")->delimiter(',');
    cmd->add_option("--frequency", o->frequencies, "Sine frequencies, cycles per width")
        ->delimiter(',');
    cmd->add_option("--phase", o->phases, "Sine phases, radians")->delimiter(',');
    cmd->add_option("--land-side", o->land_side, "'above' or 'below' the curve");
    cmd->add_option("--land-mean", o->land_mean, "Mean land intensity (of 65535)");
    cmd->add_option("--sea-mean", o->sea_mean, "Mean sea intensity (of 65535)");
    cmd->add_option("--looks", o->looks, "Speckle looks (higher = less noise)");
    cmd->add_option("--nodata", o->nodata, "No-data rect 'x,y,w,h' (repeatable)");
    cmd->add_option("--point-stride", o->point_stride, "Columns between evaluation points");
    cmd->add_option("--seed", o->seed, "RNG seed");

    cmd->callback([o] {
        SceneConfig cfg;
        cfg.width = o->width;
        cfg.height = o->height;
        cfg.base = std::isnan(o->base) ? o->height / 2.0 : o->base;
        if (o->frequencies.size() != o->amplitudes.size())
            throw Error("synth: --amplitude and --frequency counts differ");
        if (o->phases.size() > o->amplitudes.size())
            throw Error("synth: more phases than amplitudes");
        for (size_t i = 0; i < o->amplitudes.size(); ++i)
            cfg.waves.push_back({o->amplitudes[i], o->frequencies[i],
                                 i < o->phases.size() ? o->phases[i] : 0.0});
        if (o->land_side == "above")
            cfg.land_side = LandSide::above;
        else if (o->land_side == "below")
            cfg.land_side = LandSide::below;
        else
            throw Error("synth: --land-side must be 'above' or 'below'");
        cfg.land_mean = o->land_mean;
        cfg.sea_mean = o->sea_mean;
        cfg.speckle_looks = o->looks;
        for (const std::string& s : o->nodata)
            cfg.nodata_rects.push_back(parse_rect(s));
        cfg.point_stride = o->point_stride;
        cfg.seed = o->seed;

        Scene scene = generate_scene(cfg);
        std::filesystem::create_directories(o->out_dir);
        write_pgm(scene.image, o->out_dir + "/image.pgm");
        write_class_pgm(scene.classes, o->out_dir + "/classes.pgm");
        write_mask_pgm(scene.coast, o->out_dir + "/coast.pgm");
        write_points_csv(scene.points, o->out_dir + "/points.csv");
        std::cout << "wrote " << cfg.width << "x" << cfg.height << " scene with "
                  << scene.points.size() << " evaluation points to " << o->out_dir << "\n";
    });
}

void add_preprocess(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("preprocess", "Normalize intensities or encode labels");
    cmd->require_subcommand(1);

    struct ImageOpts {
        std::string in, out, mode = "log";
        double noise_coefficient = -83.0, log_floor = 1.0;
        std::vector<double> range{0.0, 96.33};
    };
    auto io = std::make_shared<ImageOpts>();
    CLI::App* img = cmd->add_subcommand("image", "PGM intensities to a normalized float raster");
    img->add_option("input", io->in, "Input PGM")->required();
    img->add_option("output", io->out, "Output .fr raster")->required();
    img->add_option("--mode", io->mode, "'linear' or 'log'");
    img->add_option("--noise-coefficient", io->noise_coefficient, "Constant added to f^2");
    img->add_option("--log-floor", io->log_floor, "Lower clamp on the log argument");
    img->add_option("--range", io->range, "dB range mapped to [0,1]")->expected(2);
    img->callback([io] {
        PreprocessConfig cfg;
        cfg.mode = io->mode == "linear" ? PreprocessConfig::Mode::linear
                                        : PreprocessConfig::Mode::log;
        if (io->mode != "linear" && io->mode != "log")
            throw Error("preprocess image: --mode must be 'linear' or 'log'");
        cfg.noise_coefficient = io->noise_coefficient;
        cfg.log_floor = io->log_floor;
        cfg.log_range_lo = io->range[0];
        cfg.log_range_hi = io->range[1];
        write_float_raster(normalize(read_pgm(io->in), cfg), io->out);
    });

    struct LabelOpts {
        std::string classes, out, coast;
        int kernel_radius = 2;
        double peak = 1.0;
    };
    auto lo = std::make_shared<LabelOpts>();
    CLI::App* lab = cmd->add_subcommand("labels", "Class PGM to one-hot float labels");
    lab->add_option("classes", lo->classes, "Class map PGM")->required();
    lab->add_option("output", lo->out, "Output .fr raster")->required();
    lab->add_option("--coast", lo->coast, "Coast mask PGM; adds a smoothed coastline channel");
    lab->add_option("--kernel-radius", lo->kernel_radius, "Smoothing radius, px");
    lab->add_option("--peak", lo->peak, "Smoothed peak value");
    lab->callback([lo] {
        ClassMap classes = read_class_pgm(lo->classes);
        if (lo->coast.empty()) {
            write_float_raster(encode_labels(classes), lo->out);
        } else {
            LabelSmoothingConfig cfg;
            cfg.kernel_radius = lo->kernel_radius;
            cfg.peak = lo->peak;
            write_float_raster(encode_labels(classes, read_mask_pgm(lo->coast), cfg), lo->out);
        }
    });
}

void add_augment(CLI::App& app) {
    struct Opts {
        std::vector<std::string> images, labels;
        std::string out_dir;
        int count = 1;
        AugmentConfig cfg;
        std::vector<double> add{-0.05, 0.05}, mul{0.9, 1.1}, gamma{0.8, 1.25};
        std::vector<int> grid{2, 2};
    };
    auto o = std::make_shared<Opts>();
    CLI::App* cmd = app.add_subcommand("augment", "Emit augmented training samples");
    cmd->add_option("--image", o->images, "Source image .fr (repeatable)")->required();
    cmd->add_option("--label", o->labels, "Matching label .fr (repeatable)")->required();
    cmd->add_option("-o,--out-dir", o->out_dir, "Output directory")->required();
    cmd->add_option("--count", o->count, "Number of samples");
    cmd->add_option("--seed", o->cfg.seed, "RNG seed");
    cmd->add_option("--crop-min", o->cfg.crop_side_min, "Minimum crop side, px");
    cmd->add_option("--crop-max", o->cfg.crop_side_max, "Maximum crop side, px");
    cmd->add_option("--model-side", o->cfg.model_side, "Sample side after resampling, px");
    cmd->add_option("--flip-h", o->cfg.flip_h, "Horizontal flip probability");
    cmd->add_option("--flip-v", o->cfg.flip_v, "Vertical flip probability");
    cmd->add_option("--rot90", o->cfg.rot90, "Quarter-turn probability");
    cmd->add_option("--add-range", o->add, "Additive shift range")->expected(2);
    cmd->add_option("--mul-range", o->mul, "Multiplicative shift range")->expected(2);
    cmd->add_option("--gamma-range", o->gamma, "Gamma range")->expected(2);
    cmd->add_option("--noise-sigma", o->cfg.intensity.noise_sigma, "Gaussian noise sigma");
    cmd->add_option("--blur-prob", o->cfg.intensity.blur_prob, "Box blur probability");
    cmd->add_option("--cropout-prob", o->cfg.intensity.cropout_prob, "Cropout probability");
    cmd->add_option("--cropout-max-frac", o->cfg.intensity.cropout_max_frac,
                    "Maximum cropout area fraction");
    CLI::Option* mosaic = cmd->add_flag("--mosaic", "Enable multi-sample mosaicing");
    cmd->add_option("--mosaic-grid", o->grid, "Mosaic grid rows cols")->expected(2);
    cmd->add_option("--mosaic-prob", o->cfg.mosaic.replace_prob, "Per-cell replacement probability");

    cmd->callback([o, mosaic] {
        if (o->images.size() != o->labels.size())
            throw Error("augment: --image and --label counts differ");
        o->cfg.intensity.add_lo = o->add[0];
        o->cfg.intensity.add_hi = o->add[1];
        o->cfg.intensity.mul_lo = o->mul[0];
        o->cfg.intensity.mul_hi = o->mul[1];
        o->cfg.intensity.gamma_lo = o->gamma[0];
        o->cfg.intensity.gamma_hi = o->gamma[1];
        o->cfg.mosaic.enabled = mosaic->count() > 0;
        o->cfg.mosaic.grid_rows = o->grid[0];
        o->cfg.mosaic.grid_cols = o->grid[1];

        std::vector<FloatRaster> rasters;
        rasters.reserve(o->images.size() * 2);
        std::vector<SourceRef> sources;
        for (size_t i = 0; i < o->images.size(); ++i) {
            rasters.push_back(read_float_raster(o->images[i]));
            rasters.push_back(read_float_raster(o->labels[i]));
            sources.push_back({static_cast<int>(i), nullptr, nullptr});
        }
        // The vector is fully built; pointers are stable now.
        for (size_t i = 0; i < sources.size(); ++i) {
            sources[i].image = &rasters[2 * i];
            sources[i].label = &rasters[2 * i + 1];
        }

        std::filesystem::create_directories(o->out_dir);
        std::ofstream prov(o->out_dir + "/provenance.jsonl", std::ios::binary);
        if (!prov)
            throw IoError("cannot open " + o->out_dir + "/provenance.jsonl for writing");
        for (int s = 0; s < o->count; ++s) {
            Sample sample = make_sample(sources, o->cfg, static_cast<uint64_t>(s));
            char name[32];
            std::snprintf(name, sizeof name, "sample_%04d", s);
            write_float_raster(sample.image, o->out_dir + "/" + name + ".image.fr");
            write_float_raster(sample.label, o->out_dir + "/" + name + ".label.fr");
            for (const ProvenanceRecord& r : sample.provenance) {
                nlohmann::json j;
                j["sample"] = s;
                j["source"] = r.source_id;
                j["src"] = {r.src.x, r.src.y, r.src.w, r.src.h};
                j["dst"] = {r.dst.x, r.dst.y, r.dst.w, r.dst.h};
                j["transform"] = {{"transpose", r.transform.transpose},
                                  {"flip_x", r.transform.flip_x},
                                  {"flip_y", r.transform.flip_y}};
                prov << j.dump() << '\n';
            }
        }
        std::cout << "wrote " << o->count << " samples to " << o->out_dir << "\n";
    });
}

void add_infer(CLI::App& app) {
    struct Opts {
        std::string image, out;
        std::string input = "log", head = "softmax3", backend;
        double value = 0.5;
        std::string truth;
        double sharpness = 1.0, noise_sigma = 0.0;
        uint64_t oracle_seed = 0;
        std::string pattern, command;
        TilingConfig tiling;
        std::string aggregation = "coverage_mean";
        int threads = 1;
    };
    auto o = std::make_shared<Opts>();
    CLI::App* cmd = app.add_subcommand("infer", "Floating-window prediction over an image");
    cmd->add_option("image", o->image, "Input PGM")->required();
    cmd->add_option("output", o->out, "Output probability .fr")->required();
    cmd->add_option("--input", o->input, "'linear' or 'log' normalization");
    cmd->add_option("--head", o->head, "'softmax3' or 'sigmoid1'");
    cmd->add_option("--backend", o->backend, "'oracle', 'constant', 'file' or 'external'")
        ->required();
    cmd->add_option("--value", o->value, "Constant backend fill value");
    cmd->add_option("--truth", o->truth, "Oracle backend truth class PGM");
    cmd->add_option("--sharpness", o->sharpness, "Oracle logistic slope");
    cmd->add_option("--noise-sigma", o->noise_sigma, "Oracle noise sigma");
    cmd->add_option("--oracle-seed", o->oracle_seed, "Oracle noise seed");
    cmd->add_option("--pattern", o->pattern, "File backend pattern with {scale},{row},{col}");
    cmd->add_option("--command", o->command, "External backend command");
    cmd->add_option("--tile-side", o->tiling.tile_side, "Tile side, px");
    cmd->add_option("--stride", o->tiling.stride, "Stride at scale 1, px");
    cmd->add_option("--scales", o->tiling.scales, "Window scales")->delimiter(',');
    cmd->add_option("--smoothing-sigma", o->tiling.smoothing_sigma, "Gaussian sigma, px");
    cmd->add_option("--aggregation", o->aggregation, "'sum' or 'coverage_mean'");
    cmd->add_option("--threads", o->threads, "Worker threads");

    cmd->callback([o] {
        PredictorSpec spec;
        spec.id = "cli";
        spec.input_mode = parse_input_mode(o->input);
        spec.head = parse_head(o->head);
        if (o->backend == "constant") {
            spec.backend = ConstantBackend{o->value};
        } else if (o->backend == "oracle") {
            if (o->truth.empty())
                throw Error("infer: oracle backend requires --truth");
            OracleBackend ob;
            ob.cfg.truth = read_class_pgm(o->truth);
            ob.cfg.sharpness = o->sharpness;
            ob.cfg.noise_sigma = o->noise_sigma;
            ob.cfg.seed = o->oracle_seed;
            spec.backend = std::move(ob);
        } else if (o->backend == "file") {
            if (o->pattern.empty())
                throw Error("infer: file backend requires --pattern");
            spec.backend = FileBackend{o->pattern};
        } else if (o->backend == "external") {
            if (o->command.empty())
                throw Error("infer: external backend requires --command");
            spec.backend = ExternalBackend{o->command};
        } else {
            throw Error("infer: unknown backend '" + o->backend + "'");
        }
        if (o->aggregation == "sum")
            o->tiling.aggregation = Aggregation::sum;
        else if (o->aggregation == "coverage_mean")
            o->tiling.aggregation = Aggregation::coverage_mean;
        else
            throw Error("infer: unknown aggregation '" + o->aggregation + "'");

        RasterImage image = read_pgm(o->image);
        PreprocessConfig pc;
        pc.mode = spec.input_mode == InputMode::linear ? PreprocessConfig::Mode::linear
                                                       : PreprocessConfig::Mode::log;
        Predictor predictor(std::move(spec));
        FloatRaster prob = tiled_predict(predictor, normalize(image, pc), o->tiling, o->threads);
        write_float_raster(prob, o->out);
    });
}

void add_extract(CLI::App& app) {
    struct Opts {
        std::string in, out, head = "auto", orientation = "auto", mask;
    };
    auto o = std::make_shared<Opts>();
    CLI::App* cmd = app.add_subcommand("extract", "Probability raster to a coastline CSV");
    cmd->add_option("input", o->in, "Probability .fr")->required();
    cmd->add_option("output", o->out, "Coastline CSV")->required();
    cmd->add_option("--head", o->head, "'softmax3', 'sigmoid1' or 'auto' (by channel count)");
    cmd->add_option("--orientation", o->orientation, "'auto', 'landscape' or 'portrait'");
    cmd->add_option("--mask", o->mask, "Also write the mask PGM here");

    cmd->callback([o] {
        FloatRaster prob = read_float_raster(o->in);
        Head head;
        if (o->head == "auto")
            head = prob.channels == 3 ? Head::softmax3 : Head::sigmoid1;
        else
            head = parse_head(o->head);
        OrientationMode mode = parse_orientation(o->orientation);
        CoastMask mask =
            head == Head::softmax3 ? extract_softmax(prob) : extract_sigmoid(prob, mode);
        write_coastline_csv(mask_to_path(mask, mode), o->out);
        if (!o->mask.empty())
            write_mask_pgm(mask, o->mask);
    });
}

void add_ensemble(CLI::App& app) {
    struct Opts {
        std::vector<std::string> inputs;
        std::vector<double> weights;
        std::string out;
    };
    auto o = std::make_shared<Opts>();
    CLI::App* cmd = app.add_subcommand("ensemble", "Weighted average of coastline CSVs");
    cmd->add_option("inputs", o->inputs, "Coastline CSVs")->required();
    cmd->add_option("-w,--weights", o->weights, "Model weights (default: equal)")->delimiter(',');
    cmd->add_option("-o,--out", o->out, "Fused coastline CSV")->required();

    cmd->callback([o] {
        std::vector<CoastlinePath> paths;
        for (const std::string& p : o->inputs)
            paths.push_back(read_coastline_csv(p));
        std::vector<double> weights = o->weights;
        if (weights.empty())
            weights.assign(paths.size(), 1.0);
        write_coastline_csv(ensemble_paths(paths, weights), o->out);
    });
}

void add_postprocess(CLI::App& app) {
    struct Opts {
        std::string in, mask, csv;
        int extent = 0;
        bool no_interpolate = false;
    };
    auto o = std::make_shared<Opts>();
    CLI::App* cmd = app.add_subcommand("postprocess", "Gap-fill a coastline into a dense mask");
    cmd->add_option("input", o->in, "Coastline CSV")->required();
    cmd->add_option("--extent", o->extent, "Mask size along the secondary axis, px")->required();
    cmd->add_option("--mask", o->mask, "Output mask PGM");
    cmd->add_option("--csv", o->csv, "Output densified coastline CSV");
    cmd->add_flag("--no-interpolate", o->no_interpolate, "Keep absent runs absent");

    cmd->callback([o] {
        if (o->mask.empty() && o->csv.empty())
            throw Error("postprocess: nothing to write, pass --mask and/or --csv");
        CoastlinePath path = read_coastline_csv(o->in);
        bool interpolate = !o->no_interpolate;
        if (!o->mask.empty())
            write_mask_pgm(fill_gaps(path, o->extent, interpolate), o->mask);
        if (!o->csv.empty())
            write_coastline_csv(interpolate ? interpolate_gaps(path) : path, o->csv);
    });
}

void add_evaluate(CLI::App& app) {
    struct Opts {
        std::string mask, points, out;
        double penalty = 100.0;
        double radius = std::nan("");
    };
    auto o = std::make_shared<Opts>();
    CLI::App* cmd = app.add_subcommand("evaluate", "Score a mask against evaluation points");
    cmd->add_option("mask", o->mask, "Predicted mask PGM")->required();
    cmd->add_option("points", o->points, "Evaluation points CSV")->required();
    cmd->add_option("--penalty", o->penalty, "Miss penalty, px");
    cmd->add_option("--radius", o->radius, "Miss radius, px (default: none)");
    cmd->add_option("-o,--out", o->out, "Write the JSON report here");

    cmd->callback([o] {
        ScoreConfig cfg;
        cfg.miss_penalty = o->penalty;
        if (!std::isnan(o->radius))
            cfg.miss_radius = o->radius;
        ScoreReport report = score(read_mask_pgm(o->mask), read_points_csv(o->points), cfg);
        if (!o->out.empty())
            write_score_json(report, cfg, o->out);
        std::cout << "mean_score = " << report.mean_score << " (" << report.hit_count
                  << " hits, " << report.miss_count << " misses)\n";
    });
}

void add_pipeline(CLI::App& app) {
    struct Opts {
        std::string config;
        int threads = 0;
    };
    auto o = std::make_shared<Opts>();
    CLI::App* cmd = app.add_subcommand("pipeline", "Run infer/extract/ensemble/score end to end");
    cmd->add_option("-c,--config", o->config, "Pipeline TOML config")->required();
    cmd->add_option("--threads", o->threads, "Override the configured thread count");

    cmd->callback([o] {
        PipelineConfig cfg = load_pipeline_config(o->config);
        if (o->threads > 0)
            cfg.threads = o->threads;
        PipelineResult result = run_pipeline(cfg);
        for (const PredictorOutcome& oc : result.predictors) {
            std::cout << oc.id;
            if (oc.scored)
                std::cout << ": mean_score = " << oc.score.mean_score;
            std::cout << "\n";
        }
        if (result.scored)
            std::cout << "ensemble: mean_score = " << result.score.mean_score << " ("
                      << result.score.hit_count << " hits, " << result.score.miss_count
                      << " misses)\n";
        std::cout << "outputs in " << cfg.out_dir << "\n";
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SAR coastline extraction pipeline"};
    app.require_subcommand(1);

    add_synth(app);
    add_preprocess(app);
    add_augment(app);
    add_infer(app);
    add_extract(app);
    add_ensemble(app);
    add_postprocess(app);
    add_evaluate(app);
    add_pipeline(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const coastline::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
