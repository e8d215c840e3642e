// Command-line front end: simulate scenes, fit model parameters, segment
// region boundaries, and run the Monte Carlo edge-error study.
//
// Exit codes: 0 success, 2 usage or input error, 3 estimation failure,
// 4 detection failure (partial results are still emitted). Stdout carries
// only machine-readable payloads; diagnostics go to stderr.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <polsar/polsar.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitDetection = 4;

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    if (!f) throw std::runtime_error("cannot read " + path);
    return ss.str();
}

polsar::Json load_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return polsar::Json::parse(text);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw std::runtime_error("short write to " + path);
}

struct SimulateArgs {
    std::string scene_path;
    std::string out_path;
    std::string masks_path;
    std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateArgs& a) {
    polsar::SceneSpec spec;
    try {
        spec = polsar::scene_spec_from_json(load_json_file(a.scene_path));
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitInput;
    }
    polsar::RngState rng(a.seed);
    const polsar::RenderedScene scene = polsar::render_scene(spec, rng);

    const std::string masks_path = a.masks_path.empty() ? a.out_path + ".masks.json" : a.masks_path;
    try {
        polsar::write_raster(a.out_path, scene.image);
        write_text_file(masks_path, polsar::masks_to_json(scene).dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitInput;
    }

    polsar::Json summary;
    summary["raster"] = a.out_path;
    summary["masks"] = masks_path;
    summary["width"] = scene.image.width;
    summary["height"] = scene.image.height;
    summary["looks"] = scene.image.looks;
    summary["regions"] = scene.masks.size();
    summary["seed"] = a.seed;
    std::cout << summary.dump() << "\n";
    return kExitOk;
}

struct FitArgs {
    std::string in_path;
    std::string mask_path;
    int region = -1;
    std::string method = "mean";
    std::string out_path;
};

int cmd_fit(const FitArgs& a) {
    polsar::FitMethod method;
    if (a.method == "mean") {
        method = polsar::FitMethod::MeanOfChannels;
    } else if (a.method == "epsilon") {
        method = polsar::FitMethod::EpsilonMinimization;
    } else {
        std::cerr << "fit: unknown method \"" << a.method << "\" (use mean or epsilon)\n";
        return kExitInput;
    }

    polsar::FitResult result;
    try {
        const polsar::PolSarImage img = polsar::read_raster(a.in_path);
        if (a.mask_path.empty()) {
            result = polsar::fit_image(img, method);
        } else {
            if (a.region < 0) {
                std::cerr << "fit: --mask requires --region\n";
                return kExitInput;
            }
            const auto pixels = polsar::mask_pixels_from_json(load_json_file(a.mask_path), a.region);
            std::vector<polsar::HermitianCov3> samples;
            samples.reserve(pixels.size());
            for (const auto& p : pixels) {
                if (!img.contains(p[0], p[1]))
                    throw std::invalid_argument("mask pixel outside the raster");
                samples.push_back(img.at(p[0], p[1]));
            }
            result = polsar::fit_samples(samples, img.looks, method);
        }
    } catch (const std::exception& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInput;
    }

    const std::string payload = polsar::fit_result_to_json(result).dump() + "\n";
    std::cout << payload;
    if (!a.out_path.empty()) {
        try {
            write_text_file(a.out_path, payload);
        } catch (const std::exception& e) {
            std::cerr << "fit: " << e.what() << "\n";
            return kExitInput;
        }
    }
    if (!result.omega) {
        std::cerr << "fit: no channel produced a valid roughness estimate\n";
        return kExitEstimation;
    }
    return kExitOk;
}

struct SegmentArgs {
    std::string in_path;
    std::string regions_path;
    std::string out_path;
    polsar::ContourParams params;
};

int cmd_segment(const SegmentArgs& a) {
    std::vector<polsar::RegionBoundary> boundaries;
    try {
        const polsar::PolSarImage img = polsar::read_raster(a.in_path);
        const auto specs = polsar::parse_region_specs(load_json_file(a.regions_path));
        std::vector<polsar::RegionSeed> seeds;
        for (const auto& spec : specs) {
            if (spec.is_auto) {
                const auto found = polsar::find_initial_regions(img, spec.auto_params);
                seeds.insert(seeds.end(), found.begin(), found.end());
            } else {
                seeds.push_back(polsar::make_manual_seed(spec.manual));
            }
        }
        boundaries = polsar::detect_boundaries(img, seeds, a.params);
    } catch (const std::exception& e) {
        std::cerr << "segment: " << e.what() << "\n";
        return kExitInput;
    }

    polsar::Json out;
    out["regions"] = polsar::Json::array();
    bool all_detected = true;
    for (const auto& rb : boundaries) {
        out["regions"].push_back(polsar::boundary_to_json(rb));
        all_detected = all_detected && rb.detected;
    }
    const std::string payload = out.dump(2) + "\n";
    std::cout << payload;
    if (!a.out_path.empty()) {
        try {
            write_text_file(a.out_path, payload);
        } catch (const std::exception& e) {
            std::cerr << "segment: " << e.what() << "\n";
            return kExitInput;
        }
    }
    if (boundaries.empty()) {
        std::cerr << "segment: no region seed produced a boundary search\n";
        return kExitDetection;
    }
    if (!all_detected) {
        std::cerr << "segment: detection failed for at least one region\n";
        return kExitDetection;
    }
    return kExitOk;
}

struct McErrorArgs {
    std::string situations = "all";
    std::string out_path;
    std::string meta_path;
    polsar::StudyParams params;
    std::uint64_t seed = 1;
};

std::vector<polsar::Situation> select_situations(const std::string& selector) {
    const auto all = polsar::twelve_situations();
    if (selector == "all") return all;
    std::vector<polsar::Situation> picked;
    std::stringstream ss(selector);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        bool found = false;
        for (const auto& s : all) {
            if (s.label == token) {
                picked.push_back(s);
                found = true;
                break;
            }
        }
        if (!found) throw std::runtime_error("unknown situation \"" + token + "\" (use I..XII or all)");
    }
    if (picked.empty()) throw std::runtime_error("empty situation selection");
    return picked;
}

int cmd_mc_error(const McErrorArgs& a) {
    std::vector<polsar::Situation> situations;
    try {
        situations = select_situations(a.situations);
    } catch (const std::exception& e) {
        std::cerr << "mc-error: " << e.what() << "\n";
        return kExitInput;
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<polsar::SituationResult> results;
    try {
        results = polsar::run_error_study(situations, a.params, a.seed);
    } catch (const std::exception& e) {
        std::cerr << "mc-error: " << e.what() << "\n";
        return kExitInput;
    }
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream csv;
    polsar::write_error_csv(csv, results);

    std::vector<std::string> labels;
    labels.reserve(situations.size());
    for (const auto& s : situations) labels.push_back(s.label);
    const polsar::Json meta = polsar::study_meta_to_json(a.params, a.seed, labels, runtime);

    try {
        if (a.out_path.empty()) {
            std::cout << csv.str();
            if (!a.meta_path.empty()) write_text_file(a.meta_path, meta.dump(2) + "\n");
        } else {
            write_text_file(a.out_path, csv.str());
            const std::string meta_path =
                a.meta_path.empty() ? a.out_path + ".meta.json" : a.meta_path;
            write_text_file(meta_path, meta.dump(2) + "\n");
            polsar::Json summary;
            summary["csv"] = a.out_path;
            summary["meta"] = meta_path;
            summary["situations"] = labels;
            summary["runtime_seconds"] = runtime;
            std::cout << summary.dump() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "mc-error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-look polarimetric SAR model tools"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "Render a scene spec to a .psr raster");
    simulate->add_option("--scene", sim.scene_path, "Scene spec JSON")->required();
    simulate->add_option("--seed", sim.seed, "RNG seed");
    simulate->add_option("--out", sim.out_path, "Output raster path")->required();
    simulate->add_option("--masks", sim.masks_path, "Ground-truth masks path (default <out>.masks.json)");

    FitArgs fit;
    CLI::App* fitc = app.add_subcommand("fit", "Estimate model parameters from a raster");
    fitc->add_option("--in", fit.in_path, "Input .psr raster")->required();
    fitc->add_option("--mask", fit.mask_path, "Region masks JSON (restricts the sample set)");
    fitc->add_option("--region", fit.region, "Region id within --mask");
    fitc->add_option("--method", fit.method, "mean | epsilon")->default_val("mean");
    fitc->add_option("--out", fit.out_path, "Also write the result JSON here");

    SegmentArgs seg;
    CLI::App* segc = app.add_subcommand("segment", "Detect region boundaries");
    segc->add_option("--in", seg.in_path, "Input .psr raster")->required();
    segc->add_option("--regions", seg.regions_path, "Region spec JSON")->required();
    segc->add_option("--out", seg.out_path, "Also write the contours JSON here");
    segc->add_option("--rays", seg.params.n_rays, "Rays per region");
    segc->add_option("--reach", seg.params.reach, "Ray reach factor");
    segc->add_option("--mask-half", seg.params.mask_half, "Step-mask half width");
    segc->add_option("--degree", seg.params.degree, "B-spline degree");
    segc->add_option("--omega-max", seg.params.omega_max, "Roughness validity cap");
    segc->add_option("--saturation", seg.params.saturation, "Series soft cap (0 disables)");

    McErrorArgs mc;
    mc.params.threads = default_threads();
    CLI::App* mcc = app.add_subcommand("mc-error", "Monte Carlo edge-error study");
    mcc->add_option("--situations", mc.situations, "Comma-separated subset of I..XII, or all");
    mcc->add_option("--reps", mc.params.replications, "Replications per situation");
    mcc->add_option("--seed", mc.seed, "RNG seed");
    mcc->add_option("--threads", mc.params.threads, "Worker threads");
    mcc->add_option("--looks", mc.params.looks, "Phantom looks");
    mcc->add_option("--out", mc.out_path, "CSV output path (stdout when omitted)");
    mcc->add_option("--meta", mc.meta_path, "Companion metadata JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }

    if (simulate->parsed()) return cmd_simulate(sim);
    if (fitc->parsed()) return cmd_fit(fit);
    if (segc->parsed()) return cmd_segment(seg);
    return cmd_mc_error(mc);
}
