#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "contour.hpp"
#include "core.hpp"
#include "estimation.hpp"
#include "evaluation.hpp"
#include "scene.hpp"

namespace polsar {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Covariance layout
// ---------------------------------------------------------------------------
// A Hermitian 3x3 travels as nine reals: the three diagonals, then Re/Im of
// the (1,2), (1,3), (2,3) entries. Matches the raster payload layout.

inline Json sigma_to_json(const HermitianCov3& s) {
    return Json::array({s.d[0], s.d[1], s.d[2], s.o[0].real(), s.o[0].imag(), s.o[1].real(),
                        s.o[1].imag(), s.o[2].real(), s.o[2].imag()});
}

inline HermitianCov3 sigma_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 9)
        throw std::invalid_argument("sigma: expected an array of 9 reals");
    std::array<double, 9> v{};
    for (std::size_t i = 0; i < 9; ++i) {
        if (!j[i].is_number()) throw std::invalid_argument("sigma: entries must be numbers");
        v[i] = j[i].get<double>();
    }
    HermitianCov3 s;
    s.d = {v[0], v[1], v[2]};
    s.o = {Complex{v[3], v[4]}, Complex{v[5], v[6]}, Complex{v[7], v[8]}};
    return s;
}

// ---------------------------------------------------------------------------
// Fit results
// ---------------------------------------------------------------------------

inline const char* fit_method_name(FitMethod m) {
    return m == FitMethod::MeanOfChannels ? "mean-of-channels" : "epsilon-minimization";
}

inline Json fit_result_to_json(const FitResult& r) {
    const auto opt = [](const std::optional<double>& v) {
        return v ? Json(*v) : Json(nullptr);
    };
    Json j;
    j["omega"] = opt(r.omega);
    j["omega_hh"] = opt(r.omega_channel[0]);
    j["omega_hv"] = opt(r.omega_channel[1]);
    j["omega_vv"] = opt(r.omega_channel[2]);
    j["sigma"] = sigma_to_json(r.sigma);
    j["method"] = fit_method_name(r.method);
    return j;
}

// ---------------------------------------------------------------------------
// Region specifications (segment input)
// ---------------------------------------------------------------------------
// Either {"manual": [[x,y], ...]} or
// {"auto": {"t_r": [lo, hi], "t_s": n, "block": side}};
// a top-level array holds several of them.

struct RegionSpec {
    bool is_auto = false;
    Polygon manual;
    AutoRegionParams auto_params;
};

namespace detail {

inline Polygon polygon_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() < 3)
        throw std::invalid_argument(std::string(what) + ": expected an array of >= 3 [x,y] pairs");
    Polygon poly;
    poly.reserve(j.size());
    for (const auto& pt : j) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
            throw std::invalid_argument(std::string(what) + ": vertices must be [x,y] number pairs");
        poly.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    return poly;
}

inline RegionSpec region_spec_from_object(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("region spec: expected an object");
    RegionSpec spec;
    if (j.contains("manual")) {
        spec.is_auto = false;
        spec.manual = polygon_from_json(j.at("manual"), "region spec manual");
        return spec;
    }
    if (j.contains("auto")) {
        const Json& a = j.at("auto");
        if (!a.is_object()) throw std::invalid_argument("region spec auto: expected an object");
        spec.is_auto = true;
        const Json& band = a.at("t_r");
        if (!band.is_array() || band.size() != 2)
            throw std::invalid_argument("region spec auto: t_r must be [lo, hi]");
        spec.auto_params.t_r_lo = band[0].get<double>();
        spec.auto_params.t_r_hi = band[1].get<double>();
        if (a.contains("t_s")) spec.auto_params.t_s = a.at("t_s").get<int>();
        if (a.contains("block")) spec.auto_params.block = a.at("block").get<int>();
        return spec;
    }
    throw std::invalid_argument("region spec: need a \"manual\" or \"auto\" key");
}

}  // namespace detail

inline std::vector<RegionSpec> parse_region_specs(const Json& j) {
    std::vector<RegionSpec> out;
    if (j.is_array()) {
        for (const auto& item : j) out.push_back(detail::region_spec_from_object(item));
        if (out.empty()) throw std::invalid_argument("region spec: empty array");
    } else {
        out.push_back(detail::region_spec_from_object(j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Contours (segment output)
// ---------------------------------------------------------------------------

inline Json boundary_to_json(const RegionBoundary& rb) {
    Json j;
    j["detected"] = rb.detected;
    Json border = Json::array();
    for (const auto& p : rb.border_points) border.push_back(Json::array({p[0], p[1]}));
    j["border_points"] = border;
    if (rb.detected) {
        j["degree"] = rb.contour.degree;
        Json ctrl = Json::array();
        for (const auto& p : rb.contour.ctrl) ctrl.push_back(Json::array({p[0], p[1]}));
        j["control_points"] = ctrl;
    } else {
        j["degree"] = nullptr;
        j["control_points"] = Json::array();
    }
    j["omega"] = rb.omega ? Json(*rb.omega) : Json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Scenes (simulate input) and ground-truth masks (simulate output)
// ---------------------------------------------------------------------------

namespace detail {

inline GphParams gph_params_from_json(const Json& j, const char* what) {
    if (!j.is_object() || !j.contains("sigma") || !j.contains("omega"))
        throw std::invalid_argument(std::string(what) + ": need \"sigma\" and \"omega\"");
    GphParams p;
    p.sigma = sigma_from_json(j.at("sigma"));
    p.omega = j.at("omega").get<double>();
    if (!(p.omega > 0.0)) throw std::invalid_argument(std::string(what) + ": omega must be > 0");
    return p;
}

}  // namespace detail

inline SceneSpec scene_spec_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("scene spec: expected an object");
    SceneSpec spec;
    for (const char* key : {"width", "height", "background"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("scene spec: missing \"") + key + "\"");
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.looks = j.value("looks", 1);
    spec.background = detail::gph_params_from_json(j.at("background"), "scene background");
    if (j.contains("inserts")) {
        const Json& arr = j.at("inserts");
        if (!arr.is_array()) throw std::invalid_argument("scene spec: inserts must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const Json& ij = arr[i];
            const std::string what = "scene insert " + std::to_string(i);
            if (!ij.is_object() || !ij.contains("shape"))
                throw std::invalid_argument(what + ": need a \"shape\"");
            SceneInsert ins;
            const std::string shape = ij.at("shape").get<std::string>();
            if (shape == "rect") {
                ins.shape = SceneInsert::Shape::Rect;
                ins.x = ij.at("x").get<int>();
                ins.y = ij.at("y").get<int>();
                ins.w = ij.at("width").get<int>();
                ins.h = ij.at("height").get<int>();
            } else if (shape == "disk") {
                ins.shape = SceneInsert::Shape::Disk;
                const Json& c = ij.at("center");
                if (!c.is_array() || c.size() != 2)
                    throw std::invalid_argument(what + ": center must be [x, y]");
                ins.cx = c[0].get<double>();
                ins.cy = c[1].get<double>();
                ins.radius = ij.at("radius").get<double>();
            } else if (shape == "polygon") {
                ins.shape = SceneInsert::Shape::Polygon;
                ins.vertices = detail::polygon_from_json(ij.at("vertices"), what.c_str());
            } else {
                throw std::invalid_argument(what + ": unknown shape \"" + shape + "\"");
            }
            ins.params = detail::gph_params_from_json(ij.at("params"), what.c_str());
            spec.inserts.push_back(std::move(ins));
        }
    }
    validate_scene(spec);
    return spec;
}

inline Json masks_to_json(const RenderedScene& scene) {
    Json j;
    j["width"] = scene.image.width;
    j["height"] = scene.image.height;
    Json regions = Json::array();
    for (const RegionMask& m : scene.masks) {
        Json r;
        r["id"] = m.id;
        Json runs = Json::array();
        for (const auto& run : m.runs) runs.push_back(Json::array({run[0], run[1], run[2]}));
        r["runs"] = runs;
        regions.push_back(std::move(r));
    }
    j["regions"] = regions;
    return j;
}

inline std::vector<Pixel> mask_pixels_from_json(const Json& j, int region_id) {
    if (!j.is_object() || !j.contains("regions"))
        throw std::invalid_argument("mask: expected an object with \"regions\"");
    for (const auto& r : j.at("regions")) {
        if (r.at("id").get<int>() != region_id) continue;
        std::vector<Pixel> out;
        for (const auto& run : r.at("runs")) {
            const int y = run[0].get<int>();
            for (int x = run[1].get<int>(); x < run[2].get<int>(); ++x) out.push_back({x, y});
        }
        return out;
    }
    throw std::invalid_argument("mask: region id " + std::to_string(region_id) + " not found");
}

// ---------------------------------------------------------------------------
// Study metadata (mc-error companion file)
// ---------------------------------------------------------------------------

inline Json study_meta_to_json(const StudyParams& p, std::uint64_t seed,
                               const std::vector<std::string>& labels, double runtime_seconds) {
    Json j;
    j["seed"] = seed;
    j["replications"] = p.replications;
    j["situations"] = labels;
    j["phantom"] = {{"width", p.width}, {"height", p.height}, {"looks", p.looks}};
    j["window"] = {{"half_width", p.window.half_width},
                   {"win_len", p.window.win_len},
                   {"stride", p.window.stride},
                   {"anchor_offset", p.window.anchor_offset}};
    j["mask_half"] = p.mask_half;
    j["omega_max"] = p.omega_max;
    j["saturation"] = p.saturation;
    j["max_error"] = p.max_error;
    j["threads"] = p.threads;
    j["runtime_seconds"] = runtime_seconds;
    return j;
}

}  // namespace polsar
