#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "contour.hpp"
#include "core.hpp"
#include "distributions.hpp"
#include "estimation.hpp"
#include "rng.hpp"

namespace polsar {

// ---------------------------------------------------------------------------
// Reference textures
// ---------------------------------------------------------------------------
// Measured covariance matrices (linear intensity units) of three land-cover
// classes, together with the roughness each class exhibits. Urban scatter is
// the most textured (smallest omega), pasture the most homogeneous.

inline HermitianCov3 urban_covariance() {
    HermitianCov3 s;
    s.d = {962892.0, 56707.0, 472251.0};
    s.o = {Complex{19171.0, -3579.0}, Complex{-154638.0, 191388.0}, Complex{-5798.0, 16812.0}};
    return s;
}

inline HermitianCov3 forest_covariance() {
    HermitianCov3 s;
    s.d = {360932.0, 98960.0, 208843.0};
    s.o = {Complex{11050.0, 3759.0}, Complex{63896.0, 1581.0}, Complex{6593.0, 6868.0}};
    return s;
}

inline HermitianCov3 pasture_covariance() {
    HermitianCov3 s;
    s.d = {32556.0, 1647.0, 61028.0};
    s.o = {Complex{556.0, 787.0}, Complex{24046.0, -27287.0}, Complex{-146.0, -482.0}};
    return s;
}

inline constexpr double kUrbanOmega = 0.43;
inline constexpr double kForestOmega = 9.77;
inline constexpr double kPastureOmega = 20.24;

// ---------------------------------------------------------------------------
// Situations
// ---------------------------------------------------------------------------

struct Situation {
    std::string label;  // roman numeral
    GphParams left;
    GphParams right;
};

// The twelve two-texture pairings of the edge study: (urban, forest),
// (urban, pasture), (forest, pasture) blocks, each crossed over two
// roughness values per side. Nesting order: block, then left omega, then
// right omega.
inline std::vector<Situation> twelve_situations() {
    const HermitianCov3 u = urban_covariance();
    const HermitianCov3 f = forest_covariance();
    const HermitianCov3 p = pasture_covariance();
    const std::array<const char*, 12> labels = {"I",  "II", "III", "IV",  "V",  "VI",
                                                "VII", "VIII", "IX", "X", "XI", "XII"};
    struct Block {
        HermitianCov3 ls;
        std::array<double, 2> lo;
        HermitianCov3 rs;
        std::array<double, 2> ro;
    };
    const std::array<Block, 3> blocks = {Block{u, {1.0, 5.0}, f, {10.0, 15.0}},
                                         Block{u, {1.0, 5.0}, p, {20.0, 25.0}},
                                         Block{f, {10.0, 15.0}, p, {20.0, 25.0}}};
    std::vector<Situation> out;
    out.reserve(12);
    std::size_t idx = 0;
    for (const Block& b : blocks)
        for (double lo : b.lo)
            for (double ro : b.ro) {
                Situation s;
                s.label = labels[idx++];
                s.left = GphParams{b.ls, lo};
                s.right = GphParams{b.rs, ro};
                out.push_back(std::move(s));
            }
    return out;
}

// ---------------------------------------------------------------------------
// Phantom generation
// ---------------------------------------------------------------------------

inline constexpr int kPhantomWidth = 100;
inline constexpr int kPhantomHeight = 20;
inline constexpr int kPhantomEdge = 50;  // first column of the right texture

// Two-texture strip: columns [0, width/2) from `left`, the rest from
// `right`. Pixels are drawn row-major, so the output is a pure function of
// (params, looks, rng seed).
inline PolSarImage make_phantom(const GphParams& left, const GphParams& right, int width, int height,
                                int looks, RngState& rng) {
    if (width < 2 || height < 1) throw std::invalid_argument("make_phantom: bad dimensions");
    PolSarImage img(width, height, looks);
    const GphSampler ls(left, looks);
    const GphSampler rs(right, looks);
    const int edge = width / 2;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) img.at(x, y) = (x < edge ? ls : rs).sample(rng);
    return img;
}

inline PolSarImage make_phantom(const GphParams& left, const GphParams& right, int looks,
                                RngState& rng) {
    return make_phantom(left, right, kPhantomWidth, kPhantomHeight, looks, rng);
}

// ---------------------------------------------------------------------------
// Error study
// ---------------------------------------------------------------------------

struct ErrorCurve {
    SeriesChannel channel = SeriesChannel::HH;
    int replications = 0;
    std::vector<double> f;  // f[k] = (#errors < k) / replications, k = 0..K
};

struct SituationResult {
    std::string label;
    std::array<ErrorCurve, 4> curves;  // HH, HV, VV, combined
};

struct StudyParams {
    int replications = 200;
    int width = kPhantomWidth;
    int height = kPhantomHeight;
    // Single-look phantoms leave the hardest forest-contrast pairs below
    // the moment estimator's resolving power at the default window size;
    // three looks is the smallest count that separates every pair.
    int looks = 3;
    // Error is measured to the first pixel of the right-hand texture, which
    // the mask argmax trails by about two indices on a unit-step path.
    WindowParams window{.anchor_offset = 2};
    int mask_half = 5;
    double omega_max = 100.0;
    double saturation = 8.0;  // series soft cap, as in ContourParams
    int max_error = 50;       // error assigned to failed detections; also K
    int threads = 1;
};

inline const char* series_channel_name(SeriesChannel c) {
    switch (c) {
        case SeriesChannel::HH: return "HH";
        case SeriesChannel::HV: return "HV";
        case SeriesChannel::VV: return "VV";
        default: return "combined";
    }
}

namespace detail {

// One replication: phantom, centerline window series, one transition search
// per channel. Returns |true_edge - b| per channel, max_error on failure.
inline std::array<double, 4> replication_errors(const Situation& sit, const StudyParams& p,
                                                RngState rng) {
    PolSarImage img = make_phantom(sit.left, sit.right, p.width, p.height, p.looks, rng);
    const int edge = p.width / 2;
    std::vector<Pixel> path;
    path.reserve(static_cast<std::size_t>(p.width));
    const int cy = p.height / 2;
    for (int x = 0; x < p.width; ++x) path.push_back({x, cy});
    const std::vector<SeriesEntry> raw = windowed_omega_series(img, path, p.window);

    std::array<double, 4> err{};
    for (int c = 0; c < 4; ++c) {
        const auto channel = static_cast<SeriesChannel>(c);
        std::vector<std::pair<double, double>> series = conditioned_series(raw, channel, p.omega_max);
        double e = static_cast<double>(p.max_error);
        if (series.size() >= 2 * static_cast<std::size_t>(p.mask_half)) {
            if (p.saturation > 0.0)
                for (auto& pv : series) pv.second = saturate_omega(pv.second, p.saturation);
            const TransitionResult tr = detect_transition(series, p.mask_half);
            if (tr.edge) e = std::min(std::abs(edge - tr.position), static_cast<double>(p.max_error));
        }
        err[static_cast<std::size_t>(c)] = e;
    }
    return err;
}

}  // namespace detail

// Runs `replications` phantoms per situation and returns the cumulative
// error-frequency curves. Every replication owns an RNG stream derived from
// (seed, situation index, replication index), so results are bit-identical
// for a given seed regardless of the thread count.
inline std::vector<SituationResult> run_error_study(const std::vector<Situation>& situations,
                                                    const StudyParams& p, std::uint64_t seed) {
    if (p.replications < 1) throw std::invalid_argument("run_error_study: replications must be >= 1");
    if (p.max_error < 1) throw std::invalid_argument("run_error_study: max_error must be >= 1");
    const std::size_t reps = static_cast<std::size_t>(p.replications);
    const std::size_t jobs = situations.size() * reps;
    std::vector<std::array<double, 4>> errors(jobs);

    const RngState base(seed);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t j = cursor.fetch_add(1);
            if (j >= jobs) return;
            const Situation& sit = situations[j / reps];
            errors[j] = detail::replication_errors(sit, p, base.split(j));
        }
    };
    const int nthreads = std::max(1, p.threads);
    if (nthreads == 1 || jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<SituationResult> out;
    out.reserve(situations.size());
    for (std::size_t s = 0; s < situations.size(); ++s) {
        SituationResult sr;
        sr.label = situations[s].label;
        for (int c = 0; c < 4; ++c) {
            ErrorCurve& curve = sr.curves[static_cast<std::size_t>(c)];
            curve.channel = static_cast<SeriesChannel>(c);
            curve.replications = p.replications;
            curve.f.assign(static_cast<std::size_t>(p.max_error) + 1, 0.0);
            for (std::size_t k = 0; k < curve.f.size(); ++k) {
                std::size_t count = 0;
                for (std::size_t r = 0; r < reps; ++r)
                    if (errors[s * reps + r][static_cast<std::size_t>(c)] < static_cast<double>(k))
                        ++count;
                curve.f[k] = static_cast<double>(count) / static_cast<double>(reps);
            }
        }
        out.push_back(std::move(sr));
    }
    return out;
}

// Plot-ready long format: one row per (situation, channel, k).
inline void write_error_csv(std::ostream& os, const std::vector<SituationResult>& results) {
    os << "situation,channel,k,f\n";
    char buf[64];
    for (const SituationResult& sr : results)
        for (const ErrorCurve& c : sr.curves)
            for (std::size_t k = 0; k < c.f.size(); ++k) {
                std::snprintf(buf, sizeof buf, "%.10g", c.f[k]);
                os << sr.label << ',' << series_channel_name(c.channel) << ',' << k << ',' << buf
                   << '\n';
            }
}

}  // namespace polsar
