// Release gate: nine end-to-end checks covering the numerics, the samplers,
// the estimators, the boundary detector, the edge-error study, and the
// determinism and format guarantees. Prints one timed PASS/FAIL line per
// check and exits with the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <polsar/polsar.hpp>

#include "../support/quadrature.hpp"

namespace {

using namespace polsar;

std::string format(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// ---------------------------------------------------------------------------
// 1. Half-order K against its integral representation
// ---------------------------------------------------------------------------

double k_integral(double a, double z) {
    auto exponent = [&](double t) { return a * t - z * std::cosh(t); };
    const double tstar = std::asinh(a / z);
    const double peak = exponent(tstar);
    double hi = tstar + 1.0;
    while (exponent(hi) > peak - 80.0) hi += 1.0;
    auto f = [&](double t) {
        return 0.5 * (std::exp(a * t - z * std::cosh(t)) + std::exp(-a * t - z * std::cosh(t)));
    };
    return testsupport::integrate(f, 0.0, hi);
}

bool check_bessel(std::string& detail) {
    double worst = 0.0;
    for (int p = 0; p <= 10; ++p)
        for (double nu : {0.1, 1.0, 5.0, 20.0}) {
            const double expect = k_integral(p + 0.5, nu);
            worst = std::max(worst, std::abs(bessel_k_half(p, nu) - expect) / expect);
        }
    detail = format("max rel err %.2e (tol 1e-10)", worst);
    return worst <= 1e-10;
}

// ---------------------------------------------------------------------------
// 2. Density normalization on a 12-point parameter grid per family
// ---------------------------------------------------------------------------

bool check_normalization(std::string& detail) {
    double worst = 0.0;
    auto mass = [&](const std::function<double(double)>& pdf) {
        worst = std::max(worst, std::abs(testsupport::integrate_positive_axis(pdf) - 1.0));
    };

    for (double omega : {0.43, 1.0, 5.0, 10.0, 20.24, 100.0})
        for (double eta : {0.7, 3.0})
            mass([&](double x) { return ig_pdf({omega, eta}, x); });

    for (double alpha : {-2.5, -0.5, 1.5, 3.0})
        for (auto [gamma, lambda] : {std::pair{0.8, 1.2}, {2.0, 0.5}, {1.0, 4.0}})
            mass([&](double x) { return gig_pdf({alpha, gamma, lambda}, x); });

    for (double omega : {1.0, 10.0, 20.24})
        for (double eta : {0.5, 56707.0})
            for (int n : {1, 3})
                mass([&](double z) { return gih_pdf(omega, eta, n, z); });

    detail = format("max |mass-1| %.2e (tol 1e-5)", worst);
    return worst <= 1e-5;
}

// ---------------------------------------------------------------------------
// 3. Sampler/density agreement via Kolmogorov-Smirnov distance
// ---------------------------------------------------------------------------

bool check_ks(std::string& detail) {
    constexpr int kN = 100000;
    double worst = 0.0;
    RngState base(31313u);

    for (double omega : {1.0, 10.0, 20.0}) {
        const IgParams p{omega, 1.0};
        RngState rng = base.split(static_cast<std::uint64_t>(omega));
        std::vector<double> s(kN);
        for (double& v : s) v = sample_ig(p, rng);
        const auto table = testsupport::make_cdf_table(
            [&](double x) { return ig_pdf(p, x); }, 1e-5, 1.0 + 80.0 / omega + 20.0 / std::sqrt(omega), 800);
        worst = std::max(worst, testsupport::ks_statistic(s, [&](double x) { return table(x); }));
    }

    const HermitianCov3 sigma = forest_covariance();
    const double shh = sigma.d[0];
    for (double omega : {1.0, 10.0, 20.0})
        for (int n : {1, 3}) {
            GphSampler gs({sigma, omega}, n);
            RngState rng = base.split(1000 + static_cast<std::uint64_t>(omega) * 10 +
                                      static_cast<std::uint64_t>(n));
            std::vector<double> s(kN);
            for (double& v : s) v = gs.sample(rng).d[0];
            const double hi = shh * (1.0 + 400.0 / (omega * n) + 80.0 / std::sqrt(omega * n));
            const auto table = testsupport::make_cdf_table(
                [&](double z) { return gih_pdf(omega, shh, n, z); }, shh * 1e-6, hi, 1000);
            worst = std::max(worst, testsupport::ks_statistic(s, [&](double x) { return table(x); }));
        }

    detail = format("max KS %.4f (tol 0.015)", worst);
    return worst < 0.015;
}

// ---------------------------------------------------------------------------
// 4. Sample moments of the model diagonals against the closed forms
// ---------------------------------------------------------------------------

bool check_moments(std::string& detail) {
    constexpr int kN = 100000;
    double worst = 0.0;
    RngState base(616161u);
    const std::pair<HermitianCov3, double> configs[] = {
        {forest_covariance(), 5.0},
        {pasture_covariance(), kPastureOmega},
    };
    int split = 0;
    for (const auto& [sigma, omega] : configs) {
        const int n = 3;
        GphSampler gs({sigma, omega}, n);
        RngState rng = base.split(static_cast<std::uint64_t>(split++));
        std::array<double, 3> m1{}, m2{};
        for (int i = 0; i < kN; ++i) {
            const HermitianCov3 z = gs.sample(rng);
            for (int c = 0; c < 3; ++c) {
                m1[c] += z.d[c];
                m2[c] += z.d[c] * z.d[c];
            }
        }
        for (int c = 0; c < 3; ++c) {
            const double e1 = gih_moment(omega, sigma.d[c], n, 1);
            const double e2 = gih_moment(omega, sigma.d[c], n, 2);
            worst = std::max(worst, std::abs(m1[c] / kN - e1) / e1);
            worst = std::max(worst, std::abs(m2[c] / kN - e2) / e2);
        }
    }
    detail = format("max rel err %.4f (tol 0.02)", worst);
    return worst < 0.02;
}

// ---------------------------------------------------------------------------
// 5. Moment estimator accuracy over repeated fits
// ---------------------------------------------------------------------------

bool check_estimator(std::string& detail) {
    constexpr int kRuns = 100, kN = 10000, kLooks = 3;
    const HermitianCov3 sigma = forest_covariance();
    std::array<double, 3> rho_true;
    rho_true[0] = std::abs(sigma.o[0]) / std::sqrt(sigma.d[0] * sigma.d[1]);
    rho_true[1] = std::abs(sigma.o[1]) / std::sqrt(sigma.d[0] * sigma.d[2]);
    rho_true[2] = std::abs(sigma.o[2]) / std::sqrt(sigma.d[1] * sigma.d[2]);

    double worst_omega = 0.0, worst_sigma = 0.0, worst_rho = 0.0;
    RngState base(515151u);
    for (double omega : {1.0, 5.0, 10.0, 20.0}) {
        std::vector<double> werr;
        std::array<std::vector<double>, 3> serr, rerr;
        for (int r = 0; r < kRuns; ++r) {
            RngState rng = base.split(static_cast<std::uint64_t>(omega) * 1000 +
                                      static_cast<std::uint64_t>(r));
            GphSampler gs({sigma, omega}, kLooks);
            std::vector<HermitianCov3> s;
            s.reserve(kN);
            for (int i = 0; i < kN; ++i) s.push_back(gs.sample(rng));
            const FitResult fr = fit_samples(s, kLooks, FitMethod::MeanOfChannels);
            werr.push_back(fr.omega ? std::abs(*fr.omega - omega) / omega : 1e9);
            for (int c = 0; c < 3; ++c) {
                serr[c].push_back(std::abs(fr.sigma.d[c] - sigma.d[c]) / sigma.d[c]);
                rerr[c].push_back(std::abs(std::abs(fr.sigma.o[c]) - rho_true[c]));
            }
        }
        worst_omega = std::max(worst_omega, median(werr));
        for (int c = 0; c < 3; ++c) {
            worst_sigma = std::max(worst_sigma, median(serr[c]));
            worst_rho = std::max(worst_rho, median(rerr[c]));
        }
    }
    detail = format("median errs: omega %.3f (tol 0.10), sigma %.3f (tol 0.05), coeff %.3f (tol 0.05)",
                    worst_omega, worst_sigma, worst_rho);
    return worst_omega < 0.10 && worst_sigma < 0.05 && worst_rho < 0.05;
}

// ---------------------------------------------------------------------------
// 6. Roughness ordering across the three reference textures
// ---------------------------------------------------------------------------

double fit_omega_once(const GphParams& p, int n_samples, RngState& rng) {
    GphSampler gs(p, 3);
    std::vector<HermitianCov3> s;
    s.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) s.push_back(gs.sample(rng));
    const FitResult fr = fit_samples(s, 3, FitMethod::MeanOfChannels);
    return fr.omega ? *fr.omega : -1.0;
}

bool check_ordering(std::string& detail) {
    constexpr int kRuns = 100, kN = 10000;
    int ok = 0;
    RngState base(424242u);
    for (int r = 0; r < kRuns; ++r) {
        RngState rng = base.split(static_cast<std::uint64_t>(r));
        const double wu = fit_omega_once({urban_covariance(), kUrbanOmega}, kN, rng);
        const double wf = fit_omega_once({forest_covariance(), kForestOmega}, kN, rng);
        const double wp = fit_omega_once({pasture_covariance(), kPastureOmega}, kN, rng);
        if (wu > 0.0 && wf > 0.0 && wp > 0.0 && wu < wf && wf < wp) ++ok;
    }
    detail = format("strict ordering in %d/100 runs (need >= 99)", ok);
    return ok >= 99;
}

// ---------------------------------------------------------------------------
// 7. Edge-error study targets with default parameters
// ---------------------------------------------------------------------------

bool check_error_study(std::string& detail) {
    StudyParams params;
    params.threads = 4;
    const auto results = run_error_study(twelve_situations(), params, 20260814u);

    auto combined5 = [&](int i) { return results[static_cast<std::size_t>(i)].curves[3].f[5]; };
    auto max_single5 = [&](int i) {
        const auto& c = results[static_cast<std::size_t>(i)].curves;
        return std::max({c[0].f[5], c[1].f[5], c[2].f[5]});
    };

    int wins = 0;
    for (int i = 0; i < 9; ++i)
        if (combined5(i) >= max_single5(i)) ++wins;

    double min_urban = 1.0;
    for (int i = 0; i < 8; ++i) min_urban = std::min(min_urban, combined5(i));

    const bool hardest = combined5(9) >= std::max(combined5(10), combined5(11));

    detail = format("combined wins %d/9 (need >= 7); min combined f(5) %.3f over I-VIII (need >= 0.8); "
                    "hardest-trio leader %s",
                    wins, min_urban, hardest ? "yes" : "no");
    return wins >= 7 && min_urban >= 0.8 && hardest;
}

// ---------------------------------------------------------------------------
// 8. Disk-phantom boundary recovery
// ---------------------------------------------------------------------------

bool check_disk(std::string& detail) {
    SceneSpec spec;
    spec.width = 160;
    spec.height = 160;
    spec.looks = 3;
    spec.background = {pasture_covariance(), 20.0};
    SceneInsert disk;
    disk.shape = SceneInsert::Shape::Disk;
    disk.cx = 80.0;
    disk.cy = 80.0;
    disk.radius = 30.0;
    disk.params = {urban_covariance(), 1.0};
    spec.inserts.push_back(disk);

    const Polygon seed_square{{50.0, 50.0}, {110.0, 50.0}, {110.0, 110.0}, {50.0, 110.0}};

    std::vector<testsupport::Point2> circle;
    for (int k = 0; k < 512; ++k) {
        const double a = 2.0 * M_PI * k / 512.0;
        circle.push_back({80.0 + 30.0 * std::cos(a), 80.0 + 30.0 * std::sin(a)});
    }

    int ok = 0;
    double worst = 0.0;
    RngState base(20260814u);
    for (std::uint64_t t = 0; t < 50; ++t) {
        RngState rng = base.split(t);
        const RenderedScene scene = render_scene(spec, rng);
        const auto boundaries =
            detect_boundaries(scene.image, {make_manual_seed(seed_square)}, ContourParams{});
        if (!boundaries[0].detected) continue;
        std::vector<testsupport::Point2> outline;
        for (const auto& p : sample_contour(boundaries[0].contour, 512)) outline.push_back({p[0], p[1]});
        const double h = testsupport::hausdorff(outline, circle);
        worst = std::max(worst, h);
        if (h < 4.0) ++ok;
    }
    detail = format("Hausdorff < 4 px in %d/50 runs (need >= 45), worst %.2f", ok, worst);
    return ok >= 45;
}

// ---------------------------------------------------------------------------
// 9. Determinism and format invariants
// ---------------------------------------------------------------------------

bool check_determinism(std::string& detail) {
    std::vector<std::string> bad;

    SceneSpec spec;
    spec.width = 60;
    spec.height = 40;
    spec.looks = 3;
    spec.background = {forest_covariance(), kForestOmega};
    SceneInsert rect;
    rect.shape = SceneInsert::Shape::Rect;
    rect.x = 10;
    rect.y = 10;
    rect.w = 20;
    rect.h = 20;
    rect.params = {urban_covariance(), kUrbanOmega};
    spec.inserts.push_back(rect);

    RngState r1(777u), r2(777u), r3(778u);
    const std::string bytes_a = encode_raster(render_scene(spec, r1).image);
    const std::string bytes_b = encode_raster(render_scene(spec, r2).image);
    const std::string bytes_c = encode_raster(render_scene(spec, r3).image);
    if (bytes_a != bytes_b) bad.push_back("raster bytes differ across identical seeds");
    if (bytes_a == bytes_c) bad.push_back("raster bytes identical across different seeds");
    if (encode_raster(decode_raster(bytes_a)) != bytes_a) bad.push_back("raster round trip not lossless");

    StudyParams sp;
    sp.replications = 8;
    const auto sits = twelve_situations();
    const std::vector<Situation> one{sits[0]};
    sp.threads = 1;
    const auto res1 = run_error_study(one, sp, 123u);
    sp.threads = 4;
    const auto res4 = run_error_study(one, sp, 123u);
    std::ostringstream csv1, csv4;
    write_error_csv(csv1, res1);
    write_error_csv(csv4, res4);
    if (csv1.str() != csv4.str()) bad.push_back("CSV bytes depend on worker count");

    for (const auto& curve : res1[0].curves) {
        if (curve.f.front() != 0.0) bad.push_back("f(0) is not zero");
        if (!std::is_sorted(curve.f.begin(), curve.f.end())) bad.push_back("f curve not monotone");
        if (curve.f.back() > 1.0 + 1e-12) bad.push_back("f exceeds one");
    }

    for (const HermitianCov3& h : {urban_covariance(), forest_covariance(), pasture_covariance()}) {
        const Matrix3c m = reconstruct_full(h);
        const int oi[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (int k = 0; k < 3; ++k) {
            if (m[oi[k][0]][oi[k][1]] != h.o[k] || m[oi[k][1]][oi[k][0]] != std::conj(h.o[k]))
                bad.push_back("Hermitian reconstruction mismatch");
        }
        for (int i = 0; i < 3; ++i)
            if (m[i][i] != Complex{h.d[i], 0.0}) bad.push_back("Hermitian diagonal mismatch");
    }

    std::vector<std::array<double, 2>> pts;
    for (int k = 0; k < 16; ++k) {
        const double a = 2.0 * M_PI * k / 16.0;
        pts.push_back({50.0 + 40.0 * std::cos(a), 50.0 + 40.0 * std::sin(a)});
    }
    for (int degree : {3, 4}) {
        const BSplineContour s = bspline_interpolate_closed(pts, degree);

        double residual = 0.0;
        for (int k = 0; k < 16; ++k) {
            const double t = bspline_interpolation_parameter(k, 16, degree);
            const auto q = bspline_evaluate(s, t);
            residual = std::max(residual, std::hypot(q[0] - pts[static_cast<std::size_t>(k)][0],
                                                     q[1] - pts[static_cast<std::size_t>(k)][1]));
        }
        if (residual > 1e-6) bad.push_back("interpolation residual too large");

        Polygon hull = geom::convex_hull(s.ctrl);
        const Point2 c = geom::polygon_centroid(hull);
        for (auto& v : hull) {
            v[0] = c[0] + (v[0] - c[0]) * (1.0 + 1e-9);
            v[1] = c[1] + (v[1] - c[1]) * (1.0 + 1e-9);
        }
        for (int i = 0; i < 1000; ++i) {
            const auto q = bspline_evaluate(s, i / 1000.0);
            if (!geom::point_in_polygon(hull, q[0], q[1])) {
                bad.push_back("curve escapes its control hull");
                break;
            }
        }
    }

    if (bad.empty()) {
        detail = "rasters, CSVs, round trips, and curve invariants all hold";
        return true;
    }
    detail = bad.front() + format(" (+%zu more)", bad.size() - 1);
    return false;
}

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> checks = {
        {"half-order K vs quadrature", 1.0, check_bessel},
        {"density normalization", 10.0, check_normalization},
        {"sampler vs density (KS)", 30.0, check_ks},
        {"diagonal moment closure", 1800.0, check_moments},
        {"moment estimator accuracy", 1800.0, check_estimator},
        {"texture roughness ordering", 1800.0, check_ordering},
        {"edge-error study targets", 900.0, check_error_study},
        {"disk boundary recovery", 1800.0, check_disk},
        {"determinism and format", 1800.0, check_determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = checks[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (ok && dt > checks[i].budget_seconds) {
            ok = false;
            detail += format(" [exceeded %.0f s budget]", checks[i].budget_seconds);
        }
        std::printf("criterion %zu/9  %-28s %s  %7.2f s  %s\n", i + 1, checks[i].name,
                    ok ? "PASS" : "FAIL", dt, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    }
    std::printf("%d/9 criteria passed\n", 9 - failed);
    return failed;
}
