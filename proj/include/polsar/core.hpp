#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace polsar {

using Complex = std::complex<double>;

// Single-look scattering vector (HH, HV, VV channels).
struct ScatteringVector {
    Complex hh{};
    Complex hv{};
    Complex vv{};
};

// Compact Hermitian 3x3 matrix: three real diagonal intensities plus the
// three upper off-diagonal entries. Index convention throughout:
//   d[0] = (1,1)  d[1] = (2,2)  d[2] = (3,3)
//   o[0] = (1,2)  o[1] = (1,3)  o[2] = (2,3)
// which for covariance data reads |HH|^2, |HV|^2, |VV|^2, HH*conj(HV),
// HH*conj(VV), HV*conj(VV). The lower triangle is implied by conjugation.
struct HermitianCov3 {
    std::array<double, 3> d{};
    std::array<Complex, 3> o{};

    friend bool operator==(const HermitianCov3& a, const HermitianCov3& b) {
        return a.d == b.d && a.o == b.o;
    }
};

using Matrix3c = std::array<std::array<Complex, 3>, 3>;

// Expands the compact form into a full matrix with the conjugate lower
// triangle filled in.
inline Matrix3c reconstruct_full(const HermitianCov3& h) {
    Matrix3c m;
    m[0][0] = h.d[0];
    m[1][1] = h.d[1];
    m[2][2] = h.d[2];
    m[0][1] = h.o[0];
    m[0][2] = h.o[1];
    m[1][2] = h.o[2];
    m[1][0] = std::conj(h.o[0]);
    m[2][0] = std::conj(h.o[1]);
    m[2][1] = std::conj(h.o[2]);
    return m;
}

// tr(A Z) for Hermitian A and Z. The product trace is real; the imaginary
// parts cancel pairwise, so they are never formed.
inline double trace_product(const HermitianCov3& a, const HermitianCov3& z) {
    double t = a.d[0] * z.d[0] + a.d[1] * z.d[1] + a.d[2] * z.d[2];
    t += 2.0 * (a.o[0].real() * z.o[0].real() + a.o[0].imag() * z.o[0].imag());
    t += 2.0 * (a.o[1].real() * z.o[1].real() + a.o[1].imag() * z.o[1].imag());
    t += 2.0 * (a.o[2].real() * z.o[2].real() + a.o[2].imag() * z.o[2].imag());
    return t;
}

// Determinant of a Hermitian 3x3; real by construction.
inline double hermitian_det(const HermitianCov3& h) {
    const double n0 = std::norm(h.o[0]);
    const double n1 = std::norm(h.o[1]);
    const double n2 = std::norm(h.o[2]);
    const double cross = 2.0 * (h.o[0] * h.o[2] * std::conj(h.o[1])).real();
    return h.d[0] * h.d[1] * h.d[2] - h.d[0] * n2 - h.d[1] * n1 - h.d[2] * n0 + cross;
}

// Sylvester criterion on the leading principal minors.
inline bool is_positive_definite(const HermitianCov3& h) {
    if (!(h.d[0] > 0.0)) return false;
    if (!(h.d[0] * h.d[1] - std::norm(h.o[0]) > 0.0)) return false;
    return hermitian_det(h) > 0.0;
}

struct InverseResult {
    HermitianCov3 inverse;
    double det = 0.0;
};

namespace detail {

// Max |(M * inv - I)| over all entries, used to decide whether the closed
// form was adequate.
inline double inverse_residual(const HermitianCov3& m, const HermitianCov3& inv) {
    const Matrix3c a = reconstruct_full(m);
    const Matrix3c b = reconstruct_full(inv);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            Complex s = 0.0;
            for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
            if (i == j) s -= 1.0;
            worst = std::max(worst, std::abs(s));
        }
    }
    return worst;
}

// Partial-pivot Gauss-Jordan on the full complex matrix; fallback path for
// badly scaled inputs where the adjugate loses digits.
inline bool invert_pivoted(const HermitianCov3& h, HermitianCov3& out, double& det) {
    Matrix3c a = reconstruct_full(h);
    Matrix3c inv{};
    for (int i = 0; i < 3; ++i) inv[i][i] = 1.0;
    Complex d = 1.0;
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) == 0.0) return false;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(inv[piv], inv[col]);
            d = -d;
        }
        d *= a[col][col];
        const Complex scale = 1.0 / a[col][col];
        for (int j = 0; j < 3; ++j) {
            a[col][j] *= scale;
            inv[col][j] *= scale;
        }
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const Complex f = a[r][col];
            if (f == 0.0) continue;
            for (int j = 0; j < 3; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    det = d.real();
    out.d = {inv[0][0].real(), inv[1][1].real(), inv[2][2].real()};
    // Hermitian symmetrization tames roundoff drift between the mirrored
    // entries produced by elimination.
    out.o = {0.5 * (inv[0][1] + std::conj(inv[1][0])), 0.5 * (inv[0][2] + std::conj(inv[2][0])),
             0.5 * (inv[1][2] + std::conj(inv[2][1]))};
    return true;
}

}  // namespace detail

// Inverse and determinant of a positive definite Hermitian 3x3. Closed-form
// adjugate first; if the verification residual is poor, a partial-pivot
// elimination retries. Throws std::domain_error when the matrix is not
// positive definite (det <= 0 or non-finite input).
inline InverseResult invert_and_det(const HermitianCov3& h) {
    const double det = hermitian_det(h);
    if (!std::isfinite(det)) throw std::domain_error("invert_and_det: non-finite matrix");
    if (!(det > 0.0) || !is_positive_definite(h))
        throw std::domain_error("invert_and_det: matrix is not positive definite");

    HermitianCov3 inv;
    inv.d[0] = (h.d[1] * h.d[2] - std::norm(h.o[2])) / det;
    inv.d[1] = (h.d[0] * h.d[2] - std::norm(h.o[1])) / det;
    inv.d[2] = (h.d[0] * h.d[1] - std::norm(h.o[0])) / det;
    inv.o[0] = (h.o[1] * std::conj(h.o[2]) - h.o[0] * h.d[2]) / det;
    inv.o[1] = (h.o[0] * h.o[2] - h.o[1] * h.d[1]) / det;
    inv.o[2] = (h.o[1] * std::conj(h.o[0]) - h.d[0] * h.o[2]) / det;

    const double scale = std::max({std::abs(inv.d[0]), std::abs(inv.d[1]), std::abs(inv.d[2])});
    if (detail::inverse_residual(h, inv) > 1e-9 * std::max(1.0, scale * std::max({h.d[0], h.d[1], h.d[2]}))) {
        HermitianCov3 piv;
        double pdet = 0.0;
        if (detail::invert_pivoted(h, piv, pdet) && detail::inverse_residual(h, piv) < detail::inverse_residual(h, inv))
            return {piv, det};
    }
    return {inv, det};
}

// Multi-look polarimetric image: one Hermitian covariance sample per pixel,
// row-major, plus the number of looks the samples were averaged over.
struct PolSarImage {
    int width = 0;
    int height = 0;
    int looks = 1;
    std::vector<HermitianCov3> data;

    PolSarImage() = default;
    PolSarImage(int w, int h, int n) : width(w), height(h), looks(n), data(checked_extent(w, h, n)) {}

    bool contains(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

    HermitianCov3& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    const HermitianCov3& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

private:
    // Validates before the vector allocates; a negative extent would
    // otherwise surface as a length_error from std::vector.
    static std::size_t checked_extent(int w, int h, int n) {
        if (w <= 0 || h <= 0 || n < 1) throw std::invalid_argument("PolSarImage: bad dimensions");
        return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    }
};

// Model parameter bag: backscatter roughness omega plus the speckle
// covariance Sigma (linear intensity units).
struct GphParams {
    HermitianCov3 sigma;
    double omega = 1.0;
};

}  // namespace polsar
