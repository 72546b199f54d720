#include "lca/warp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lca {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Per-axis source taps for one output pixel. The sample lies between
// absolute indices i0 (weight 1-w1) and i1 (weight w1).
struct AxisTaps {
    int i0 = 0;
    int i1 = 0;
    double w1 = 0.0;
    bool in = false;
    // Lanczos needs the raw query and mirroring state.
    double q = 0.0;
    int mirror = -1; // reflection constant 2*centre, or -1 for direct taps
};

// Resolve the 1-D sample position centre + d*ratio. The magnitude is folded
// into the positive half-axis and negative offsets are realised by mirroring
// the tap indices, so +/-d produce identical weights; this keeps the warp
// exactly equivariant under 90-degree rotations about a grid-aligned centre.
AxisTaps resolve_axis(double d, double ratio, double centre, int size) {
    const double limit = static_cast<double>(size - 1);
    const double t = d * ratio;
    AxisTaps out;
    if (t < 0.0) {
        const double m2 = centre + centre;
        if (m2 == std::floor(m2) && m2 <= 2.0 * limit) {
            const double q = centre + std::fabs(t);
            if (!(q <= m2 && q >= m2 - limit))
                return out;
            const int i0 = static_cast<int>(std::floor(q));
            const double f = q - i0;
            const int m = static_cast<int>(m2);
            out.i0 = m - i0;
            out.i1 = f > 0.0 ? m - i0 - 1 : m - i0;
            out.w1 = f;
            out.in = true;
            out.q = q;
            out.mirror = m;
            return out;
        }
        // Centre not grid-aligned: evaluate the position directly.
        const double s = centre + t;
        if (!(s >= 0.0 && s <= limit))
            return out;
        const int i0 = static_cast<int>(std::floor(s));
        const double f = s - i0;
        out.i0 = i0;
        out.i1 = f > 0.0 ? i0 + 1 : i0;
        out.w1 = f;
        out.in = true;
        out.q = s;
        return out;
    }
    const double q = centre + t;
    if (!(q >= 0.0 && q <= limit))
        return out;
    const int i0 = static_cast<int>(std::floor(q));
    const double f = q - i0;
    out.i0 = i0;
    out.i1 = f > 0.0 ? i0 + 1 : i0;
    out.w1 = f;
    out.in = true;
    out.q = q;
    return out;
}

double lanczos3(double t) {
    const double a = std::fabs(t);
    if (a >= 3.0)
        return 0.0;
    // Exact sinc zeros at the integer taps, so integer source positions
    // reproduce the sample they land on.
    if (a == std::floor(a))
        return a == 0.0 ? 1.0 : 0.0;
    const double pt = kPi * t;
    return 3.0 * std::sin(pt) * std::sin(pt / 3.0) / (pt * pt);
}

// 6-tap Lanczos along one resolved axis: absolute indices and weights for
// taps floor(q)-2 .. floor(q)+3, mapped through the mirror when active.
int lanczos_taps(const AxisTaps& ax, int size, int idx[6], double w[6]) {
    const int base = static_cast<int>(std::floor(ax.q));
    int n = 0;
    for (int k = base - 2; k <= base + 3; ++k) {
        int j = ax.mirror >= 0 ? ax.mirror - k : k;
        if (j < 0 || j >= size)
            continue;
        idx[n] = j;
        w[n] = lanczos3(ax.q - k);
        ++n;
    }
    return n;
}

double sample_bilinear(const Plane& p, const AxisTaps& x, const AxisTaps& y) {
    const double fx = x.w1;
    const double fy = y.w1;
    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    const double p00 = p.at(x.i0, y.i0);
    const double p10 = p.at(x.i1, y.i0);
    const double p01 = p.at(x.i0, y.i1);
    const double p11 = p.at(x.i1, y.i1);
    // Diagonal pairing keeps both sums invariant under axis swap and
    // reflection; the weight-sum division pins constants exactly.
    const double num = (w00 * p00 + w11 * p11) + (w01 * p01 + w10 * p10);
    const double den = (w00 + w11) + (w01 + w10);
    return std::clamp(num / den, 0.0, 1.0);
}

double sample_lanczos3(const Plane& p, const AxisTaps& x, const AxisTaps& y) {
    int xi[6], yi[6];
    double xw[6], yw[6];
    const int nx = lanczos_taps(x, p.width, xi, xw);
    const int ny = lanczos_taps(y, p.height, yi, yw);
    double acc = 0.0;
    double wsum_y = 0.0;
    double wsum_x = 0.0;
    for (int k = 0; k < nx; ++k)
        wsum_x += xw[k];
    for (int j = 0; j < ny; ++j) {
        double row = 0.0;
        for (int k = 0; k < nx; ++k)
            row += xw[k] * p.at(xi[k], yi[j]);
        acc += yw[j] * row;
        wsum_y += yw[j];
    }
    const double norm = wsum_x * wsum_y;
    if (norm == 0.0)
        return 0.0;
    return std::clamp(acc / norm, 0.0, 1.0);
}

} // namespace

Intrinsics Intrinsics::centred(int width, int height) {
    const double dx = (width - 1) / 2.0;
    const double dy = (height - 1) / 2.0;
    return {dx, dy, std::sqrt(dx * dx + dy * dy)};
}

std::size_t Mask::count_set() const {
    return static_cast<std::size_t>(
        std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double radial_map(double r, const Coefficients& c) {
    return r * (c.a + r * (c.b + r * (c.c + r * c.d)));
}

Plane distort_plane_masked(const Plane& p, const Coefficients& c,
                           const Intrinsics& intr, Interp interp,
                           Mask& mask_out) {
    Plane out(p.width, p.height);
    mask_out = Mask(p.width, p.height);
    const double cx = intr.centre_x;
    const double cy = intr.centre_y;
    const double inv_norm = 1.0 / intr.r_norm;
    for (int y = 0; y < p.height; ++y) {
        const double dy = y - cy;
        const double dy2 = dy * dy;
        for (int x = 0; x < p.width; ++x) {
            const double dx = x - cx;
            const double rn = std::sqrt(dx * dx + dy2) * inv_norm;
            const double ratio = rn > 0.0 ? radial_map(rn, c) / rn : c.a;
            const AxisTaps ax = resolve_axis(dx, ratio, cx, p.width);
            if (!ax.in)
                continue;
            const AxisTaps ay = resolve_axis(dy, ratio, cy, p.height);
            if (!ay.in)
                continue;
            mask_out.set(x, y, true);
            out.at(x, y) = interp == Interp::bilinear
                               ? sample_bilinear(p, ax, ay)
                               : sample_lanczos3(p, ax, ay);
        }
    }
    return out;
}

Plane distort_plane(const Plane& p, const Coefficients& c,
                    const Intrinsics& intr, Interp interp) {
    Mask unused;
    return distort_plane_masked(p, c, intr, interp, unused);
}

Mask compute_mask(int width, int height, const Coefficients& c,
                  const Intrinsics& intr) {
    Mask m(width, height);
    const double cx = intr.centre_x;
    const double cy = intr.centre_y;
    const double inv_norm = 1.0 / intr.r_norm;
    for (int y = 0; y < height; ++y) {
        const double dy = y - cy;
        const double dy2 = dy * dy;
        for (int x = 0; x < width; ++x) {
            const double dx = x - cx;
            const double rn = std::sqrt(dx * dx + dy2) * inv_norm;
            const double ratio = rn > 0.0 ? radial_map(rn, c) / rn : c.a;
            const bool in = resolve_axis(dx, ratio, cx, width).in &&
                            resolve_axis(dy, ratio, cy, height).in;
            m.set(x, y, in);
        }
    }
    return m;
}

RgbImage correct_image(const RgbImage& img, const Coefficients& rg,
                       const Coefficients& bg, const Intrinsics& intr) {
    img.require_consistent();
    RgbImage out;
    out.r = distort_plane(img.r, rg, intr, Interp::lanczos3);
    out.g = img.g;
    out.b = distort_plane(img.b, bg, intr, Interp::lanczos3);
    return out;
}

} // namespace lca
