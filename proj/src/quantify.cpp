#include "lca/quantify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "lca/planes.hpp"

namespace lca {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

// In-place iterative radix-2 transform; sign -1 forward, +1 inverse
// (inverse leaves the 1/n scaling to the caller).
void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Bluestein chirp-z for arbitrary lengths.
void fft_bluestein(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument small.
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang =
            sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> x(m, cplx(0.0, 0.0));
    std::vector<cplx> y(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k)
        x[k] = a[k] * chirp[k];
    y[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k)
        y[k] = y[m - k] = std::conj(chirp[k]);
    fft_pow2(x, -1);
    fft_pow2(y, -1);
    for (std::size_t k = 0; k < m; ++k)
        x[k] *= y[k];
    fft_pow2(x, +1);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k)
        a[k] = x[k] * inv_m * chirp[k];
}

void fft(std::vector<cplx>& a, int sign) {
    if (a.size() < 2)
        return;
    if (is_pow2(a.size()))
        fft_pow2(a, sign);
    else
        fft_bluestein(a, sign);
}

// Forward 2-D transform of an n x n grid, rows then columns.
void fft2d(std::vector<cplx>& grid, int n) {
    std::vector<cplx> line(n);
    for (int y = 0; y < n; ++y) {
        const std::size_t off = static_cast<std::size_t>(y) * n;
        std::copy_n(grid.begin() + off, n, line.begin());
        fft(line, -1);
        std::copy_n(line.begin(), n, grid.begin() + off);
    }
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y)
            line[y] = grid[static_cast<std::size_t>(y) * n + x];
        fft(line, -1);
        for (int y = 0; y < n; ++y)
            grid[static_cast<std::size_t>(y) * n + x] = line[y];
    }
}

} // namespace

MagnitudeMap dft_magnitude(const Plane& lum) {
    const int n = std::max(lum.width, lum.height);
    std::vector<cplx> grid(static_cast<std::size_t>(n) * n, cplx(0.0, 0.0));
    for (int y = 0; y < lum.height; ++y)
        for (int x = 0; x < lum.width; ++x)
            grid[static_cast<std::size_t>(y) * n + x] = cplx(lum.at(x, y), 0.0);
    fft2d(grid, n);

    const double norm = 1.0 / (static_cast<double>(n) * n);
    const double inv_h = 1.0 / lum.height; // pre-pad height normaliser
    MagnitudeMap map;
    map.n = n;
    map.values.resize(grid.size());
    const int half = n / 2;
    for (int v = 0; v < n; ++v) {
        for (int u = 0; u < n; ++u) {
            // DC-centring shift: centred (u,v) reads raw (u-half, v-half).
            const int su = (u - half + n) % n;
            const int sv = (v - half + n) % n;
            const double mag =
                std::abs(grid[static_cast<std::size_t>(sv) * n + su]) * norm;
            map.values[static_cast<std::size_t>(v) * n + u] =
                std::log((1.0 + mag) * inv_h);
        }
    }
    return map;
}

Spectrogram spectrogram_diff(const MagnitudeMap& a, const MagnitudeMap& b,
                             int window) {
    if (a.n != b.n)
        throw std::invalid_argument("spectrogram_diff: dimension mismatch");
    const int n = a.n;
    const int half = n / 2;
    const int nbins = half + 1;
    const double cutoff = n / 2.0;
    std::vector<double> sum(nbins, 0.0);
    std::vector<std::size_t> count(nbins, 0);
    for (int v = 0; v < n; ++v) {
        const double dv = v - half;
        for (int u = 0; u < n; ++u) {
            const double du = u - half;
            const double rho = std::sqrt(du * du + dv * dv);
            if (rho >= cutoff)
                continue;
            const int bin = static_cast<int>(rho);
            const std::size_t i = static_cast<std::size_t>(v) * n + u;
            sum[bin] += a.values[i] - b.values[i];
            ++count[bin];
        }
    }
    std::vector<double> mean(nbins, 0.0);
    for (int bin = 0; bin < nbins; ++bin)
        if (count[bin] > 0)
            mean[bin] = sum[bin] / static_cast<double>(count[bin]);

    // Hann smoothing; edge bins renormalise over the in-range taps.
    std::vector<double> smooth(nbins, 0.0);
    std::vector<double> w;
    double wsum = 0.0;
    if (window > 1) {
        w.resize(window);
        for (int k = 0; k < window; ++k) {
            w[k] = 0.5 * (1.0 - std::cos(2.0 * kPi * k / (window - 1)));
            wsum += w[k];
        }
    }
    if (wsum > 0.0) {
        for (double& x : w)
            x /= wsum;
        const int ci = (window - 1) / 2;
        for (int i = 0; i < nbins; ++i) {
            double acc = 0.0;
            double used = 0.0;
            for (int k = 0; k < window; ++k) {
                const int j = i + k - ci;
                if (j < 0 || j >= nbins)
                    continue;
                acc += w[k] * mean[j];
                used += w[k];
            }
            smooth[i] = used > 0.0 ? acc / used : 0.0;
        }
    } else {
        smooth = mean;
    }

    Spectrogram s;
    s.window = window;
    s.bin_counts = std::move(count);
    s.bins.resize(nbins);
    for (int bin = 0; bin < nbins; ++bin)
        s.bins[bin] = {bin / cutoff, smooth[bin]};
    return s;
}

Spectrogram quantify_pair(const RgbImage& before, const RgbImage& after,
                          int window) {
    before.require_consistent();
    after.require_consistent();
    if (before.width() != after.width() || before.height() != after.height())
        throw std::invalid_argument("quantify_pair: dimension mismatch");
    const MagnitudeMap mb = dft_magnitude(luminance(before));
    const MagnitudeMap ma = dft_magnitude(luminance(after));
    return spectrogram_diff(ma, mb, window);
}

void write_spectrogram_csv(const Spectrogram& s, std::ostream& out) {
    out << "freq_fraction,delta\n";
    char buf[80];
    for (const auto& bin : s.bins) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", bin.freq_fraction,
                      bin.value);
        out << buf;
    }
}

} // namespace lca
