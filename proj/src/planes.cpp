#include "lca/planes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace lca {

namespace {

constexpr int kBins = 65536;

int bin_of(double v) {
    const int b = static_cast<int>(v * kBins);
    return std::clamp(b, 0, kBins - 1);
}

// RGGB site colour: 0=R, 1=G, 2=B.
int site_colour(int x, int y) {
    const bool ox = (x & 1) != 0;
    const bool oy = (y & 1) != 0;
    if (!ox && !oy)
        return 0;
    if (ox && oy)
        return 2;
    return 1;
}

double neighbour_average(const BayerMosaic& m,
                         const std::array<std::pair<int, int>, 4>& offsets,
                         int n_offsets, int x, int y) {
    double sum = 0.0;
    int n = 0;
    for (int i = 0; i < n_offsets; ++i) {
        const int nx = x + offsets[i].first;
        const int ny = y + offsets[i].second;
        if (nx < 0 || nx >= m.width || ny < 0 || ny >= m.height)
            continue;
        sum += m.at(nx, ny);
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

constexpr std::array<std::pair<int, int>, 4> kHorizontal{
    {{-1, 0}, {1, 0}, {0, 0}, {0, 0}}};
constexpr std::array<std::pair<int, int>, 4> kVertical{
    {{0, -1}, {0, 1}, {0, 0}, {0, 0}}};
constexpr std::array<std::pair<int, int>, 4> kCross{
    {{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
constexpr std::array<std::pair<int, int>, 4> kDiagonal{
    {{-1, -1}, {1, -1}, {-1, 1}, {1, 1}}};

} // namespace

BayerMosaic mosaic(const RgbImage& img) {
    img.require_consistent();
    const int w = img.width();
    const int h = img.height();
    if (w % 2 != 0 || h % 2 != 0)
        throw std::invalid_argument("mosaic requires even dimensions");
    BayerMosaic m;
    m.width = w;
    m.height = h;
    m.samples.resize(static_cast<std::size_t>(w) * h);
    const Plane* planes[3] = {&img.r, &img.g, &img.b};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            m.samples[static_cast<std::size_t>(y) * w + x] =
                planes[site_colour(x, y)]->at(x, y);
    return m;
}

RgbImage demosaic_bilinear(const BayerMosaic& m) {
    if (m.width < 2 || m.height < 2 || m.width % 2 != 0 || m.height % 2 != 0)
        throw std::invalid_argument("invalid mosaic dimensions");
    RgbImage img;
    img.r = Plane(m.width, m.height);
    img.g = Plane(m.width, m.height);
    img.b = Plane(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            const int site = site_colour(x, y);
            const double v = m.at(x, y);
            const bool red_row = (y & 1) == 0;
            // red
            if (site == 0)
                img.r.at(x, y) = v;
            else if (site == 1)
                img.r.at(x, y) = neighbour_average(
                    m, red_row ? kHorizontal : kVertical, 2, x, y);
            else
                img.r.at(x, y) = neighbour_average(m, kDiagonal, 4, x, y);
            // green
            if (site == 1)
                img.g.at(x, y) = v;
            else
                img.g.at(x, y) = neighbour_average(m, kCross, 4, x, y);
            // blue
            if (site == 2)
                img.b.at(x, y) = v;
            else if (site == 1)
                img.b.at(x, y) = neighbour_average(
                    m, red_row ? kVertical : kHorizontal, 2, x, y);
            else
                img.b.at(x, y) = neighbour_average(m, kDiagonal, 4, x, y);
        }
    }
    return img;
}

Plane equalise_histogram(const Plane& p) {
    std::vector<std::size_t> hist(kBins, 0);
    for (double v : p.samples)
        ++hist[bin_of(v)];

    // Cumulative counts; cdf_min is the cumulative value of the first
    // occupied bin.
    std::vector<std::size_t> cdf(kBins, 0);
    std::size_t running = 0;
    std::size_t cdf_min = 0;
    bool seen = false;
    for (int b = 0; b < kBins; ++b) {
        running += hist[b];
        cdf[b] = running;
        if (!seen && hist[b] > 0) {
            cdf_min = running;
            seen = true;
        }
    }

    const std::size_t n = p.pixel_count();
    Plane out(p.width, p.height);
    if (n == cdf_min) {
        // Single occupied bin: the formula degenerates to 0/0; rank 0.
        std::fill(out.samples.begin(), out.samples.end(), 0.0);
        return out;
    }
    const double denom = static_cast<double>(n - cdf_min);
    for (std::size_t i = 0; i < n; ++i) {
        const double v =
            static_cast<double>(cdf[bin_of(p.samples[i])] - cdf_min) / denom;
        out.samples[i] = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

Plane luminance(const RgbImage& img) {
    img.require_consistent();
    Plane out(img.width(), img.height());
    const std::size_t n = out.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = img.r.samples[i];
        const double g = img.g.samples[i];
        const double b = img.b.samples[i];
        // 0.299 R + 0.587 G + 0.114 B, arranged so grey stays exact.
        out.samples[i] = g + 0.299 * (r - g) + 0.114 * (b - g);
    }
    return out;
}

DifferenceMap abs_difference(const Plane& a, const Plane& b) {
    if (!a.same_size(b))
        throw std::invalid_argument("abs_difference: dimension mismatch");
    DifferenceMap d;
    d.plane = Plane(a.width, a.height);
    const std::size_t n = a.pixel_count();
    for (std::size_t i = 0; i < n; ++i)
        d.plane.samples[i] = std::fabs(a.samples[i] - b.samples[i]);
    return d;
}

double masked_average(const DifferenceMap& d, const Mask& m) {
    if (d.plane.width != m.width || d.plane.height != m.height)
        throw std::invalid_argument("masked_average: dimension mismatch");
    double sum = 0.0;
    std::size_t count = 0;
    const std::size_t n = d.plane.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        if (m.bits[i]) {
            sum += d.plane.samples[i];
            ++count;
        }
    }
    if (count == 0)
        throw std::invalid_argument("masked_average: empty mask");
    return sum / static_cast<double>(count);
}

AreaReduction difference_area_reduction(const DifferenceMap& before,
                                        const DifferenceMap& after,
                                        const Mask& m) {
    const double eb = masked_average(before, m);
    const double ea = masked_average(after, m);
    if (eb == 0.0)
        return {0.0, true};
    return {100.0 * (eb - ea) / eb, false};
}

} // namespace lca
