#include "lca/synth.hpp"

#include <stdexcept>

#include "lca/planes.hpp"

namespace lca {

RgbImage render_chequerboard(const ChequerSpec& spec) {
    if (spec.cell < 2)
        throw std::invalid_argument("chequer cell must be >= 2");
    if (spec.fg == spec.bg)
        throw std::invalid_argument("chequer fg and bg must differ");
    Plane p(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
        const int cy = y / spec.cell;
        for (int x = 0; x < spec.width; ++x) {
            const int cx = x / spec.cell;
            p.at(x, y) = ((cx + cy) % 2 == 0) ? spec.fg : spec.bg;
        }
    }
    RgbImage img;
    img.r = p;
    img.g = p;
    img.b = std::move(p);
    return img;
}

RgbImage apply_lca(const RgbImage& img, const Coefficients& rg,
                   const Coefficients& bg, const Intrinsics& intr) {
    img.require_consistent();
    RgbImage out;
    out.r = distort_plane(img.r, rg, intr, Interp::bilinear);
    out.g = img.g;
    out.b = distort_plane(img.b, bg, intr, Interp::bilinear);
    return out;
}

RgbImage simulate_sensor(const RgbImage& img) {
    return demosaic_bilinear(mosaic(img));
}

} // namespace lca
