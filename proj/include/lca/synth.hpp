#ifndef LCA_SYNTH_HPP
#define LCA_SYNTH_HPP

#include "lca/image.hpp"
#include "lca/warp.hpp"

namespace lca {

struct ChequerSpec {
    int width = 1024;
    int height = 768;
    int cell = 32;    // >= 2
    double fg = 1.0;
    double bg = 0.0;
};

/// Standard synthetic distortions for the validation corpus. The R values
/// follow the chequerboard validation setup; the B values exercise the
/// opposite displacement sense and are a corpus convention only.
inline Coefficients corpus_rg_distortion() { return {0.98, 0.01, -0.01, 0.0}; }
inline Coefficients corpus_bg_distortion() { return {1.02, -0.01, 0.01, 0.0}; }

/// Achromatic chequerboard: fg iff (floor(x/cell)+floor(y/cell)) is even,
/// identical across all three planes.
RgbImage render_chequerboard(const ChequerSpec& spec);

/// Synthetic chromatic aberration: warp R with rg and B with bg (bilinear),
/// G untouched.
RgbImage apply_lca(const RgbImage& img, const Coefficients& rg,
                   const Coefficients& bg, const Intrinsics& intr);

/// Bayer round trip (mosaic then bilinear demosaic): injects realistic
/// interpolation loss into synthetic tests. Requires even dimensions.
RgbImage simulate_sensor(const RgbImage& img);

} // namespace lca

#endif
