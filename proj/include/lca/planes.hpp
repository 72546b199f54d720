#ifndef LCA_PLANES_HPP
#define LCA_PLANES_HPP

#include <optional>

#include "lca/image.hpp"
#include "lca/warp.hpp"

namespace lca {

enum class BayerPattern { rggb };

/// Raw sensor mosaic: one sample per pixel, colour site fixed by position.
struct BayerMosaic {
    int width = 0;  // even
    int height = 0; // even
    BayerPattern pattern = BayerPattern::rggb;
    std::vector<double> samples;

    double at(int x, int y) const {
        return samples[static_cast<std::size_t>(y) * width + x];
    }
};

/// Absolute per-pixel difference of two planes.
struct DifferenceMap {
    Plane plane;
    std::optional<double> mean_masked;
};

struct AreaReduction {
    double percent = 0.0;
    bool degenerate = false; // baseline error was zero
};

/// Sample an RGGB mosaic from full colour planes. Requires even dimensions.
BayerMosaic mosaic(const RgbImage& img);

/// Fill missing colour sites by averaging the nearest same-colour
/// neighbours (2 or 4; borders use the in-bounds subset).
RgbImage demosaic_bilinear(const BayerMosaic& m);

/// Cumulative-distribution histogram equalisation over 65536 bins. The
/// mapping is monotone non-decreasing; a single-bin (constant) plane maps
/// to 0.
Plane equalise_histogram(const Plane& p);

/// Photopic luminance Y = 0.299 R + 0.587 G + 0.114 B. Evaluated so a grey
/// pixel maps to exactly its grey value.
Plane luminance(const RgbImage& img);

DifferenceMap abs_difference(const Plane& a, const Plane& b);

/// Mean of the difference samples over set-mask pixels. Throws on an empty
/// mask.
double masked_average(const DifferenceMap& d, const Mask& m);

/// Percentage drop in masked mean absolute difference from before to after.
/// Negative when the correction worsened alignment; degenerate when the
/// baseline is zero.
AreaReduction difference_area_reduction(const DifferenceMap& before,
                                        const DifferenceMap& after,
                                        const Mask& m);

} // namespace lca

#endif
