#ifndef LCA_WARP_HPP
#define LCA_WARP_HPP

#include <cstdint>
#include <vector>

#include "lca/image.hpp"

namespace lca {

/// Radial polynomial r_out -> a*r + b*r^2 + c*r^3 + d*r^4 on normalised radii.
struct Coefficients {
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;

    static Coefficients identity() { return {1.0, 0.0, 0.0, 0.0}; }

    bool operator==(const Coefficients&) const = default;
};

/// Optical centre and radius normalisation for one image geometry.
struct Intrinsics {
    double centre_x = 0.0;
    double centre_y = 0.0;
    double r_norm = 1.0; // pixels at normalised radius 1

    /// Geometric centre with r_norm set to the half diagonal, so the corner
    /// pixels sit at normalised radius 1.
    static Intrinsics centred(int width, int height);
};

/// Validity bitmap: set bits mark output pixels whose warped source sample
/// lies inside the source plane.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(int w, int h, bool fill = false)
        : width(w), height(h),
          bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    bool get(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count_set() const;
};

enum class Interp { bilinear, lanczos3 };

/// Evaluate the radial polynomial at normalised radius r.
double radial_map(double r, const Coefficients& c);

/// Resample a plane through the radial model (gather: the polynomial maps
/// output radius to source sample radius; angle is preserved). Out-of-bounds
/// sources read as 0; the matching mask marks them invalid.
Plane distort_plane(const Plane& p, const Coefficients& c,
                    const Intrinsics& intr, Interp interp);

/// Mask of output pixels whose bilinear source footprint stays inside
/// [0,width-1] x [0,height-1].
Mask compute_mask(int width, int height, const Coefficients& c,
                  const Intrinsics& intr);

/// One-pass variant producing the resampled plane together with its mask.
Plane distort_plane_masked(const Plane& p, const Coefficients& c,
                           const Intrinsics& intr, Interp interp,
                           Mask& mask_out);

/// Correct an image: R warped with rg, B with bg (Lanczos3), G passed
/// through untouched.
RgbImage correct_image(const RgbImage& img, const Coefficients& rg,
                       const Coefficients& bg, const Intrinsics& intr);

} // namespace lca

#endif
