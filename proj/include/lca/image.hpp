#ifndef LCA_IMAGE_HPP
#define LCA_IMAGE_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lca {

/// Single-channel raster of intensities in [0,1], row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> samples;

    Plane() = default;
    Plane(int w, int h, double fill = 0.0)
        : width(w), height(h),
          samples(static_cast<std::size_t>(check_dims(w, h)) * h, fill) {}

    double& at(int x, int y) {
        return samples[static_cast<std::size_t>(y) * width + x];
    }
    double at(int x, int y) const {
        return samples[static_cast<std::size_t>(y) * width + x];
    }

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
    bool same_size(const Plane& other) const {
        return width == other.width && height == other.height;
    }

private:
    static int check_dims(int w, int h) {
        if (w < 1 || h < 1)
            throw std::invalid_argument("plane dimensions must be >= 1");
        return w;
    }
};

/// Three co-sited colour planes of identical geometry.
struct RgbImage {
    Plane r;
    Plane g;
    Plane b;

    int width() const { return g.width; }
    int height() const { return g.height; }

    bool consistent() const {
        return r.same_size(g) && b.same_size(g);
    }
    void require_consistent() const {
        if (!consistent())
            throw std::invalid_argument("colour planes differ in size");
    }
};

} // namespace lca

#endif
