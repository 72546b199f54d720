#ifndef LCA_TESTS_SUPPORT_HPP
#define LCA_TESTS_SUPPORT_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "lca/image.hpp"
#include "lca/warp.hpp"

namespace lca_tests {

// Scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("lca_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const {
        return path_ / name;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline lca::Plane random_plane(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    lca::Plane p(w, h);
    for (double& v : p.samples)
        v = dist(rng);
    return p;
}

inline lca::RgbImage random_image(int w, int h, std::uint64_t seed) {
    lca::RgbImage img;
    img.r = random_plane(w, h, seed);
    img.g = random_plane(w, h, seed + 1);
    img.b = random_plane(w, h, seed + 2);
    return img;
}

// Numerical inverse of the radial polynomial: the s with radial_map(s) = r,
// found by bisection on [0, 2].
inline double invert_radial_map(double r, const lca::Coefficients& c) {
    double lo = 0.0, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (lca::radial_map(mid, c) < r)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace lca_tests

#endif
