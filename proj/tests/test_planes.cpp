#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lca/planes.hpp"
#include "support.hpp"

using namespace lca;
using namespace lca_tests;

namespace {

RgbImage constant_image(int w, int h, double r, double g, double b) {
    RgbImage img;
    img.r = Plane(w, h, r);
    img.g = Plane(w, h, g);
    img.b = Plane(w, h, b);
    return img;
}

// f(x,y) = base + sx*x + sy*y across all channels.
RgbImage ramp_image(int w, int h, double base, double sx, double sy) {
    RgbImage img = constant_image(w, h, 0, 0, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = base + sx * x + sy * y;
            img.r.at(x, y) = v;
            img.g.at(x, y) = v;
            img.b.at(x, y) = v;
        }
    return img;
}

} // namespace

TEST_CASE("mosaic samples the RGGB sites") {
    SUBCASE("uniform grey") {
        const BayerMosaic m = mosaic(constant_image(4, 4, 0.5, 0.5, 0.5));
        for (double v : m.samples)
            CHECK(v == 0.5);
    }
    SUBCASE("pure red leaves only R sites lit") {
        const BayerMosaic m = mosaic(constant_image(4, 4, 1.0, 0.0, 0.0));
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x)
                CHECK(m.at(x, y) == ((x % 2 == 0 && y % 2 == 0) ? 1.0 : 0.0));
    }
    SUBCASE("odd dimensions rejected") {
        CHECK_THROWS(mosaic(constant_image(3, 4, 0, 0, 0)));
        CHECK_THROWS(mosaic(constant_image(4, 5, 0, 0, 0)));
    }
}

TEST_CASE("demosaic reproduces constants exactly") {
    const RgbImage src = constant_image(6, 4, 0.5, 0.5, 0.5);
    const RgbImage out = demosaic_bilinear(mosaic(src));
    CHECK(out.r.samples == src.r.samples);
    CHECK(out.g.samples == src.g.samples);
    CHECK(out.b.samples == src.b.samples);

    const RgbImage chans = constant_image(6, 4, 0.2, 0.7, 0.9);
    const RgbImage out2 = demosaic_bilinear(mosaic(chans));
    for (std::size_t i = 0; i < out2.g.pixel_count(); ++i) {
        CHECK(out2.r.samples[i] == doctest::Approx(0.2));
        CHECK(out2.g.samples[i] == doctest::Approx(0.7));
        CHECK(out2.b.samples[i] == doctest::Approx(0.9));
    }
}

TEST_CASE("demosaic reproduces a horizontal ramp exactly at interior") {
    const int w = 12, h = 8;
    const double step = 0.05;
    const RgbImage src = ramp_image(w, h, 0.1, step, 0.0);
    const RgbImage out = demosaic_bilinear(mosaic(src));
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x) {
            CHECK(out.r.at(x, y) == doctest::Approx(src.r.at(x, y)));
            CHECK(out.g.at(x, y) == doctest::Approx(src.g.at(x, y)));
            CHECK(out.b.at(x, y) == doctest::Approx(src.b.at(x, y)));
        }
}

TEST_CASE("mosaic-demosaic error bounded by the gradient step") {
    const int w = 16, h = 12;
    const double sx = 0.03, sy = 0.01;
    const RgbImage src = ramp_image(w, h, 0.05, sx, sy);
    const RgbImage out = demosaic_bilinear(mosaic(src));
    const double step = sx + sy; // max change across an 8-neighbourhood
    const Plane* pairs[3][2] = {
        {&out.r, &src.r}, {&out.g, &src.g}, {&out.b, &src.b}};
    for (auto& [got, want] : pairs)
        for (std::size_t i = 0; i < got->pixel_count(); ++i)
            CHECK(std::fabs(got->samples[i] - want->samples[i]) <=
                  step + 1e-12);
}

TEST_CASE("equalise_histogram degenerate and two-value cases") {
    SUBCASE("constant plane maps to a constant") {
        const Plane out = equalise_histogram(Plane(8, 8, 0.37));
        for (double v : out.samples)
            CHECK(v == 0.0);
    }
    SUBCASE("balanced two-value plane spreads to full range") {
        Plane p(8, 8);
        for (std::size_t i = 0; i < p.samples.size(); ++i)
            p.samples[i] = (i % 2 == 0) ? 0.25 : 0.75;
        const Plane out = equalise_histogram(p);
        for (std::size_t i = 0; i < p.samples.size(); ++i) {
            if (p.samples[i] == 0.25)
                CHECK(out.samples[i] == doctest::Approx(0.0).epsilon(
                          1.0 / 65536));
            else
                CHECK(out.samples[i] == doctest::Approx(1.0).epsilon(
                          1.0 / 65536));
        }
    }
}

TEST_CASE("equalised uniform noise has near-uniform empirical CDF") {
    const Plane p = random_plane(256, 256, 77);
    const Plane out = equalise_histogram(p);
    std::vector<double> sorted = out.samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    // F(out_k) vs out_k at each sample; ties share the upper rank.
    double worst = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i])
            ++j;
        worst = std::max(worst, std::fabs((j + 1) / n - sorted[i]));
        i = j;
    }
    CHECK(worst <= 2.0 / 65536.0);
}

TEST_CASE("equalise_histogram is monotone non-decreasing") {
    const Plane p = random_plane(64, 64, 31);
    const Plane out = equalise_histogram(p);
    std::vector<std::size_t> order(p.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p.samples[a] < p.samples[b];
    });
    for (std::size_t i = 1; i < order.size(); ++i)
        CHECK(out.samples[order[i - 1]] <= out.samples[order[i]]);
}

TEST_CASE("luminance uses the photopic weights") {
    CHECK(luminance(constant_image(2, 2, 1, 1, 1)).at(0, 0) == 1.0);
    CHECK(luminance(constant_image(2, 2, 1, 0, 0)).at(0, 0) == 0.299);
    CHECK(luminance(constant_image(2, 2, 0, 0, 0)).at(0, 0) == 0.0);
    CHECK(luminance(constant_image(2, 2, 0, 1, 0)).at(0, 0) ==
          doctest::Approx(0.587).epsilon(1e-15));
    CHECK(luminance(constant_image(2, 2, 0, 0, 1)).at(0, 0) ==
          doctest::Approx(0.114).epsilon(1e-15));
}

TEST_CASE("luminance of grey equals the grey value exactly") {
    for (double v : {0.0, 0.1, 1.0 / 3.0, 0.62, 0.9999999, 1.0})
        CHECK(luminance(constant_image(1, 1, v, v, v)).at(0, 0) == v);
}

TEST_CASE("abs_difference basics and symmetry") {
    const Plane zero(4, 4, 0.0);
    const Plane one(4, 4, 1.0);
    SUBCASE("identical planes") {
        const DifferenceMap d = abs_difference(zero, zero);
        for (double v : d.plane.samples)
            CHECK(v == 0.0);
        CHECK_FALSE(d.mean_masked.has_value());
    }
    SUBCASE("unit difference") {
        const DifferenceMap d = abs_difference(one, zero);
        for (double v : d.plane.samples)
            CHECK(v == 1.0);
    }
    SUBCASE("|a-b| == |b-a|") {
        const Plane a = random_plane(9, 7, 3);
        const Plane b = random_plane(9, 7, 4);
        CHECK(abs_difference(a, b).plane.samples ==
              abs_difference(b, a).plane.samples);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS(abs_difference(zero, Plane(4, 5)));
    }
}

TEST_CASE("masked_average") {
    SUBCASE("full mask over zero map") {
        const DifferenceMap d = abs_difference(Plane(4, 4), Plane(4, 4));
        CHECK(masked_average(d, Mask(4, 4, true)) == 0.0);
    }
    SUBCASE("single masked pixel") {
        Plane a(4, 4, 0.0);
        a.at(2, 1) = 0.4;
        const DifferenceMap d = abs_difference(a, Plane(4, 4));
        Mask m(4, 4, false);
        m.set(2, 1, true);
        CHECK(masked_average(d, m) == 0.4);
    }
    SUBCASE("matches an exhaustive loop on a random instance") {
        const Plane a = random_plane(16, 16, 11);
        const Plane b = random_plane(16, 16, 12);
        Mask m(16, 16, false);
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                m.set(x, y, (x * 31 + y * 17) % 3 != 0);
        const DifferenceMap d = abs_difference(a, b);
        double sum = 0.0;
        int count = 0;
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                if (m.get(x, y)) {
                    sum += std::fabs(a.at(x, y) - b.at(x, y));
                    ++count;
                }
        CHECK(masked_average(d, m) ==
              doctest::Approx(sum / count).epsilon(1e-14));
    }
    SUBCASE("empty mask throws") {
        const DifferenceMap d = abs_difference(Plane(4, 4), Plane(4, 4));
        CHECK_THROWS(masked_average(d, Mask(4, 4, false)));
    }
    SUBCASE("full mask equals the plain mean") {
        const Plane a = random_plane(8, 8, 21);
        const Plane b = random_plane(8, 8, 22);
        const DifferenceMap d = abs_difference(a, b);
        double sum = 0.0;
        for (double v : d.plane.samples)
            sum += v;
        CHECK(masked_average(d, Mask(8, 8, true)) ==
              doctest::Approx(sum / 64).epsilon(1e-14));
    }
}

TEST_CASE("difference_area_reduction") {
    const Plane zero(4, 4, 0.0);
    Plane half(4, 4, 0.5);
    const Mask full(4, 4, true);
    const DifferenceMap before = abs_difference(half, zero);
    SUBCASE("no change is 0%") {
        const AreaReduction r =
            difference_area_reduction(before, before, full);
        CHECK(r.percent == 0.0);
        CHECK_FALSE(r.degenerate);
    }
    SUBCASE("perfect correction is 100%") {
        const DifferenceMap after = abs_difference(zero, zero);
        const AreaReduction r = difference_area_reduction(before, after, full);
        CHECK(r.percent == 100.0);
    }
    SUBCASE("worsened alignment goes negative") {
        Plane worse(4, 4, 0.8);
        const DifferenceMap after = abs_difference(worse, zero);
        CHECK(difference_area_reduction(before, after, full).percent < 0.0);
    }
    SUBCASE("zero baseline is degenerate") {
        const DifferenceMap none = abs_difference(zero, zero);
        const AreaReduction r = difference_area_reduction(none, before, full);
        CHECK(r.percent == 0.0);
        CHECK(r.degenerate);
    }
}
