#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "lca/planes.hpp"
#include "lca/quantify.hpp"
#include "lca/synth.hpp"
#include "support.hpp"

using namespace lca;
using namespace lca_tests;

namespace {

// Direct-summation DFT per the definition, O(n^4); the oracle for
// dft_magnitude on small inputs.
std::vector<std::complex<double>> naive_dft(const Plane& p, int n) {
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n) * n);
    const double norm = 1.0 / (static_cast<double>(n) * n);
    for (int v = 0; v < n; ++v) {
        for (int u = 0; u < n; ++u) {
            std::complex<double> acc(0.0, 0.0);
            for (int y = 0; y < p.height; ++y) {
                for (int x = 0; x < p.width; ++x) {
                    const double ang = -2.0 * M_PI *
                                       (double(u) * x / n + double(v) * y / n);
                    acc += p.at(x, y) *
                           std::complex<double>(std::cos(ang), std::sin(ang));
                }
            }
            out[static_cast<std::size_t>(v) * n + u] = acc * norm;
        }
    }
    return out;
}

} // namespace

TEST_CASE("dft_magnitude of a constant plane") {
    const double v = 0.375;
    const int w = 8, h = 8;
    const MagnitudeMap m = dft_magnitude(Plane(w, h, v));
    const double at_dc = std::log((1.0 + v) / h);
    const double elsewhere = std::log(1.0 / h);
    for (int y = 0; y < m.n; ++y)
        for (int x = 0; x < m.n; ++x) {
            if (x == m.n / 2 && y == m.n / 2)
                CHECK(m.at(x, y) == doctest::Approx(at_dc).epsilon(1e-12));
            else
                CHECK(m.at(x, y) ==
                      doctest::Approx(elsewhere).epsilon(1e-12));
        }
}

TEST_CASE("horizontal cosine produces two symmetric peaks") {
    const int n = 32, k = 5;
    Plane p(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            p.at(x, y) = 0.5 + 0.5 * std::cos(2.0 * M_PI * k * x / n);
    const MagnitudeMap m = dft_magnitude(p);
    const double floor_value = std::log(1.0 / n);
    const int c = n / 2;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const bool peak = (y == c) && (x == c || x == c - k || x == c + k);
            if (peak)
                CHECK(m.at(x, y) > floor_value + 1e-3);
            else
                CHECK(m.at(x, y) ==
                      doctest::Approx(floor_value).epsilon(1e-9));
        }
}

TEST_CASE("dft_magnitude matches the direct-summation oracle") {
    for (auto [w, h, seed] : {std::tuple{8, 8, 40}, {8, 6, 41}, {7, 7, 42}}) {
        const Plane p = random_plane(w, h, seed);
        const MagnitudeMap m = dft_magnitude(p);
        const int n = m.n;
        const auto oracle = naive_dft(p, n);
        const int half = n / 2;
        for (int v = 0; v < n; ++v)
            for (int u = 0; u < n; ++u) {
                const int su = (u - half + n) % n;
                const int sv = (v - half + n) % n;
                const double want = std::log(
                    (1.0 +
                     std::abs(oracle[static_cast<std::size_t>(sv) * n + su])) /
                    h);
                CHECK(m.at(u, v) == doctest::Approx(want).epsilon(1e-9));
            }
    }
}

TEST_CASE("Parseval holds for the raw transform") {
    const Plane p = random_plane(8, 8, 50);
    const MagnitudeMap m = dft_magnitude(p);
    const int n = m.n;
    // Invert the log to recover |F|, then compare energies.
    double freq_energy = 0.0;
    for (double v : m.values) {
        const double mag = p.height * std::exp(v) - 1.0;
        freq_energy += mag * mag;
    }
    double space_energy = 0.0;
    for (double v : p.samples)
        space_energy += v * v;
    CHECK(freq_energy * n * n ==
          doctest::Approx(space_energy).epsilon(1e-9));
}

TEST_CASE("spectrogram_diff basics") {
    const Plane a = random_plane(16, 16, 60);
    const Plane b = random_plane(16, 16, 61);
    const MagnitudeMap ma = dft_magnitude(a);
    const MagnitudeMap mb = dft_magnitude(b);

    SUBCASE("identical maps give an all-zero spectrogram") {
        const Spectrogram s = spectrogram_diff(ma, ma, 11);
        for (const auto& bin : s.bins)
            CHECK(bin.value == 0.0);
    }
    SUBCASE("swapping the maps negates the spectrogram exactly") {
        const Spectrogram s1 = spectrogram_diff(ma, mb, 11);
        const Spectrogram s2 = spectrogram_diff(mb, ma, 11);
        REQUIRE(s1.bins.size() == s2.bins.size());
        for (std::size_t i = 0; i < s1.bins.size(); ++i)
            CHECK(s1.bins[i].value == -s2.bins[i].value);
    }
    SUBCASE("bin layout") {
        const Spectrogram s = spectrogram_diff(ma, mb, 11);
        CHECK(s.bins.size() == static_cast<std::size_t>(16 / 2 + 1));
        for (std::size_t i = 1; i < s.bins.size(); ++i)
            CHECK(s.bins[i].freq_fraction > s.bins[i - 1].freq_fraction);
        CHECK(s.bins.front().freq_fraction == 0.0);
        CHECK(s.bins.back().freq_fraction == 1.0);
    }
    SUBCASE("radial binning conserves samples") {
        const Spectrogram s = spectrogram_diff(ma, mb, 1);
        std::size_t binned = 0;
        for (std::size_t c : s.bin_counts)
            binned += c;
        std::size_t expect = 0;
        const int half = 16 / 2;
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x)
                if (std::hypot(x - half, y - half) < 8.0)
                    ++expect;
        CHECK(binned == expect);
    }
    SUBCASE("dimension mismatch throws") {
        const MagnitudeMap other = dft_magnitude(random_plane(8, 8, 62));
        CHECK_THROWS(spectrogram_diff(ma, other, 11));
    }
}

TEST_CASE("Hann smoothing preserves the sum away from edges") {
    // Build two maps whose ring means live in mid bins only, then compare
    // bin sums with and without smoothing.
    const int n = 64;
    MagnitudeMap a, b;
    a.n = b.n = n;
    a.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    b.values.assign(static_cast<std::size_t>(n) * n, 0.0);
    const int half = n / 2;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double rho = std::hypot(x - half, y - half);
            if (rho >= 12.0 && rho < 20.0)
                a.values[static_cast<std::size_t>(y) * n + x] = 0.25;
        }
    const Spectrogram raw = spectrogram_diff(a, b, 1);
    const Spectrogram smoothed = spectrogram_diff(a, b, 11);
    double sum_raw = 0.0, sum_smooth = 0.0;
    for (std::size_t i = 0; i < raw.bins.size(); ++i) {
        sum_raw += raw.bins[i].value;
        sum_smooth += smoothed.bins[i].value;
    }
    CHECK(sum_smooth == doctest::Approx(sum_raw).epsilon(1e-9));
}

TEST_CASE("quantify_pair") {
    SUBCASE("identical images give exact zeros") {
        const RgbImage img = random_image(24, 18, 70);
        const Spectrogram s = quantify_pair(img, img, 11);
        for (const auto& bin : s.bins)
            CHECK(bin.value == 0.0);
    }
    SUBCASE("dimension mismatch throws") {
        CHECK_THROWS(quantify_pair(random_image(8, 8, 71),
                                   random_image(8, 10, 72), 11));
    }
    SUBCASE("board distortion adds low-frequency luminance content") {
        const ChequerSpec spec{128, 128, 8, 1.0, 0.0};
        const RgbImage board = render_chequerboard(spec);
        const Intrinsics intr = Intrinsics::centred(spec.width, spec.height);
        const RgbImage distorted = apply_lca(board, corpus_rg_distortion(),
                                             corpus_bg_distortion(), intr);
        const Spectrogram s = quantify_pair(board, distorted, 11);
        // Colour fringing introduces luminance ghost edges below 0.15 N.
        double low = 0.0;
        for (const auto& bin : s.bins)
            if (bin.freq_fraction < 0.15)
                low += bin.value;
        CHECK(low > 0.0);
    }
}

TEST_CASE("spectrogram CSV format") {
    const RgbImage img = random_image(8, 8, 73);
    const Spectrogram s = quantify_pair(img, img, 3);
    std::ostringstream out;
    write_spectrogram_csv(s, out);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "freq_fraction,delta");
    std::size_t rows = 0;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == s.bins.size());
}
