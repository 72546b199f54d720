#ifndef LCA_QUANTIFY_HPP
#define LCA_QUANTIFY_HPP

#include <ostream>
#include <vector>

#include "lca/image.hpp"

namespace lca {

/// DC-centred log-magnitude map of a zero-padded square DFT.
/// value(u,v) = log((1 + |F(u,v)|) / source_height).
struct MagnitudeMap {
    int n = 0; // square side after padding
    std::vector<double> values;

    double at(int u, int v) const {
        return values[static_cast<std::size_t>(v) * n + u];
    }
};

struct SpectrogramBin {
    double freq_fraction = 0.0; // of Nyquist
    double value = 0.0;
};

/// Radial profile of a magnitude-map difference: per-ring mean, Hann
/// smoothed. bin_counts records the ring populations before averaging.
struct Spectrogram {
    std::vector<SpectrogramBin> bins;
    std::vector<std::size_t> bin_counts;
    int window = 0; // Hann length used
};

/// Zero-pad to n = max(width, height), DFT with 1/(n*n) normalisation,
/// log-magnitude with the pre-pad height as normaliser, DC centred at
/// (n/2, n/2).
MagnitudeMap dft_magnitude(const Plane& lum);

/// Per-pixel a-b binned by integer Euclidean radius from the DC centre
/// (radii >= n/2 discarded), ring means convolved with a normalised Hann
/// window of the given length.
Spectrogram spectrogram_diff(const MagnitudeMap& a, const MagnitudeMap& b,
                             int window);

/// Luminance + DFT of both images, then spectrogram_diff(after, before):
/// positive bins mean frequency gained by `after`.
Spectrogram quantify_pair(const RgbImage& before, const RgbImage& after,
                          int window);

/// CSV with header "freq_fraction,delta", one row per bin, 9 significant
/// digits.
void write_spectrogram_csv(const Spectrogram& s, std::ostream& out);

} // namespace lca

#endif
