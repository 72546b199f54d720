#ifndef LCA_IMGIO_HPP
#define LCA_IMGIO_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "lca/image.hpp"
#include "lca/warp.hpp"

namespace lca {

enum class Orientation {
    top_left,
    top_right,
    bottom_right,
    bottom_left,
    left_top,
    right_top,
    right_bottom,
    left_bottom,
};

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// Lens/camera parameters carried in the sidecar metadata file.
struct ImageMetadata {
    std::string lens_id;
    std::string camera_id;
    double focal_length_mm = 0.0;
    double aperture_f = 0.0;
    double focus_distance_mm = 0.0;
    Orientation orientation = Orientation::top_left;
    int width = 0;
    int height = 0;
    bool lca_corrected = false;
    std::optional<double> centre_x;
    std::optional<double> centre_y;
    std::optional<Coefficients> coeffs_rg;
    std::optional<Coefficients> coeffs_bg;
};

/// Stored properties of a raster file, reported by read_image.
struct RasterInfo {
    int width = 0;
    int height = 0;
    int depth = 8; // bits per sample: 8 or 16
    bool colour = true;
};

/// Read a binary PPM (P6) or PGM (P5) file, maxval 255 or 65535, scaling
/// samples to [0,1]. Greyscale input replicates into all three planes.
RgbImage read_image(const std::filesystem::path& path,
                    RasterInfo* info = nullptr);

/// Write a binary PPM at the requested depth (8 or 16 bits, 16-bit samples
/// big-endian). Quantisation is round-half-up on v*(2^depth-1).
void write_image(const RgbImage& img, const std::filesystem::path& path,
                 int depth);

/// Write a single plane as binary PGM.
void write_plane(const Plane& p, const std::filesystem::path& path,
                 int depth);

/// Sidecar path for an image: basename with the extension replaced by
/// ".lens.json".
std::filesystem::path sidecar_path_for(const std::filesystem::path& image);

ImageMetadata read_metadata(const std::filesystem::path& path);

/// Write the sidecar with lca_corrected=true and both coefficient quadruples.
void write_metadata(const ImageMetadata& meta, const Coefficients& coeffs_rg,
                    const Coefficients& coeffs_bg,
                    const std::filesystem::path& path);

/// Write the sidecar exactly as given (no corrected flag override).
void write_metadata_raw(const ImageMetadata& meta,
                        const std::filesystem::path& path);

} // namespace lca

#endif
