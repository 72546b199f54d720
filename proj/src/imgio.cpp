#include "lca/imgio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lca {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::filesystem::path& path,
                       const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

// Netpbm token reader: skips whitespace and '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (!std::isspace(ch)) {
            tok.push_back(static_cast<char>(ch));
            break;
        }
    }
    while ((ch = in.get()) != EOF && !std::isspace(ch))
        tok.push_back(static_cast<char>(ch));
    return tok;
}

int parse_positive(const std::string& tok, const std::filesystem::path& path,
                   const char* what) {
    try {
        const long v = std::stol(tok);
        if (v <= 0)
            fail(path, std::string("non-positive ") + what);
        return static_cast<int>(v);
    } catch (const std::invalid_argument&) {
        fail(path, std::string("malformed ") + what);
    } catch (const std::out_of_range&) {
        fail(path, std::string("out-of-range ") + what);
    }
}

std::uint16_t quantise(double v, int maxval) {
    const double q = std::floor(v * maxval + 0.5); // round half up
    return static_cast<std::uint16_t>(std::clamp(q, 0.0, double(maxval)));
}

void write_pnm(const std::filesystem::path& path, const char* magic,
               int width, int height, int channels, int depth,
               const Plane* const planes[3]) {
    if (depth != 8 && depth != 16)
        throw std::invalid_argument("depth must be 8 or 16");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(path, "cannot open for writing");
    const int maxval = depth == 8 ? 255 : 65535;
    out << magic << "\n" << width << " " << height << "\n" << maxval << "\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(width) *
                                   channels * (depth / 8));
    for (int y = 0; y < height; ++y) {
        std::size_t o = 0;
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                const std::uint16_t q = quantise(planes[c]->at(x, y), maxval);
                if (depth == 16)
                    row[o++] = static_cast<unsigned char>(q >> 8);
                row[o++] = static_cast<unsigned char>(q & 0xff);
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        fail(path, "write failed");
}

json coeffs_to_json(const Coefficients& c) {
    return json::array({c.a, c.b, c.c, c.d});
}

Coefficients coeffs_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::runtime_error("coefficient array must have 4 entries");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
            j[3].get<double>()};
}

} // namespace

std::string to_string(Orientation o) {
    switch (o) {
    case Orientation::top_left: return "top-left";
    case Orientation::top_right: return "top-right";
    case Orientation::bottom_right: return "bottom-right";
    case Orientation::bottom_left: return "bottom-left";
    case Orientation::left_top: return "left-top";
    case Orientation::right_top: return "right-top";
    case Orientation::right_bottom: return "right-bottom";
    case Orientation::left_bottom: return "left-bottom";
    }
    return "top-left";
}

Orientation orientation_from_string(const std::string& s) {
    static const std::pair<const char*, Orientation> table[] = {
        {"top-left", Orientation::top_left},
        {"top-right", Orientation::top_right},
        {"bottom-right", Orientation::bottom_right},
        {"bottom-left", Orientation::bottom_left},
        {"left-top", Orientation::left_top},
        {"right-top", Orientation::right_top},
        {"right-bottom", Orientation::right_bottom},
        {"left-bottom", Orientation::left_bottom},
    };
    for (const auto& [name, value] : table)
        if (s == name)
            return value;
    throw std::runtime_error("unknown orientation: " + s);
}

RgbImage read_image(const std::filesystem::path& path, RasterInfo* info) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(path, "cannot open");
    const std::string magic = next_token(in);
    const bool colour = magic == "P6";
    if (!colour && magic != "P5")
        fail(path, "unsupported format (need binary PPM P6 or PGM P5)");
    const int width = parse_positive(next_token(in), path, "width");
    const int height = parse_positive(next_token(in), path, "height");
    const int maxval = parse_positive(next_token(in), path, "maxval");
    if (maxval != 255 && maxval != 65535)
        fail(path, "unsupported maxval (need 255 or 65535)");
    // The single whitespace after maxval was already consumed by the
    // tokeniser; raster data starts here.
    const int channels = colour ? 3 : 1;
    const int bytes_per = maxval == 255 ? 1 : 2;
    const std::size_t row_bytes =
        static_cast<std::size_t>(width) * channels * bytes_per;

    RgbImage img;
    img.r = Plane(width, height);
    img.g = colour ? Plane(width, height) : img.r;
    img.b = colour ? Plane(width, height) : img.r;
    Plane* planes[3] = {&img.r, &img.g, &img.b};

    std::vector<unsigned char> row(row_bytes);
    const double scale = 1.0 / maxval;
    for (int y = 0; y < height; ++y) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(row_bytes));
        if (static_cast<std::size_t>(in.gcount()) != row_bytes)
            fail(path, "truncated raster data");
        std::size_t o = 0;
        for (int x = 0; x < width; ++x) {
            for (int c = 0; c < channels; ++c) {
                unsigned v = row[o++];
                if (bytes_per == 2)
                    v = (v << 8) | row[o++]; // big-endian
                planes[c]->at(x, y) = v * scale;
            }
        }
    }
    if (!colour) {
        img.g = img.r;
        img.b = img.r;
    }
    if (info)
        *info = {width, height, bytes_per * 8, colour};
    return img;
}

void write_image(const RgbImage& img, const std::filesystem::path& path,
                 int depth) {
    img.require_consistent();
    const Plane* planes[3] = {&img.r, &img.g, &img.b};
    write_pnm(path, "P6", img.width(), img.height(), 3, depth, planes);
}

void write_plane(const Plane& p, const std::filesystem::path& path,
                 int depth) {
    const Plane* planes[3] = {&p, nullptr, nullptr};
    write_pnm(path, "P5", p.width, p.height, 1, depth, planes);
}

std::filesystem::path
sidecar_path_for(const std::filesystem::path& image) {
    std::filesystem::path p = image;
    p.replace_extension(".lens.json");
    return p;
}

ImageMetadata read_metadata(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        fail(path, "cannot open sidecar");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(path, std::string("malformed sidecar: ") + e.what());
    }

    auto require = [&](const char* key) -> const json& {
        if (!j.contains(key))
            fail(path, std::string("missing field: ") + key);
        return j.at(key);
    };
    auto positive = [&](const char* key) {
        const double v = require(key).get<double>();
        if (!(v > 0.0))
            fail(path, std::string("non-positive ") + key);
        return v;
    };

    ImageMetadata m;
    m.lens_id = require("lens_id").get<std::string>();
    m.camera_id = require("camera_id").get<std::string>();
    m.focal_length_mm = positive("focal_length_mm");
    m.aperture_f = positive("aperture_f");
    m.focus_distance_mm = positive("focus_distance_mm");
    m.width = require("width").get<int>();
    m.height = require("height").get<int>();
    if (m.width < 1 || m.height < 1)
        fail(path, "non-positive image dimensions");
    if (j.contains("orientation"))
        m.orientation = orientation_from_string(j["orientation"]);
    if (j.contains("lca_corrected"))
        m.lca_corrected = j["lca_corrected"].get<bool>();
    if (j.contains("centre_x"))
        m.centre_x = j["centre_x"].get<double>();
    if (j.contains("centre_y"))
        m.centre_y = j["centre_y"].get<double>();
    if (j.contains("coeffs_rg"))
        m.coeffs_rg = coeffs_from_json(j["coeffs_rg"]);
    if (j.contains("coeffs_bg"))
        m.coeffs_bg = coeffs_from_json(j["coeffs_bg"]);
    return m;
}

void write_metadata_raw(const ImageMetadata& meta,
                        const std::filesystem::path& path) {
    json j;
    j["lens_id"] = meta.lens_id;
    j["camera_id"] = meta.camera_id;
    j["focal_length_mm"] = meta.focal_length_mm;
    j["aperture_f"] = meta.aperture_f;
    j["focus_distance_mm"] = meta.focus_distance_mm;
    j["orientation"] = to_string(meta.orientation);
    j["width"] = meta.width;
    j["height"] = meta.height;
    j["lca_corrected"] = meta.lca_corrected;
    if (meta.centre_x)
        j["centre_x"] = *meta.centre_x;
    if (meta.centre_y)
        j["centre_y"] = *meta.centre_y;
    if (meta.coeffs_rg)
        j["coeffs_rg"] = coeffs_to_json(*meta.coeffs_rg);
    if (meta.coeffs_bg)
        j["coeffs_bg"] = coeffs_to_json(*meta.coeffs_bg);
    std::ofstream out(path);
    if (!out)
        fail(path, "cannot open sidecar for writing");
    out << j.dump(2) << "\n";
    if (!out)
        fail(path, "sidecar write failed");
}

void write_metadata(const ImageMetadata& meta, const Coefficients& coeffs_rg,
                    const Coefficients& coeffs_bg,
                    const std::filesystem::path& path) {
    ImageMetadata m = meta;
    m.lca_corrected = true;
    m.coeffs_rg = coeffs_rg;
    m.coeffs_bg = coeffs_bg;
    write_metadata_raw(m, path);
}

} // namespace lca
