#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lca/imgio.hpp"
#include "lca/lensdb.hpp"
#include "lca/planes.hpp"
#include "lca/quantify.hpp"
#include "lca/recover.hpp"
#include "lca/synth.hpp"
#include "lca/warp.hpp"

namespace {

using namespace lca;

std::vector<double> parse_doubles(const std::string& s, std::size_t n,
                                  const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stod(tok));
    if (out.size() != n)
        throw std::runtime_error(std::string(what) + ": expected " +
                                 std::to_string(n) + " comma-separated values");
    return out;
}

Coefficients parse_coeffs(const std::string& s, const char* what) {
    const auto v = parse_doubles(s, 4, what);
    return {v[0], v[1], v[2], v[3]};
}

Intrinsics intrinsics_for(const ImageMetadata& meta, int width, int height,
                          const std::string& centre_flag) {
    Intrinsics intr = Intrinsics::centred(width, height);
    if (!centre_flag.empty()) {
        const auto v = parse_doubles(centre_flag, 2, "--centre");
        intr.centre_x = v[0];
        intr.centre_y = v[1];
    } else if (meta.centre_x && meta.centre_y) {
        intr.centre_x = *meta.centre_x;
        intr.centre_y = *meta.centre_y;
    }
    return intr;
}

std::string timestamp_now() {
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH"))
        return rfc3339_utc(std::strtoll(env, nullptr, 10));
    return rfc3339_utc(static_cast<long long>(std::time(nullptr)));
}

std::filesystem::path default_output(const std::filesystem::path& input,
                                     const char* suffix) {
    std::filesystem::path out = input;
    out.replace_extension();
    out += suffix;
    out += input.extension();
    return out;
}

void print_result(const char* pair, const RecoveryResult& r) {
    std::printf("%s: a=%.9g b=%.9g c=%.9g d=%.9g  error=%.9g  evals=%d  %s\n",
                pair, r.coeffs.a, r.coeffs.b, r.coeffs.c, r.coeffs.d,
                r.final_error, r.evaluations,
                r.converged ? "converged" : "not converged");
}

int cmd_recover(const std::string& input, const std::string& db_path,
                const std::string& out_flag, const std::string& centre_flag,
                const std::string& trace_path, bool force,
                bool write_corrected, bool allow_nonconverged) {
    const std::filesystem::path image_path(input);
    RasterInfo info;
    const RgbImage img = read_image(image_path, &info);
    const ImageMetadata meta = read_metadata(sidecar_path_for(image_path));

    if (meta.lca_corrected && !force) {
        std::printf("already corrected (lca_corrected=true); "
                    "skipping (use --force to re-run)\n");
        return 0;
    }

    const Intrinsics intr =
        intrinsics_for(meta, img.width(), img.height(), centre_flag);
    const RecoverySettings settings;
    const auto [rg, bg] = recover_coefficients(img, intr, settings);

    print_result("R-G", rg);
    print_result("B-G", bg);

    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out)
            throw std::runtime_error(trace_path + ": cannot open for writing");
        out << "eval,a,b,c,d,error\n";
        write_trace_csv(rg, out);
        write_trace_csv(bg, out);
    }

    if ((!rg.converged || !bg.converged) && !allow_nonconverged) {
        std::fprintf(stderr, "recovery did not converge within the "
                             "evaluation budget; nothing written "
                             "(--allow-nonconverged to override)\n");
        return 2;
    }

    CorrectionRecord rec;
    rec.params = {meta.lens_id, meta.focal_length_mm, meta.aperture_f,
                  meta.focus_distance_mm};
    rec.rg = rg.coeffs;
    rec.bg = bg.coeffs;
    rec.width = img.width();
    rec.height = img.height();
    rec.centre_x = intr.centre_x;
    rec.centre_y = intr.centre_y;
    rec.created_at = timestamp_now();
    Database db{std::filesystem::path(db_path)};
    db_append(db, rec);
    std::printf("database: appended record for %s\n", meta.lens_id.c_str());

    if (write_corrected) {
        const std::filesystem::path out_path =
            out_flag.empty() ? default_output(image_path, "_corrected")
                             : std::filesystem::path(out_flag);
        const RgbImage corrected =
            correct_image(img, rg.coeffs, bg.coeffs, intr);
        write_image(corrected, out_path, info.depth);
        ImageMetadata out_meta = meta;
        out_meta.centre_x = intr.centre_x;
        out_meta.centre_y = intr.centre_y;
        write_metadata(out_meta, rg.coeffs, bg.coeffs,
                       sidecar_path_for(out_path));
        std::printf("corrected image: %s\n", out_path.string().c_str());
    }
    return 0;
}

int cmd_correct(const std::string& input, const std::string& db_path,
                const std::string& out_flag, const std::string& centre_flag,
                const std::string& weights_flag, bool interpolate) {
    const std::filesystem::path image_path(input);
    RasterInfo info;
    const RgbImage img = read_image(image_path, &info);
    const ImageMetadata meta = read_metadata(sidecar_path_for(image_path));
    const Intrinsics intr =
        intrinsics_for(meta, img.width(), img.height(), centre_flag);

    Database db{std::filesystem::path(db_path)};
    const LensParams q{meta.lens_id, meta.focal_length_mm, meta.aperture_f,
                       meta.focus_distance_mm};
    Coefficients rg, bg;
    if (interpolate) {
        std::tie(rg, bg) = db_interpolate(db, q, intr);
    } else {
        QueryWeights w;
        if (!weights_flag.empty()) {
            const auto v = parse_doubles(weights_flag, 3, "--weights");
            w = {v[0], v[1], v[2]};
        }
        const CorrectionRecord rec = db_nearest(db, q, w);
        rg = rec.rg;
        bg = rec.bg;
    }

    const RgbImage corrected = correct_image(img, rg, bg, intr);
    const std::filesystem::path out_path =
        out_flag.empty() ? default_output(image_path, "_corrected")
                         : std::filesystem::path(out_flag);
    write_image(corrected, out_path, info.depth);
    ImageMetadata out_meta = meta;
    out_meta.centre_x = intr.centre_x;
    out_meta.centre_y = intr.centre_y;
    write_metadata(out_meta, rg, bg, sidecar_path_for(out_path));
    std::printf("corrected image: %s (rg a=%.9g, bg a=%.9g)\n",
                out_path.string().c_str(), rg.a, bg.a);
    return 0;
}

int cmd_distort(const std::string& input, const std::string& out_flag,
                const std::string& centre_flag, const std::string& rg_flag,
                const std::string& bg_flag) {
    const std::filesystem::path image_path(input);
    RasterInfo info;
    const RgbImage img = read_image(image_path, &info);
    const Coefficients rg = parse_coeffs(rg_flag, "--coeffs-rg");
    const Coefficients bg = bg_flag.empty()
                                ? Coefficients::identity()
                                : parse_coeffs(bg_flag, "--coeffs-bg");

    ImageMetadata meta;
    bool have_meta = false;
    const auto sidecar_in = sidecar_path_for(image_path);
    if (std::filesystem::exists(sidecar_in)) {
        meta = read_metadata(sidecar_in);
        have_meta = true;
    }
    Intrinsics intr =
        intrinsics_for(meta, img.width(), img.height(), centre_flag);
    if (!have_meta && centre_flag.empty())
        intr = Intrinsics::centred(img.width(), img.height());

    const RgbImage distorted = apply_lca(img, rg, bg, intr);
    const std::filesystem::path out_path =
        out_flag.empty() ? default_output(image_path, "_distorted")
                         : std::filesystem::path(out_flag);
    write_image(distorted, out_path, info.depth);

    if (have_meta) {
        // Carry the sidecar along, recording the applied ground truth.
        std::ifstream in(sidecar_in);
        nlohmann::json j;
        in >> j;
        j["lca_corrected"] = false;
        j["truth"] = {{"rg", {rg.a, rg.b, rg.c, rg.d}},
                      {"bg", {bg.a, bg.b, bg.c, bg.d}}};
        std::ofstream out(sidecar_path_for(out_path));
        out << j.dump(2) << "\n";
    }
    std::printf("distorted image: %s\n", out_path.string().c_str());
    return 0;
}

int cmd_quantify(const std::string& before, const std::string& after,
                 const std::string& out_path, int window) {
    const RgbImage img_before = read_image(before);
    const RgbImage img_after = read_image(after);
    const Spectrogram s = quantify_pair(img_before, img_after, window);
    std::ofstream out(out_path);
    if (!out)
        throw std::runtime_error(out_path + ": cannot open for writing");
    write_spectrogram_csv(s, out);
    std::printf("spectrogram: %s (%zu bins)\n", out_path.c_str(),
                s.bins.size());
    return 0;
}

int cmd_sweep(const std::string& input, const std::string& out_path,
              const std::string& centre_flag, const std::string& plane,
              int grid_n) {
    const std::filesystem::path image_path(input);
    const RgbImage img = read_image(image_path);
    ImageMetadata meta;
    const auto sidecar_in = sidecar_path_for(image_path);
    if (std::filesystem::exists(sidecar_in))
        meta = read_metadata(sidecar_in);
    const Intrinsics intr =
        intrinsics_for(meta, img.width(), img.height(), centre_flag);

    const Plane ref = equalise_histogram(img.g);
    const Plane work = equalise_histogram(plane == "b" ? img.b : img.r);
    const RecoverySettings settings;
    const GridRange ga{settings.bounds_a.lo, settings.bounds_a.hi, grid_n};
    const GridRange gb{settings.bounds_bcd.lo, settings.bounds_bcd.hi, grid_n};
    const auto grid = sweep_error_surface(work, ref, intr, ga, gb);

    std::ofstream out(out_path);
    if (!out)
        throw std::runtime_error(out_path + ": cannot open for writing");
    out << "a,b,error\n";
    char buf[96];
    for (int ia = 0; ia < ga.count; ++ia) {
        for (int ib = 0; ib < gb.count; ++ib) {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", ga.value(ia),
                          gb.value(ib),
                          grid[static_cast<std::size_t>(ia) * gb.count + ib]);
            out << buf;
        }
    }
    std::printf("error surface: %s (%dx%d)\n", out_path.c_str(), ga.count,
                gb.count);
    return 0;
}

int cmd_synth(const std::string& out_path, const std::string& size,
              int cell, double fg, double bg, bool sensor,
              const std::string& lens_id, const std::string& camera_id,
              double focal, double aperture, double focus) {
    ChequerSpec spec;
    spec.cell = cell;
    spec.fg = fg;
    spec.bg = bg;
    if (!size.empty()) {
        const auto xpos = size.find('x');
        if (xpos == std::string::npos)
            throw std::runtime_error("--size: expected WxH");
        spec.width = std::stoi(size.substr(0, xpos));
        spec.height = std::stoi(size.substr(xpos + 1));
    }
    RgbImage img = render_chequerboard(spec);
    if (sensor)
        img = simulate_sensor(img);
    const std::filesystem::path path(out_path);
    write_image(img, path, 16);

    ImageMetadata meta;
    meta.lens_id = lens_id;
    meta.camera_id = camera_id;
    meta.focal_length_mm = focal;
    meta.aperture_f = aperture;
    meta.focus_distance_mm = focus;
    meta.width = spec.width;
    meta.height = spec.height;
    write_metadata_raw(meta, sidecar_path_for(path));
    std::printf("chequerboard: %s (%dx%d, cell %d)\n", out_path.c_str(),
                spec.width, spec.height, spec.cell);
    return 0;
}

int cmd_db(const std::string& db_path, const std::string& lens_filter) {
    Database db{std::filesystem::path(db_path)};
    const auto records = db.records();
    std::size_t shown = 0;
    for (const auto& rec : records) {
        if (!lens_filter.empty() && rec.params.lens_id != lens_filter)
            continue;
        ++shown;
        std::printf("%s  f=%.6gmm  %c/%.6g  focus=%.6gmm  "
                    "rg=[%.9g %.9g %.9g %.9g]  bg=[%.9g %.9g %.9g %.9g]  %s\n",
                    rec.params.lens_id.c_str(), rec.params.focal_length, 'f',
                    rec.params.aperture, rec.params.focus_distance, rec.rg.a,
                    rec.rg.b, rec.rg.c, rec.rg.d, rec.bg.a, rec.bg.b, rec.bg.c,
                    rec.bg.d, rec.created_at.c_str());
    }
    std::printf("%zu record(s)\n", shown);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lateral chromatic aberration recovery and correction"};
    app.require_subcommand(1);

    std::string input, second_input, db_path, out_path, centre_flag;
    std::string rg_flag, bg_flag, weights_flag, trace_path, plane = "r";
    std::string size_flag, lens_id = "synthetic-lens",
                           camera_id = "synthetic-camera";
    bool force = false, write_corrected = false, allow_nonconverged = false;
    bool interpolate = false, sensor = false;
    int window = 11, grid_n = 41, cell = 32;
    double fg = 1.0, bgv = 0.0, focal = 18.0, aperture = 8.0, focus = 3100.0;

    auto* rec = app.add_subcommand("recover",
                                   "Recover correction coefficients");
    rec->add_option("input", input, "Source image (PPM/PGM)")->required();
    rec->add_option("--db", db_path, "Database file")->required();
    rec->add_option("--out", out_path, "Corrected image path");
    rec->add_option("--centre", centre_flag, "Optical centre x,y");
    rec->add_option("--trace", trace_path, "CSV of objective evaluations");
    rec->add_flag("--force", force, "Re-run even if already corrected");
    rec->add_flag("--write-corrected", write_corrected,
                  "Also emit the corrected image");
    rec->add_flag("--allow-nonconverged", allow_nonconverged,
                  "Keep results that hit the evaluation budget");

    auto* cor = app.add_subcommand("correct", "Correct using the database");
    cor->add_option("input", input, "Source image")->required();
    cor->add_option("--db", db_path, "Database file")->required();
    cor->add_option("--out", out_path, "Output image path");
    cor->add_option("--centre", centre_flag, "Optical centre x,y");
    cor->add_option("--weights", weights_flag,
                    "Nearest-neighbour weights wf,wa,wd");
    cor->add_flag("--interpolate", interpolate,
                  "First-order coefficient interpolation");

    auto* dis = app.add_subcommand("distort", "Apply known distortion");
    dis->add_option("input", input, "Source image")->required();
    dis->add_option("--coeffs-rg", rg_flag, "R-plane coefficients a,b,c,d")
        ->required();
    dis->add_option("--coeffs-bg", bg_flag, "B-plane coefficients a,b,c,d");
    dis->add_option("--out", out_path, "Output image path");
    dis->add_option("--centre", centre_flag, "Optical centre x,y");

    auto* qua = app.add_subcommand("quantify",
                                   "Spatial-frequency change report");
    qua->add_option("before", input, "Reference image")->required();
    qua->add_option("after", second_input, "Comparison image")->required();
    qua->add_option("--out", out_path, "Spectrogram CSV path")->required();
    qua->add_option("--window", window, "Hann window length");

    auto* swe = app.add_subcommand("sweep", "Brute-force error surface");
    swe->add_option("input", input, "Source image")->required();
    swe->add_option("--out", out_path, "Grid CSV path")->required();
    swe->add_option("--centre", centre_flag, "Optical centre x,y");
    swe->add_option("--plane", plane, "Working plane: r or b");
    swe->add_option("--grid", grid_n, "Grid points per axis");

    auto* syn = app.add_subcommand("synth", "Render a chequerboard corpus");
    syn->add_option("--out", out_path, "Output image path")->required();
    syn->add_option("--size", size_flag, "Dimensions WxH");
    syn->add_option("--cell", cell, "Chequer cell size");
    syn->add_option("--fg", fg, "Foreground intensity");
    syn->add_option("--bg", bgv, "Background intensity");
    syn->add_flag("--sensor", sensor, "Simulate Bayer sampling");
    syn->add_option("--lens-id", lens_id, "Sidecar lens identifier");
    syn->add_option("--camera-id", camera_id, "Sidecar camera identifier");
    syn->add_option("--focal", focal, "Sidecar focal length (mm)");
    syn->add_option("--aperture", aperture, "Sidecar aperture (f-number)");
    syn->add_option("--focus", focus, "Sidecar focus distance (mm)");

    std::string lens_filter;
    auto* dbc = app.add_subcommand("db", "List database records");
    dbc->add_option("--db", db_path, "Database file")->required();
    dbc->add_option("--lens", lens_filter, "Filter by lens identifier");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rec->parsed())
            return cmd_recover(input, db_path, out_path, centre_flag,
                               trace_path, force, write_corrected,
                               allow_nonconverged);
        if (cor->parsed())
            return cmd_correct(input, db_path, out_path, centre_flag,
                               weights_flag, interpolate);
        if (dis->parsed())
            return cmd_distort(input, out_path, centre_flag, rg_flag,
                               bg_flag);
        if (qua->parsed())
            return cmd_quantify(input, second_input, out_path, window);
        if (swe->parsed())
            return cmd_sweep(input, out_path, centre_flag, plane, grid_n);
        if (syn->parsed())
            return cmd_synth(out_path, size_flag, cell, fg, bgv, sensor,
                             lens_id, camera_id, focal, aperture, focus);
        if (dbc->parsed())
            return cmd_db(db_path, lens_filter);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
