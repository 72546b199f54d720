#include "lca/lensdb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lca {

namespace {

using nlohmann::json;

json coeffs_to_json(const Coefficients& c) {
    return json::array({c.a, c.b, c.c, c.d});
}

Coefficients coeffs_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::runtime_error("coefficient array must have 4 entries");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
            j[3].get<double>()};
}

struct Indexed {
    CorrectionRecord rec;
    std::size_t line = 0;
};

// Newest first: created_at lexicographic (RFC-3339 UTC orders correctly),
// then file position.
bool newer(const Indexed& a, const Indexed& b) {
    if (a.rec.created_at != b.rec.created_at)
        return a.rec.created_at > b.rec.created_at;
    return a.line > b.line;
}

double poly_eval(const Coefficients& c, double r) {
    return r * (c.a + r * (c.b + r * (c.c + r * c.d)));
}

// Least-squares fit of y ~ a r + b r^2 + c r^3 + d r^4 via Householder QR.
Coefficients polyfit_no_constant(const std::vector<double>& r,
                                 const std::vector<double>& y) {
    const std::size_t m = r.size();
    constexpr std::size_t n = 4;
    std::vector<double> a(m * n);
    std::vector<double> rhs = y;
    for (std::size_t i = 0; i < m; ++i) {
        double p = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            p *= r[i];
            a[i * n + j] = p;
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i)
            norm += a[i * n + k] * a[i * n + k];
        norm = std::sqrt(norm);
        if (norm == 0.0)
            continue;
        if (a[k * n + k] > 0.0)
            norm = -norm;
        std::vector<double> v(m, 0.0);
        for (std::size_t i = k; i < m; ++i)
            v[i] = a[i * n + k];
        v[k] -= norm;
        double vtv = 0.0;
        for (std::size_t i = k; i < m; ++i)
            vtv += v[i] * v[i];
        if (vtv == 0.0)
            continue;
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i)
                dot += v[i] * a[i * n + j];
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = k; i < m; ++i)
                a[i * n + j] -= f * v[i];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i)
            dot += v[i] * rhs[i];
        const double f = 2.0 * dot / vtv;
        for (std::size_t i = k; i < m; ++i)
            rhs[i] -= f * v[i];
    }
    std::array<double, n> x{};
    for (std::size_t k = n; k-- > 0;) {
        double sum = rhs[k];
        for (std::size_t j = k + 1; j < n; ++j)
            sum -= a[k * n + j] * x[j];
        x[k] = a[k * n + k] != 0.0 ? sum / a[k * n + k] : 0.0;
    }
    return {x[0], x[1], x[2], x[3]};
}

double get_param(const LensParams& p, int dim) {
    switch (dim) {
    case 0: return p.aperture;
    case 1: return p.focal_length;
    default: return p.focus_distance;
    }
}

} // namespace

std::string rfc3339_utc(long long unix_seconds) {
    const std::time_t t = static_cast<std::time_t>(unix_seconds);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec);
    return buf;
}

void Database::append(const CorrectionRecord& rec) const {
    json p;
    p["lens_id"] = rec.params.lens_id;
    p["focal_length"] = rec.params.focal_length;
    p["aperture"] = rec.params.aperture;
    p["focus_distance"] = rec.params.focus_distance;
    json j;
    j["params"] = p;
    j["rg"] = coeffs_to_json(rec.rg);
    j["bg"] = coeffs_to_json(rec.bg);
    j["width"] = rec.width;
    j["height"] = rec.height;
    j["centre_x"] = rec.centre_x;
    j["centre_y"] = rec.centre_y;
    j["created_at"] = rec.created_at;
    std::ofstream out(path_, std::ios::app);
    if (!out)
        throw std::runtime_error(path_.string() + ": cannot open for append");
    out << j.dump() << "\n";
    out.flush();
    if (!out)
        throw std::runtime_error(path_.string() + ": append failed");
}

std::vector<CorrectionRecord> Database::records() const {
    std::vector<CorrectionRecord> out;
    std::ifstream in(path_);
    if (!in)
        return out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception&) {
            continue; // skip unreadable rows
        }
        CorrectionRecord rec;
        const json& p = j.at("params");
        rec.params.lens_id = p.at("lens_id").get<std::string>();
        rec.params.focal_length = p.at("focal_length").get<double>();
        rec.params.aperture = p.at("aperture").get<double>();
        rec.params.focus_distance = p.at("focus_distance").get<double>();
        rec.rg = coeffs_from_json(j.at("rg"));
        rec.bg = coeffs_from_json(j.at("bg"));
        rec.width = j.value("width", 0);
        rec.height = j.value("height", 0);
        rec.centre_x = j.value("centre_x", 0.0);
        rec.centre_y = j.value("centre_y", 0.0);
        rec.created_at = j.value("created_at", "");
        if (!(rec.params.focal_length > 0.0 && rec.params.aperture > 0.0 &&
              rec.params.focus_distance > 0.0))
            continue;
        out.push_back(std::move(rec));
    }
    return out;
}

CorrectionRecord Database::nearest(const LensParams& q,
                                   const QueryWeights& w) const {
    const auto all = records();
    std::vector<Indexed> matching;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (all[i].params.lens_id == q.lens_id)
            matching.push_back({all[i], i});
    if (matching.empty())
        throw std::runtime_error("no record for lens " + q.lens_id);

    auto dist2 = [&](const LensParams& p) {
        const double df = std::log2(p.focal_length / q.focal_length);
        const double da = std::log2(p.aperture / q.aperture);
        const double dd = std::log2(p.focus_distance / q.focus_distance);
        return w.w_focal * df * df + w.w_aperture * da * da +
               w.w_focus * dd * dd;
    };

    const Indexed* best = &matching.front();
    double best_d = dist2(best->rec.params);
    for (std::size_t i = 1; i < matching.size(); ++i) {
        const double d = dist2(matching[i].rec.params);
        if (d < best_d || (d == best_d && newer(matching[i], *best))) {
            best = &matching[i];
            best_d = d;
        }
    }
    return best->rec;
}

std::pair<Coefficients, Coefficients>
Database::interpolate(const LensParams& q, const Intrinsics&) const {
    const auto all = records();
    std::vector<Indexed> matching;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (all[i].params.lens_id == q.lens_id)
            matching.push_back({all[i], i});
    if (matching.size() < 2)
        throw std::runtime_error("interpolation needs >= 2 records for lens " +
                                 q.lens_id);

    constexpr int kSamples = 33; // radius samples over [0,1]
    std::vector<double> radii, ys_rg, ys_bg;

    // Per parameter: bracketing neighbours, log-scale position, averaged
    // polynomial samples. Parameters without spread contribute nothing.
    for (int dim = 0; dim < 3; ++dim) {
        const double qv = get_param(q, dim);
        const Indexed* lower = nullptr;
        const Indexed* upper = nullptr;
        for (const auto& m : matching) {
            const double v = get_param(m.rec.params, dim);
            if (v <= qv &&
                (!lower || v > get_param(lower->rec.params, dim) ||
                 (v == get_param(lower->rec.params, dim) && newer(m, *lower))))
                lower = &m;
            if (v >= qv &&
                (!upper || v < get_param(upper->rec.params, dim) ||
                 (v == get_param(upper->rec.params, dim) && newer(m, *upper))))
                upper = &m;
        }
        if (!lower)
            lower = upper;
        if (!upper)
            upper = lower;
        const double lv = get_param(lower->rec.params, dim);
        const double uv = get_param(upper->rec.params, dim);
        if (lv == uv)
            continue;
        double t = (std::log2(qv) - std::log2(lv)) /
                   (std::log2(uv) - std::log2(lv));
        t = std::clamp(t, 0.0, 1.0);
        for (int i = 0; i < kSamples; ++i) {
            const double r = static_cast<double>(i) / (kSamples - 1);
            radii.push_back(r);
            ys_rg.push_back((1.0 - t) * poly_eval(lower->rec.rg, r) +
                            t * poly_eval(upper->rec.rg, r));
            ys_bg.push_back((1.0 - t) * poly_eval(lower->rec.bg, r) +
                            t * poly_eval(upper->rec.bg, r));
        }
    }

    if (radii.empty()) {
        // Query coincides with stored parameters in every dimension.
        const CorrectionRecord rec = nearest(q, QueryWeights{});
        return {rec.rg, rec.bg};
    }
    return {polyfit_no_constant(radii, ys_rg),
            polyfit_no_constant(radii, ys_bg)};
}

void db_append(const Database& db, const CorrectionRecord& rec) {
    db.append(rec);
}

CorrectionRecord db_nearest(const Database& db, const LensParams& q,
                            const QueryWeights& w) {
    return db.nearest(q, w);
}

std::pair<Coefficients, Coefficients>
db_interpolate(const Database& db, const LensParams& q,
               const Intrinsics& intr) {
    return db.interpolate(q, intr);
}

} // namespace lca
