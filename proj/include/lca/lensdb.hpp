#ifndef LCA_LENSDB_HPP
#define LCA_LENSDB_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "lca/warp.hpp"

namespace lca {

struct LensParams {
    std::string lens_id;
    double focal_length = 0.0;   // mm
    double aperture = 0.0;       // f-number
    double focus_distance = 0.0; // mm
};

/// One database row: recovered coefficients bound to the lens parameters
/// they were recovered under.
struct CorrectionRecord {
    LensParams params;
    Coefficients rg;
    Coefficients bg;
    int width = 0;
    int height = 0;
    double centre_x = 0.0;
    double centre_y = 0.0;
    std::string created_at; // RFC-3339 UTC
};

struct QueryWeights {
    double w_focal = 1.0;
    double w_aperture = 1.0;
    double w_focus = 0.25;
};

/// Append-only newline-delimited store of correction records.
class Database {
public:
    explicit Database(std::filesystem::path path) : path_(std::move(path)) {}

    const std::filesystem::path& path() const { return path_; }

    /// Durably append one record (one line).
    void append(const CorrectionRecord& rec) const;

    /// All parseable records, in file order.
    std::vector<CorrectionRecord> records() const;

    /// Weighted log2-distance nearest neighbour among records with the
    /// query's lens_id; ties broken by newest created_at, then file order.
    CorrectionRecord nearest(const LensParams& q, const QueryWeights& w) const;

    /// First-order interpolation: per parameter (aperture, focal length,
    /// focus distance) the bracketing neighbours' polynomials are averaged
    /// at the log-scale position of the query, sampled over normalised
    /// radius [0,1], and refitted as a degree-4 no-constant polynomial.
    std::pair<Coefficients, Coefficients>
    interpolate(const LensParams& q, const Intrinsics& intr) const;

private:
    std::filesystem::path path_;
};

void db_append(const Database& db, const CorrectionRecord& rec);
CorrectionRecord db_nearest(const Database& db, const LensParams& q,
                            const QueryWeights& w);
std::pair<Coefficients, Coefficients>
db_interpolate(const Database& db, const LensParams& q,
               const Intrinsics& intr);

/// RFC-3339 UTC timestamp for the given unix time.
std::string rfc3339_utc(long long unix_seconds);

} // namespace lca

#endif
