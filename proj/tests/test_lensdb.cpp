#include <doctest.h>

#include <cmath>

#include "lca/lensdb.hpp"
#include "support.hpp"

using namespace lca;
using namespace lca_tests;

namespace {

CorrectionRecord make_record(const std::string& lens, double focal,
                             double aperture, double focus,
                             const Coefficients& rg, const Coefficients& bg,
                             const std::string& created) {
    CorrectionRecord rec;
    rec.params = {lens, focal, aperture, focus};
    rec.rg = rg;
    rec.bg = bg;
    rec.width = 1024;
    rec.height = 768;
    rec.centre_x = 511.5;
    rec.centre_y = 383.5;
    rec.created_at = created;
    return rec;
}

const Coefficients kC1{1.011, -0.004, 0.002, -0.001};
const Coefficients kC2{0.985, 0.014, -0.006, 0.003};

} // namespace

TEST_CASE("append then exact query returns the record") {
    TempDir dir("lensdb");
    Database db{dir.file("lens.db")};
    db_append(db, make_record("L1", 18, 8, 3100, kC1, kC2,
                              "2026-01-02T10:00:00Z"));
    const CorrectionRecord got =
        db_nearest(db, {"L1", 18, 8, 3100}, QueryWeights{});
    CHECK(got.rg == kC1);
    CHECK(got.bg == kC2);
    CHECK(got.width == 1024);
}

TEST_CASE("duplicate params: newest wins") {
    TempDir dir("lensdb");
    Database db{dir.file("lens.db")};
    db_append(db, make_record("L1", 18, 8, 3100, kC1, kC1,
                              "2026-01-02T10:00:00Z"));
    db_append(db, make_record("L1", 18, 8, 3100, kC2, kC2,
                              "2026-01-03T10:00:00Z"));
    CHECK(db_nearest(db, {"L1", 18, 8, 3100}, QueryWeights{}).rg == kC2);
}

TEST_CASE("store is an append-only one-record-per-line log") {
    TempDir dir("lensdb");
    Database db{dir.file("lens.db")};
    db_append(db, make_record("L1", 18, 8, 3100, kC1, kC1,
                              "2026-01-02T10:00:00Z"));
    const std::string after_one = slurp(dir.file("lens.db"));
    db_append(db, make_record("L1", 55, 8, 3100, kC2, kC2,
                              "2026-01-03T10:00:00Z"));
    const std::string after_two = slurp(dir.file("lens.db"));

    std::size_t lines = 0;
    for (char ch : after_two)
        if (ch == '\n')
            ++lines;
    CHECK(lines == 2);
    // Earlier bytes never mutate.
    CHECK(after_two.substr(0, after_one.size()) == after_one);
}

TEST_CASE("nearest uses weighted log-scale distances") {
    TempDir dir("lensdb");
    Database db{dir.file("lens.db")};
    db_append(db, make_record("L1", 18, 8, 3100, kC1, kC1,
                              "2026-01-02T10:00:00Z"));
    db_append(db, make_record("L1", 200, 8, 3100, kC2, kC2,
                              "2026-01-03T10:00:00Z"));

    SUBCASE("query at 24mm selects the 18mm record") {
        // |log2(24/18)| = 0.415 < |log2(24/200)| = 3.06
        CHECK(db_nearest(db, {"L1", 24, 8, 3100}, QueryWeights{}).rg == kC1);
    }
    SUBCASE("query at 120mm selects the 200mm record") {
        CHECK(db_nearest(db, {"L1", 120, 8, 3100}, QueryWeights{}).rg == kC2);
    }
    SUBCASE("unknown lens throws") {
        CHECK_THROWS_WITH_AS(db_nearest(db, {"L2", 18, 8, 3100},
                                        QueryWeights{}),
                             doctest::Contains("no record for lens"),
                             std::runtime_error);
    }
}

TEST_CASE("zero weight turns a differing axis into a tie; newest wins") {
    TempDir dir("lensdb");
    Database db{dir.file("lens.db")};
    db_append(db, make_record("L1", 18, 4, 3100, kC1, kC1,
                              "2026-01-02T10:00:00Z"));
    db_append(db, make_record("L1", 18, 16, 3100, kC2, kC2,
                              "2026-01-03T10:00:00Z"));
    const QueryWeights no_aperture{1.0, 0.0, 0.25};
    CHECK(db_nearest(db, {"L1", 18, 8, 3100}, no_aperture).rg == kC2);
}

TEST_CASE("interpolation") {
    TempDir dir("lensdb");
    Database db{dir.file("lens.db")};
    db_append(db, make_record("L1", 18, 8, 3100, kC1, kC2,
                              "2026-01-02T10:00:00Z"));
    db_append(db, make_record("L1", 72, 8, 3100, kC2, kC1,
                              "2026-01-03T10:00:00Z"));
    const Intrinsics intr = Intrinsics::centred(1024, 768);

    SUBCASE("exact at a stored endpoint") {
        const auto [rg, bg] = db_interpolate(db, {"L1", 18, 8, 3100}, intr);
        CHECK(rg.a == doctest::Approx(kC1.a).epsilon(1e-9));
        CHECK(rg.b == doctest::Approx(kC1.b).epsilon(1e-9));
        CHECK(rg.c == doctest::Approx(kC1.c).epsilon(1e-9));
        CHECK(rg.d == doctest::Approx(kC1.d).epsilon(1e-9));
        CHECK(bg.a == doctest::Approx(kC2.a).epsilon(1e-9));
    }
    SUBCASE("log-scale midpoint averages the coefficients") {
        // 36mm is the log2 midpoint of 18mm and 72mm.
        const auto [rg, bg] = db_interpolate(db, {"L1", 36, 8, 3100}, intr);
        CHECK(rg.a == doctest::Approx(0.5 * (kC1.a + kC2.a)).epsilon(1e-9));
        CHECK(rg.b == doctest::Approx(0.5 * (kC1.b + kC2.b)).epsilon(1e-9));
        CHECK(rg.c == doctest::Approx(0.5 * (kC1.c + kC2.c)).epsilon(1e-9));
        CHECK(rg.d == doctest::Approx(0.5 * (kC1.d + kC2.d)).epsilon(1e-9));
        CHECK(bg.a == doctest::Approx(0.5 * (kC1.a + kC2.a)).epsilon(1e-9));
    }
    SUBCASE("a third, farther record is ignored") {
        db_append(db, make_record("L1", 200, 8, 3100,
                                  {1.04, 0.04, 0.04, 0.04},
                                  {1.04, 0.04, 0.04, 0.04},
                                  "2026-01-04T10:00:00Z"));
        const auto [rg, bg] = db_interpolate(db, {"L1", 36, 8, 3100}, intr);
        CHECK(rg.a == doctest::Approx(0.5 * (kC1.a + kC2.a)).epsilon(1e-9));
        CHECK(rg.d == doctest::Approx(0.5 * (kC1.d + kC2.d)).epsilon(1e-9));
    }
    SUBCASE("fewer than two records throws") {
        Database solo{dir.file("solo.db")};
        db_append(solo, make_record("L1", 18, 8, 3100, kC1, kC1,
                                    "2026-01-02T10:00:00Z"));
        CHECK_THROWS(db_interpolate(solo, {"L1", 18, 8, 3100}, intr));
        CHECK_THROWS(db_interpolate(db, {"L9", 18, 8, 3100}, intr));
    }
    SUBCASE("coefficients vary continuously along the parameter path") {
        const int steps = 64;
        Coefficients prev{};
        for (int i = 0; i <= steps; ++i) {
            const double focal =
                18.0 * std::pow(72.0 / 18.0, double(i) / steps);
            const auto [rg, bg] =
                db_interpolate(db, {"L1", focal, 8, 3100}, intr);
            if (i > 0) {
                const double max_total = std::fabs(kC2.a - kC1.a) +
                                         std::fabs(kC2.b - kC1.b) +
                                         std::fabs(kC2.c - kC1.c) +
                                         std::fabs(kC2.d - kC1.d);
                const double jump =
                    std::fabs(rg.a - prev.a) + std::fabs(rg.b - prev.b) +
                    std::fabs(rg.c - prev.c) + std::fabs(rg.d - prev.d);
                CHECK(jump < 10.0 * max_total / steps);
            }
            prev = rg;
        }
    }
}

TEST_CASE("rfc3339 timestamps") {
    CHECK(rfc3339_utc(0) == "1970-01-01T00:00:00Z");
    CHECK(rfc3339_utc(1754700000) == "2025-08-09T00:40:00Z");
}
