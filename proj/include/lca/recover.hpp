#ifndef LCA_RECOVER_HPP
#define LCA_RECOVER_HPP

#include <array>
#include <functional>
#include <ostream>
#include <utility>
#include <vector>

#include "lca/image.hpp"
#include "lca/warp.hpp"

namespace lca {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct RecoverySettings {
    Coefficients init{0.99, 0.01, 0.0, 0.0};
    Interval bounds_a{0.95, 1.05};
    Interval bounds_bcd{-0.05, 0.05};
    double fd_step = 1e-4;
    double f_rel_tol = 1e-6;
    int max_evals = 200;
    int history = 10; // quasi-Newton memory
};

struct RecoveryResult {
    Coefficients coeffs;
    double final_error = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::vector<std::pair<Coefficients, double>> trace; // every evaluation
};

using Objective = std::function<double(const Coefficients&)>;

/// Masked inter-plane error: distort work with bilinear interpolation,
/// mask, mean absolute difference against ref.
double objective(const Plane& work, const Plane& ref, const Coefficients& c,
                 const Intrinsics& intr);

/// Box-constrained limited-memory quasi-Newton descent on a derivative-free
/// objective. Gradients via finite differences; every probe stays inside the
/// bound box; the best observed point is returned.
RecoveryResult minimise_bounded(const Objective& f,
                                const RecoverySettings& s);

/// Full recovery: equalise copies of all three planes, then minimise the
/// R-vs-G and B-vs-G objectives. The input image is untouched.
std::pair<RecoveryResult, RecoveryResult>
recover_coefficients(const RgbImage& img, const Intrinsics& intr,
                     const RecoverySettings& s);

struct GridRange {
    double lo = 0.0;
    double hi = 0.0;
    int count = 2;

    double value(int i) const {
        return count < 2 ? lo : lo + (hi - lo) * i / (count - 1);
    }
};

/// Objective evaluated at every (a,b) with c=d=0. Row-major: index
/// ia*grid_b.count + ib.
std::vector<double> sweep_error_surface(const Plane& work, const Plane& ref,
                                        const Intrinsics& intr,
                                        const GridRange& grid_a,
                                        const GridRange& grid_b);

enum class FdScheme { central, forward };

/// Finite-difference gradient with unconstrained probes at step h.
std::array<double, 4> finite_difference_gradient(const Objective& f,
                                                 const Coefficients& x,
                                                 double h, FdScheme scheme);

/// One CSV row per evaluation: "eval,a,b,c,d,error".
void write_trace_csv(const RecoveryResult& r, std::ostream& out);

} // namespace lca

#endif
