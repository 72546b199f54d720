#include "lca/recover.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <limits>
#include <optional>

#include "lca/planes.hpp"

namespace lca {

namespace {

using Vec4 = std::array<double, 4>;

Vec4 to_vec(const Coefficients& c) { return {c.a, c.b, c.c, c.d}; }
Coefficients to_coeffs(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }

double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double norm2(const Vec4& a) { return std::sqrt(dot(a, a)); }

Vec4 sub(const Vec4& a, const Vec4& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}

struct Pair {
    Vec4 s;
    Vec4 y;
    double rho;
};

using Mat4 = std::array<Vec4, 4>;

Vec4 matvec(const Mat4& m, const Vec4& v) {
    Vec4 out{};
    for (int i = 0; i < 4; ++i)
        out[i] = dot(m[i], v);
    return out;
}

// Initial inverse-Hessian seed: the inverted Gram matrix of the radial
// basis {r, r^2, ..., r^4} sampled over (0,1], normalised to unit spectral
// radius. Directions that barely change the radial map are strongly
// correlated in coefficient space (condition ~1e5); seeding the recursion
// with this metric lets the search move along those valleys immediately.
const Mat4& basis_gram_inverse() {
    static const Mat4 m = [] {
        double g[4][4] = {};
        for (int k = 1; k <= 20; ++k) {
            const double r = k / 20.0;
            const double basis[4] = {r, r * r, r * r * r, r * r * r * r};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    g[i][j] += basis[i] * basis[j];
        }
        // Gauss-Jordan inversion of the 4x4 SPD matrix.
        double aug[4][8] = {};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j)
                aug[i][j] = g[i][j];
            aug[i][4 + i] = 1.0;
        }
        for (int col = 0; col < 4; ++col) {
            int pivot = col;
            for (int row = col + 1; row < 4; ++row)
                if (std::fabs(aug[row][col]) > std::fabs(aug[pivot][col]))
                    pivot = row;
            for (int j = 0; j < 8; ++j)
                std::swap(aug[col][j], aug[pivot][j]);
            const double inv = 1.0 / aug[col][col];
            for (int j = 0; j < 8; ++j)
                aug[col][j] *= inv;
            for (int row = 0; row < 4; ++row) {
                if (row == col)
                    continue;
                const double f = aug[row][col];
                for (int j = 0; j < 8; ++j)
                    aug[row][j] -= f * aug[col][j];
            }
        }
        Mat4 inv;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                inv[i][j] = aug[i][4 + j];
        // Spectral normalisation by power iteration.
        Vec4 v{1.0, 1.0, 1.0, 1.0};
        double lambda = 1.0;
        for (int it = 0; it < 100; ++it) {
            const Vec4 w = matvec(inv, v);
            lambda = norm2(w);
            for (int i = 0; i < 4; ++i)
                v[i] = w[i] / lambda;
        }
        for (auto& row : inv)
            for (double& x : row)
                x /= lambda;
        return inv;
    }();
    return m;
}

// Evaluation bookkeeping: counts, trace, best-so-far. Strictly-less
// comparison keeps the earliest iterate on ties.
struct Evaluator {
    const Objective& f;
    const RecoverySettings& s;
    RecoveryResult& r;
    Vec4 best_x{};
    double best_f = std::numeric_limits<double>::infinity();

    std::optional<double> eval(const Vec4& x) {
        if (r.evaluations >= s.max_evals)
            return std::nullopt;
        const Coefficients c = to_coeffs(x);
        const double v = f(c);
        ++r.evaluations;
        r.trace.emplace_back(c, v);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
        return v;
    }
};

// Two-loop recursion: d = -H g over the stored curvature pairs.
Vec4 lbfgs_direction(const Vec4& g, const std::deque<Pair>& mem) {
    Vec4 q = {-g[0], -g[1], -g[2], -g[3]};
    if (mem.empty())
        return q;
    std::vector<double> alpha(mem.size());
    for (std::size_t i = mem.size(); i-- > 0;) {
        alpha[i] = mem[i].rho * dot(mem[i].s, q);
        for (int k = 0; k < 4; ++k)
            q[k] -= alpha[i] * mem[i].y[k];
    }
    const Pair& last = mem.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q)
        v *= gamma;
    for (std::size_t i = 0; i < mem.size(); ++i) {
        const double beta = mem[i].rho * dot(mem[i].y, q);
        for (int k = 0; k < 4; ++k)
            q[k] += (alpha[i] - beta) * mem[i].s[k];
    }
    return q;
}


// Eigenvectors of the basis metric, stiffest direction first. These are the
// natural axes of the coefficient space: the last one points along the
// near-flat valley of map-equivalent coefficient combinations.
const std::array<Vec4, 4>& basis_metric_eigenvectors() {
    static const std::array<Vec4, 4> eigvecs = [] {
        Mat4 a = basis_gram_inverse();
        Mat4 v = {Vec4{1, 0, 0, 0}, Vec4{0, 1, 0, 0}, Vec4{0, 0, 1, 0},
                  Vec4{0, 0, 0, 1}};
        // Cyclic Jacobi rotations.
        for (int sweep = 0; sweep < 30; ++sweep) {
            for (int p = 0; p < 3; ++p) {
                for (int q = p + 1; q < 4; ++q) {
                    if (std::fabs(a[p][q]) < 1e-15)
                        continue;
                    const double theta =
                        0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
                    const double c = std::cos(theta);
                    const double sn = std::sin(theta);
                    for (int k = 0; k < 4; ++k) {
                        const double akp = a[k][p];
                        const double akq = a[k][q];
                        a[k][p] = c * akp - sn * akq;
                        a[k][q] = sn * akp + c * akq;
                    }
                    for (int k = 0; k < 4; ++k) {
                        const double apk = a[p][k];
                        const double aqk = a[q][k];
                        a[p][k] = c * apk - sn * aqk;
                        a[q][k] = sn * apk + c * aqk;
                        const double vkp = v[k][p];
                        const double vkq = v[k][q];
                        v[k][p] = c * vkp - sn * vkq;
                        v[k][q] = sn * vkp + c * vkq;
                    }
                }
            }
        }
        // Columns of v are eigenvectors; order by eigenvalue ascending so
        // the flat-valley direction comes last.
        std::array<int, 4> order{0, 1, 2, 3};
        std::sort(order.begin(), order.end(),
                  [&](int i, int j) { return a[i][i] < a[j][j]; });
        std::array<Vec4, 4> out{};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k)
                out[i][k] = v[k][order[i]];
        return out;
    }();
    return eigvecs;
}

// Derivative-free line minimisation of f along u from x: expanding probes
// bracket a minimum, golden-section refines it. Updates (x, fx) in place on
// improvement. Returns false when the evaluation budget ran out.
template <typename Project>
bool line_minimise(Evaluator& ev, const Project& project, Vec4& x, double& fx,
                   const Vec4& u, double h0, double t_tol) {
    struct Probe {
        double t = 0.0;
        double f = 0.0;
        Vec4 at{};
    };
    bool budget_out = false;
    auto phi = [&](double t) -> std::optional<Probe> {
        const Vec4 cand = project({x[0] + t * u[0], x[1] + t * u[1],
                                   x[2] + t * u[2], x[3] + t * u[3]});
        if (cand == x)
            return Probe{t, fx, x};
        const auto fc = ev.eval(cand);
        if (!fc) {
            budget_out = true;
            return std::nullopt;
        }
        return Probe{t, *fc, cand};
    };

    // Find an improving side, shrinking the probe if the minimum is close.
    Probe best{0.0, fx, x};
    double h = h0;
    Probe side{};
    bool have_side = false;
    for (int round = 0; round < 4 && !have_side; ++round) {
        const auto plus = phi(h);
        if (!plus)
            return false;
        if (plus->f < best.f) {
            side = *plus;
            have_side = true;
            break;
        }
        const auto minus = phi(-h);
        if (!minus)
            return false;
        if (minus->f < best.f) {
            side = *minus;
            have_side = true;
            break;
        }
        h *= 0.25;
        if (h < t_tol)
            break;
    }
    if (!have_side)
        return !budget_out;

    // Expand until the function turns upward.
    Probe inner = best;
    Probe mid = side;
    Probe outer{};
    bool bracketed = false;
    for (int i = 0; i < 24; ++i) {
        const auto next = phi(2.0 * mid.t);
        if (!next)
            return false;
        if (next->f < mid.f && next->at != mid.at) {
            inner = mid;
            mid = *next;
        } else {
            outer = *next;
            bracketed = true;
            break;
        }
    }
    if (!bracketed) {
        // Ran against the box; keep the best expansion point.
        x = mid.at;
        fx = mid.f;
        return true;
    }

    // Golden-section refinement of [inner, mid, outer].
    constexpr double kGolden = 0.3819660112501051;
    double a = std::min(inner.t, outer.t);
    double b = std::max(inner.t, outer.t);
    Probe lowest = mid;
    for (int i = 0; i < 48 && (b - a) > t_tol; ++i) {
        const bool left_wide = (lowest.t - a) > (b - lowest.t);
        const double t_new = left_wide ? lowest.t - kGolden * (lowest.t - a)
                                       : lowest.t + kGolden * (b - lowest.t);
        const auto probe = phi(t_new);
        if (!probe)
            return false;
        if (probe->f < lowest.f) {
            if (t_new < lowest.t)
                b = lowest.t;
            else
                a = lowest.t;
            lowest = *probe;
        } else {
            if (t_new < lowest.t)
                a = t_new;
            else
                b = t_new;
        }
    }
    if (lowest.f < fx) {
        x = lowest.at;
        fx = lowest.f;
    }
    return true;
}

} // namespace

double objective(const Plane& work, const Plane& ref, const Coefficients& c,
                 const Intrinsics& intr) {
    if (!work.same_size(ref))
        throw std::invalid_argument("objective: dimension mismatch");
    Mask mask;
    const Plane distorted =
        distort_plane_masked(work, c, intr, Interp::bilinear, mask);
    double sum = 0.0;
    std::size_t count = 0;
    const std::size_t n = distorted.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        if (mask.bits[i]) {
            sum += std::fabs(distorted.samples[i] - ref.samples[i]);
            ++count;
        }
    }
    if (count == 0)
        throw std::runtime_error("objective: empty mask");
    return sum / static_cast<double>(count);
}

std::array<double, 4> finite_difference_gradient(const Objective& f,
                                                 const Coefficients& x,
                                                 double h, FdScheme scheme) {
    const Vec4 v = to_vec(x);
    std::array<double, 4> g{};
    const double f0 =
        scheme == FdScheme::forward ? f(x) : 0.0;
    for (int i = 0; i < 4; ++i) {
        Vec4 p = v;
        p[i] = v[i] + h;
        const double fp = f(to_coeffs(p));
        if (scheme == FdScheme::forward) {
            g[i] = (fp - f0) / h;
        } else {
            p[i] = v[i] - h;
            const double fm = f(to_coeffs(p));
            g[i] = (fp - fm) / (2.0 * h);
        }
    }
    return g;
}

RecoveryResult minimise_bounded(const Objective& f,
                                const RecoverySettings& s) {
    const Vec4 lo = {s.bounds_a.lo, s.bounds_bcd.lo, s.bounds_bcd.lo,
                     s.bounds_bcd.lo};
    const Vec4 hi = {s.bounds_a.hi, s.bounds_bcd.hi, s.bounds_bcd.hi,
                     s.bounds_bcd.hi};
    auto project = [&](Vec4 x) {
        for (int i = 0; i < 4; ++i)
            x[i] = std::clamp(x[i], lo[i], hi[i]);
        return x;
    };

    RecoveryResult result;
    Evaluator ev{f, s, result};

    Vec4 x = project(to_vec(s.init));
    auto fx_opt = ev.eval(x);
    if (!fx_opt) {
        result.coeffs = to_coeffs(x);
        return result;
    }
    double fx = *fx_opt;
    bool converged = false;

    // Bounds-aware finite differences: central inside the box, one-sided at
    // an active bound. Returns nullopt when the budget runs out.
    auto gradient = [&](const Vec4& at, double f_at) -> std::optional<Vec4> {
        Vec4 g{};
        const double h = s.fd_step;
        for (int i = 0; i < 4; ++i) {
            Vec4 p = at;
            const bool up_ok = at[i] + h <= hi[i];
            const bool down_ok = at[i] - h >= lo[i];
            if (up_ok && down_ok) {
                p[i] = at[i] + h;
                const auto fp = ev.eval(p);
                if (!fp)
                    return std::nullopt;
                p[i] = at[i] - h;
                const auto fm = ev.eval(p);
                if (!fm)
                    return std::nullopt;
                g[i] = (*fp - *fm) / (2.0 * h);
            } else if (up_ok) {
                p[i] = at[i] + h;
                const auto fp = ev.eval(p);
                if (!fp)
                    return std::nullopt;
                g[i] = (*fp - f_at) / h;
            } else {
                p[i] = at[i] - h;
                const auto fm = ev.eval(p);
                if (!fm)
                    return std::nullopt;
                g[i] = (f_at - *fm) / h;
            }
        }
        return g;
    };

    // Zero direction components that push an active bound outward.
    auto prune = [&](Vec4 d, const Vec4& at) {
        for (int i = 0; i < 4; ++i)
            if ((at[i] <= lo[i] && d[i] < 0.0) ||
                (at[i] >= hi[i] && d[i] > 0.0))
                d[i] = 0.0;
        return d;
    };

    constexpr double kArmijo = 1e-4;

    // Phase 1: projected limited-memory quasi-Newton with the basis-metric
    // seed. Runs on half the budget; a line-search stall hands over to the
    // refinement phase rather than terminating.
    const int phase1_budget = std::min(s.max_evals / 2, 120);
    std::deque<Pair> memory;
    auto g_opt = gradient(x, fx);
    if (g_opt) {
        Vec4 g = *g_opt;
        while (result.evaluations < phase1_budget && !converged) {
            Vec4 d = prune(lbfgs_direction(g, memory), x);
            if (dot(g, d) >= 0.0) {
                memory.clear();
                d = prune({-g[0], -g[1], -g[2], -g[3]}, x);
            }
            if (norm2(d) == 0.0) {
                converged = true;
                break;
            }
            {
                // Cap the step so a bad curvature model cannot fling the
                // iterate across the box.
                const double cap = memory.empty() ? 0.005 : 0.02;
                const double dn = norm2(d);
                if (dn > cap)
                    for (double& v : d)
                        v *= cap / dn;
            }

            double alpha = 1.0;
            Vec4 x_new = x;
            double f_new = fx;
            bool accepted = false;
            bool budget_out = false;
            for (int ls = 0; ls < 12; ++ls) {
                const Vec4 cand = project({x[0] + alpha * d[0],
                                           x[1] + alpha * d[1],
                                           x[2] + alpha * d[2],
                                           x[3] + alpha * d[3]});
                const Vec4 step = sub(cand, x);
                if (norm2(step) == 0.0)
                    break;
                const auto fc = ev.eval(cand);
                if (!fc) {
                    budget_out = true;
                    break;
                }
                const double slope = dot(g, step);
                if (*fc < fx && *fc <= fx + kArmijo * slope) {
                    x_new = cand;
                    f_new = *fc;
                    accepted = true;
                    break;
                }
                // Quadratic-interpolation backtrack, clamped to [0.1, 0.5].
                double shrink = 0.5;
                if (slope < 0.0) {
                    const double denom = 2.0 * (*fc - fx - slope);
                    if (denom > 0.0)
                        shrink = std::clamp(-slope / denom, 0.1, 0.5);
                }
                alpha *= shrink;
            }
            if (budget_out || !accepted)
                break;

            const double rel = (fx - f_new) / std::max(std::fabs(fx), 1e-30);
            if (rel < 1e-3) {
                // Progress is slowing; the refinement phase localises the
                // minimum far more cheaply than further gradient steps.
                x = x_new;
                fx = f_new;
                break;
            }
            const Vec4 step = sub(x_new, x);
            const auto g_new_opt = gradient(x_new, f_new);
            if (!g_new_opt) {
                x = x_new;
                fx = f_new;
                break;
            }
            const Vec4 g_new = *g_new_opt;
            const Vec4 yv = sub(g_new, g);
            const double sy = dot(step, yv);
            if (sy > 1e-12 * norm2(step) * norm2(yv)) {
                memory.push_back({step, yv, 1.0 / sy});
                while (static_cast<int>(memory.size()) > s.history)
                    memory.pop_front();
            }
            x = x_new;
            fx = f_new;
            g = g_new;
        }
    }
    x = ev.best_x;
    fx = ev.best_f;
    if (std::getenv("LCA_OPT_DEBUG"))
        std::fprintf(stderr,
                     "[phase1 end] evals=%d f=%.8g x=(%.6f %.6f %.6f %.6f)\n",
                     result.evaluations, fx, x[0], x[1], x[2], x[3]);

    // Phases 2 and 3: derivative-free refinement. Gradient steps stall on
    // the crease minima of the absolute-difference objective, so parabolic
    // probes along the basis-metric eigendirections localise the minimum
    // (phase 2), and a broad scan along the flattest directions hops the
    // interpolation-noise ripples that trap purely local descent (phase 3).
    {
        std::array<Vec4, 5> dirs{};
        std::copy(basis_metric_eigenvectors().begin(),
                  basis_metric_eigenvectors().end(), dirs.begin());
        dirs[4] = dirs[3];
        constexpr double kSpanFloor = 1e-5;
        bool budget_out = false;
        auto try_point = [&](const Vec4& cand) -> bool {
            // Evaluates cand and moves to it on strict improvement.
            if (cand == x)
                return false;
            const auto fc = ev.eval(cand);
            if (!fc) {
                budget_out = true;
                return false;
            }
            if (*fc < fx) {
                x = cand;
                fx = *fc;
                return true;
            }
            return false;
        };

        // One parabolic-probe pass over the direction set with pattern
        // moves; halves the span when progress stops. Returns true when a
        // finest-span sweep improved less than the relative tolerance.
        auto refine = [&](double span) -> bool {
            while (result.evaluations < s.max_evals && !budget_out) {
                const Vec4 sweep_start = x;
                const double f_start = fx;
                for (int k = 0; k < 5 && !budget_out; ++k) {
                    const Vec4& u = dirs[k];
                    auto at = [&](double t) {
                        return project({x[0] + t * u[0], x[1] + t * u[1],
                                        x[2] + t * u[2], x[3] + t * u[3]});
                    };
                    const Vec4 cp = at(span);
                    const Vec4 cm = at(-span);
                    const auto fp =
                        cp == x ? std::optional<double>(fx) : ev.eval(cp);
                    if (!fp) {
                        budget_out = true;
                        break;
                    }
                    const auto fm =
                        cm == x ? std::optional<double>(fx) : ev.eval(cm);
                    if (!fm) {
                        budget_out = true;
                        break;
                    }
                    // Parabola through the three probes; jump to its
                    // minimum when convex and the jump stays bracketed.
                    const double denom = *fp - 2.0 * fx + *fm;
                    double t_star = 0.0;
                    if (denom > 0.0)
                        t_star =
                            std::clamp(0.5 * span * (*fm - *fp) / denom,
                                       -4.0 * span, 4.0 * span);
                    const double f_base = fx;
                    if (t_star != 0.0 && std::fabs(t_star) != span)
                        try_point(at(t_star));
                    if (budget_out)
                        break;
                    // Fall back to the better probe if the jump did not
                    // help.
                    if (fx >= f_base) {
                        if (*fp < fx)
                            x = cp, fx = *fp;
                        if (*fm < fx)
                            x = cm, fx = *fm;
                    }
                }
                if (budget_out)
                    return false;
                // Pattern move: double down on the sweep displacement.
                Vec4 net = sub(x, sweep_start);
                for (int hop = 0; hop < 6 && norm2(net) > 0.0; ++hop) {
                    const Vec4 cand =
                        project({x[0] + net[0], x[1] + net[1], x[2] + net[2],
                                 x[3] + net[3]});
                    if (!try_point(cand))
                        break;
                    net = sub(cand, sweep_start);
                }
                if (budget_out)
                    return false;
                const double net_len = norm2(sub(x, sweep_start));
                if (net_len > 0.0) {
                    // Remember the productive direction for later sweeps.
                    Vec4 u = sub(x, sweep_start);
                    for (double& v : u)
                        v /= net_len;
                    dirs[4] = u;
                }
                const double rel =
                    (f_start - fx) / std::max(std::fabs(f_start), 1e-30);
                if (rel < s.f_rel_tol) {
                    if (span <= kSpanFloor)
                        return true;
                    span = std::max(span * 0.25, kSpanFloor);
                } else if (net_len > 2.0 * span) {
                    span = std::min(2.0 * span, 0.01);
                }
            }
            return false;
        };

        converged = refine(0.002);

        // Phase 3: the masked objective pins the radial map only where
        // image data exists, leaving a curved near-flat trench along the
        // softest metric direction, littered with interpolation-noise
        // ripples that trap purely local descent. Walk the trench with a
        // predictor step along the soft direction and a transverse
        // correction, keeping the best corrected point, then re-refine.
        if (!budget_out && s.max_evals - result.evaluations >= 150) {
            const std::array<Vec4, 4>& eig = basis_metric_eigenvectors();
            // One parabolic pass over the three stiff directions.
            auto correct = [&](Vec4& y, double& fy) {
                for (int pass = 0; pass < 2 && !budget_out; ++pass) {
                    for (int k = 0; k < 3 && !budget_out; ++k) {
                        const Vec4& u = eig[k];
                        const double h = 8e-4;
                        auto at = [&](double t) {
                            return project(
                                {y[0] + t * u[0], y[1] + t * u[1],
                                 y[2] + t * u[2], y[3] + t * u[3]});
                        };
                        const Vec4 cp = at(h);
                        const Vec4 cm = at(-h);
                        const auto fp = cp == y ? std::optional<double>(fy)
                                                : ev.eval(cp);
                        if (!fp) {
                            budget_out = true;
                            break;
                        }
                        const auto fm = cm == y ? std::optional<double>(fy)
                                                : ev.eval(cm);
                        if (!fm) {
                            budget_out = true;
                            break;
                        }
                        const double denom = *fp - 2.0 * fy + *fm;
                        if (denom > 0.0) {
                            const double t =
                                std::clamp(0.5 * h * (*fm - *fp) / denom,
                                           -4.0 * h, 4.0 * h);
                            const Vec4 ct = at(t);
                            const auto ft =
                                ct == y ? std::optional<double>(fy)
                                        : ev.eval(ct);
                            if (!ft) {
                                budget_out = true;
                                break;
                            }
                            if (*ft < fy) {
                                y = ct;
                                fy = *ft;
                                continue;
                            }
                        }
                        if (*fp < fy) {
                            y = cp;
                            fy = *fp;
                        } else if (*fm < fy) {
                            y = cm;
                            fy = *fm;
                        }
                    }
                }
            };

            Vec4 best_x = x;
            double best_f = fx;
            for (const double sign : {1.0, -1.0}) {
                Vec4 y = x;
                double fy = fx;
                int stale = 0;
                for (int step = 0; step < 12 && !budget_out && stale < 3;
                     ++step) {
                    const Vec4 pred = project(
                        {y[0] + sign * 0.004 * eig[3][0],
                         y[1] + sign * 0.004 * eig[3][1],
                         y[2] + sign * 0.004 * eig[3][2],
                         y[3] + sign * 0.004 * eig[3][3]});
                    if (pred == y)
                        break;
                    const auto fp = ev.eval(pred);
                    if (!fp)
                        break;
                    y = pred;
                    fy = *fp;
                    correct(y, fy);
                    if (fy < best_f) {
                        best_f = fy;
                        best_x = y;
                        stale = 0;
                    } else {
                        ++stale;
                    }
                }
            }
            x = best_x;
            fx = best_f;
            if (!budget_out)
                converged = refine(0.001);
        }
    }

    result.coeffs = to_coeffs(ev.best_x);
    result.final_error = ev.best_f;
    result.converged = converged;
    return result;
}

std::pair<RecoveryResult, RecoveryResult>
recover_coefficients(const RgbImage& img, const Intrinsics& intr,
                     const RecoverySettings& s) {
    img.require_consistent();
    const Plane ref = equalise_histogram(img.g);
    const Plane work_r = equalise_histogram(img.r);
    const Plane work_b = equalise_histogram(img.b);

    auto run = [&](const Plane& work) {
        return minimise_bounded(
            [&](const Coefficients& c) {
                return objective(work, ref, c, intr);
            },
            s);
    };
    return {run(work_r), run(work_b)};
}

std::vector<double> sweep_error_surface(const Plane& work, const Plane& ref,
                                        const Intrinsics& intr,
                                        const GridRange& grid_a,
                                        const GridRange& grid_b) {
    std::vector<double> grid(static_cast<std::size_t>(grid_a.count) *
                             grid_b.count);
    for (int ia = 0; ia < grid_a.count; ++ia) {
        for (int ib = 0; ib < grid_b.count; ++ib) {
            const Coefficients c{grid_a.value(ia), grid_b.value(ib), 0.0, 0.0};
            grid[static_cast<std::size_t>(ia) * grid_b.count + ib] =
                objective(work, ref, c, intr);
        }
    }
    return grid;
}

void write_trace_csv(const RecoveryResult& r, std::ostream& out) {
    char buf[160];
    int i = 0;
    for (const auto& [c, err] : r.trace) {
        ++i;
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      i, c.a, c.b, c.c, c.d, err);
        out << buf;
    }
}

} // namespace lca
