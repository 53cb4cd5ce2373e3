// Adaptive composite Gauss-Legendre quadrature (16-point panels) in one and
// two dimensions, plus a grid-sampling kernel.
//
// Each routine exists in two forms that share the same splitting criteria
// and therefore visit exactly the same panels:
//   - a serial recursive reference implementation, and
//   - an OpenMP level-queue implementation that evaluates every panel of a
//     refinement level in parallel and then accumulates serially in panel
//     order, so results are deterministic for any thread count.
// `QuadOptions::parallel` selects between them; tests compare the two.
//
// A panel is accepted when the two-half refinement agrees with the parent
// estimate to the panel's tolerance budget (the budget halves per split).
// Exceeding max_depth raises QuadratureError.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvatura::quadrature {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadOptions {
    double tol = 1e-9;
    int max_depth = 12;
    bool parallel = true;
};

struct QuadStats {
    long panels = 0;     // accepted panels
    int max_depth = 0;   // deepest accepted panel

    void merge(const QuadStats& other) {
        panels += other.panels;
        max_depth = std::max(max_depth, other.max_depth);
    }
};

// 16-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr double kGlNode[16] = {
    -0.98940093499164993259615417345033, -0.94457502307323257607798841553461,
    -0.86563120238783174388046789771239, -0.75540440835500303389510119484744,
    -0.61787624440264374844667176404879, -0.45801677765722738634241944298358,
    -0.28160355077925891323046050146050, -0.09501250983763744018531933542496,
    0.09501250983763744018531933542496,  0.28160355077925891323046050146050,
    0.45801677765722738634241944298358,  0.61787624440264374844667176404879,
    0.75540440835500303389510119484744,  0.86563120238783174388046789771239,
    0.94457502307323257607798841553461,  0.98940093499164993259615417345033};

inline constexpr double kGlWeight[16] = {
    0.02715245941175409485178057245602, 0.06225352393864789286284383699438,
    0.09515851168249278480992510760225, 0.12462897125553387205247628219202,
    0.14959598881657673208150173054748, 0.16915651939500253818931207903036,
    0.18260341504492358886676366796922, 0.18945061045506849628539672320828,
    0.18945061045506849628539672320828, 0.18260341504492358886676366796922,
    0.16915651939500253818931207903036, 0.14959598881657673208150173054748,
    0.12462897125553387205247628219202, 0.09515851168249278480992510760225,
    0.06225352393864789286284383699438, 0.02715245941175409485178057245602};

template <class F>
double gl16(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 16; ++i) s += kGlWeight[i] * f(mid + half * kGlNode[i]);
    return s * half;
}

// f(u, v) over an axis-aligned rectangle, 16 x 16 tensor rule.
template <class F>
double gl16_rect(F&& f, double u0, double u1, double v0, double v1) {
    const double mu = 0.5 * (u0 + u1), hu = 0.5 * (u1 - u0);
    const double mv = 0.5 * (v0 + v1), hv = 0.5 * (v1 - v0);
    double s = 0;
    for (int i = 0; i < 16; ++i) {
        const double u = mu + hu * kGlNode[i];
        double row = 0;
        for (int j = 0; j < 16; ++j) row += kGlWeight[j] * f(u, mv + hv * kGlNode[j]);
        s += kGlWeight[i] * row;
    }
    return s * hu * hv;
}

[[noreturn]] inline void throw_non_convergence(double a, double b) {
    throw QuadratureError("quadrature did not converge on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]: max depth reached");
}

namespace detail {

template <class F>
double serial_1d(F& f, double a, double b, double parent, double tol, int depth, int max_depth,
                 QuadStats* stats) {
    const double mid = 0.5 * (a + b);
    const double left = gl16(f, a, mid);
    const double right = gl16(f, mid, b);
    const double refined = left + right;
    if (std::fabs(refined - parent) <= tol) {
        if (stats) {
            stats->panels += 2;
            stats->max_depth = std::max(stats->max_depth, depth + 1);
        }
        return refined;
    }
    if (depth >= max_depth) throw_non_convergence(a, b);
    return serial_1d(f, a, mid, left, tol / 2, depth + 1, max_depth, stats) +
           serial_1d(f, mid, b, right, tol / 2, depth + 1, max_depth, stats);
}

struct Panel1 {
    double a, b, estimate, tol;
    int depth;
};

template <class F>
double queue_1d(F& f, double a, double b, double tol, int max_depth, QuadStats* stats) {
    std::vector<Panel1> level{{a, b, gl16(f, a, b), tol, 0}};
    double total = 0;
    while (!level.empty()) {
        const auto n = level.size();
        std::vector<double> left(n), right(n);
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(n); ++i) {
            const Panel1& p = level[i];
            const double mid = 0.5 * (p.a + p.b);
            left[i] = gl16(f, p.a, mid);
            right[i] = gl16(f, mid, p.b);
        }
        std::vector<Panel1> next;
        for (size_t i = 0; i < n; ++i) {
            const Panel1& p = level[i];
            const double refined = left[i] + right[i];
            if (std::fabs(refined - p.estimate) <= p.tol) {
                total += refined;
                if (stats) {
                    stats->panels += 2;
                    stats->max_depth = std::max(stats->max_depth, p.depth + 1);
                }
            } else {
                if (p.depth >= max_depth) throw_non_convergence(p.a, p.b);
                const double mid = 0.5 * (p.a + p.b);
                next.push_back({p.a, mid, left[i], p.tol / 2, p.depth + 1});
                next.push_back({mid, p.b, right[i], p.tol / 2, p.depth + 1});
            }
        }
        level = std::move(next);
    }
    return total;
}

template <class F>
double serial_rect(F& f, double u0, double u1, double v0, double v1, double parent, double tol,
                   int depth, int max_depth, QuadStats* stats) {
    const double mu = 0.5 * (u0 + u1), mv = 0.5 * (v0 + v1);
    const double q00 = gl16_rect(f, u0, mu, v0, mv);
    const double q10 = gl16_rect(f, mu, u1, v0, mv);
    const double q01 = gl16_rect(f, u0, mu, mv, v1);
    const double q11 = gl16_rect(f, mu, u1, mv, v1);
    const double refined = q00 + q10 + q01 + q11;
    if (std::fabs(refined - parent) <= tol) {
        if (stats) {
            stats->panels += 4;
            stats->max_depth = std::max(stats->max_depth, depth + 1);
        }
        return refined;
    }
    if (depth >= max_depth) throw_non_convergence(u0, u1);
    const double child_tol = tol / 4;
    return serial_rect(f, u0, mu, v0, mv, q00, child_tol, depth + 1, max_depth, stats) +
           serial_rect(f, mu, u1, v0, mv, q10, child_tol, depth + 1, max_depth, stats) +
           serial_rect(f, u0, mu, mv, v1, q01, child_tol, depth + 1, max_depth, stats) +
           serial_rect(f, mu, u1, mv, v1, q11, child_tol, depth + 1, max_depth, stats);
}

struct Panel2 {
    double u0, u1, v0, v1, estimate, tol;
    int depth;
};

template <class F>
double queue_rect(F& f, double u0, double u1, double v0, double v1, double tol, int max_depth,
                  QuadStats* stats) {
    std::vector<Panel2> level{{u0, u1, v0, v1, gl16_rect(f, u0, u1, v0, v1), tol, 0}};
    double total = 0;
    while (!level.empty()) {
        const auto n = level.size();
        std::vector<std::array<double, 4>> quads(n);
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < static_cast<long>(n); ++i) {
            const Panel2& p = level[i];
            const double mu = 0.5 * (p.u0 + p.u1), mv = 0.5 * (p.v0 + p.v1);
            quads[i] = {gl16_rect(f, p.u0, mu, p.v0, mv), gl16_rect(f, mu, p.u1, p.v0, mv),
                        gl16_rect(f, p.u0, mu, mv, p.v1), gl16_rect(f, mu, p.u1, mv, p.v1)};
        }
        std::vector<Panel2> next;
        for (size_t i = 0; i < n; ++i) {
            const Panel2& p = level[i];
            const double refined = quads[i][0] + quads[i][1] + quads[i][2] + quads[i][3];
            if (std::fabs(refined - p.estimate) <= p.tol) {
                total += refined;
                if (stats) {
                    stats->panels += 4;
                    stats->max_depth = std::max(stats->max_depth, p.depth + 1);
                }
            } else {
                if (p.depth >= max_depth) throw_non_convergence(p.u0, p.u1);
                const double mu = 0.5 * (p.u0 + p.u1), mv = 0.5 * (p.v0 + p.v1);
                const double child_tol = p.tol / 4;
                next.push_back({p.u0, mu, p.v0, mv, quads[i][0], child_tol, p.depth + 1});
                next.push_back({mu, p.u1, p.v0, mv, quads[i][1], child_tol, p.depth + 1});
                next.push_back({p.u0, mu, mv, p.v1, quads[i][2], child_tol, p.depth + 1});
                next.push_back({mu, p.u1, mv, p.v1, quads[i][3], child_tol, p.depth + 1});
            }
        }
        level = std::move(next);
    }
    return total;
}

}  // namespace detail

template <class F>
double adaptive_1d(F&& f, double a, double b, const QuadOptions& opt = {}, QuadStats* stats = nullptr) {
    if (a == b) return 0;
    if (opt.parallel) return detail::queue_1d(f, a, b, opt.tol, opt.max_depth, stats);
    return detail::serial_1d(f, a, b, gl16(f, a, b), opt.tol, 0, opt.max_depth, stats);
}

template <class F>
double adaptive_rect(F&& f, double u0, double u1, double v0, double v1, const QuadOptions& opt = {},
                     QuadStats* stats = nullptr) {
    if (u0 == u1 || v0 == v1) return 0;
    if (opt.parallel) return detail::queue_rect(f, u0, u1, v0, v1, opt.tol, opt.max_depth, stats);
    return detail::serial_rect(f, u0, u1, v0, v1, gl16_rect(f, u0, u1, v0, v1), opt.tol, 0,
                               opt.max_depth, stats);
}

// Samples f on an n x n cell-centred grid over [u0,u1] x [v0,v1], row-major
// with u varying slowest.  The parallel kernel distributes rows; entries are
// written by index so the output is identical to the serial reference.
template <class F>
std::vector<double> sample_grid(F&& f, double u0, double u1, double v0, double v1, int n,
                                bool parallel = true) {
    std::vector<double> out(static_cast<size_t>(n) * n);
    const double du = (u1 - u0) / n, dv = (v1 - v0) / n;
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) {
            const double u = u0 + (i + 0.5) * du;
            for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] = f(u, v0 + (j + 0.5) * dv);
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double u = u0 + (i + 0.5) * du;
            for (int j = 0; j < n; ++j) out[static_cast<size_t>(i) * n + j] = f(u, v0 + (j + 0.5) * dv);
        }
    }
    return out;
}

}  // namespace curvatura::quadrature
