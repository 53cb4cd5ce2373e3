// Forward-mode jets: value plus derivatives, propagated through arithmetic.
//
// Jet2  — order-2 jet in two variables (f, f_u, f_v, f_uu, f_uv, f_vv)
// Jet1  — order-1 jet in two variables (f, f_u, f_v)
// TJet  — order-2 jet in one variable  (f, f', f'')
//
// All rules are the exact chain/product/quotient rules; there is no
// truncation error.  Domain guards (log of non-positive values, division
// by zero, ...) live in the expression evaluator, which knows source
// locations; the types themselves just compute.

#pragma once

#include <cmath>

namespace curvatura {

struct Jet2 {
    double f = 0, fu = 0, fv = 0, fuu = 0, fuv = 0, fvv = 0;

    constexpr Jet2() = default;
    constexpr Jet2(double value) : f(value) {}
    constexpr Jet2(double f_, double fu_, double fv_, double fuu_, double fuv_, double fvv_)
        : f(f_), fu(fu_), fv(fv_), fuu(fuu_), fuv(fuv_), fvv(fvv_) {}

    static constexpr Jet2 var_u(double u) { return {u, 1, 0, 0, 0, 0}; }
    static constexpr Jet2 var_v(double v) { return {v, 0, 1, 0, 0, 0}; }

    friend constexpr Jet2 operator-(const Jet2& a) {
        return {-a.f, -a.fu, -a.fv, -a.fuu, -a.fuv, -a.fvv};
    }
    friend constexpr Jet2 operator+(const Jet2& a, const Jet2& b) {
        return {a.f + b.f, a.fu + b.fu, a.fv + b.fv, a.fuu + b.fuu, a.fuv + b.fuv, a.fvv + b.fvv};
    }
    friend constexpr Jet2 operator-(const Jet2& a, const Jet2& b) {
        return {a.f - b.f, a.fu - b.fu, a.fv - b.fv, a.fuu - b.fuu, a.fuv - b.fuv, a.fvv - b.fvv};
    }
    friend constexpr Jet2 operator*(const Jet2& a, const Jet2& b) {
        return {a.f * b.f,
                a.fu * b.f + a.f * b.fu,
                a.fv * b.f + a.f * b.fv,
                a.fuu * b.f + 2 * a.fu * b.fu + a.f * b.fuu,
                a.fuv * b.f + a.fu * b.fv + a.fv * b.fu + a.f * b.fuv,
                a.fvv * b.f + 2 * a.fv * b.fv + a.f * b.fvv};
    }
    // 1/b: d(1/b) = -b'/b^2, d2(1/b) = 2 b'^2/b^3 - b''/b^2
    friend constexpr Jet2 recip(const Jet2& b) {
        const double g = 1.0 / b.f, g2 = g * g, g3 = g2 * g;
        return {g, -b.fu * g2, -b.fv * g2,
                2 * b.fu * b.fu * g3 - b.fuu * g2,
                2 * b.fu * b.fv * g3 - b.fuv * g2,
                2 * b.fv * b.fv * g3 - b.fvv * g2};
    }
    friend constexpr Jet2 operator/(const Jet2& a, const Jet2& b) { return a * recip(b); }

    friend constexpr Jet2 operator+(const Jet2& a, double c) { return a + Jet2(c); }
    friend constexpr Jet2 operator+(double c, const Jet2& a) { return Jet2(c) + a; }
    friend constexpr Jet2 operator-(const Jet2& a, double c) { return a - Jet2(c); }
    friend constexpr Jet2 operator-(double c, const Jet2& a) { return Jet2(c) - a; }
    friend constexpr Jet2 operator*(const Jet2& a, double c) {
        return {a.f * c, a.fu * c, a.fv * c, a.fuu * c, a.fuv * c, a.fvv * c};
    }
    friend constexpr Jet2 operator*(double c, const Jet2& a) { return a * c; }
    friend constexpr Jet2 operator/(const Jet2& a, double c) { return a * (1.0 / c); }
    friend constexpr Jet2 operator/(double c, const Jet2& a) { return recip(a) * c; }

    // g(a) with g, g', g'' evaluated at a.f
    friend constexpr Jet2 chain(const Jet2& a, double g, double g1, double g2) {
        return {g, g1 * a.fu, g1 * a.fv,
                g2 * a.fu * a.fu + g1 * a.fuu,
                g2 * a.fu * a.fv + g1 * a.fuv,
                g2 * a.fv * a.fv + g1 * a.fvv};
    }
};

inline Jet2 sin(const Jet2& a) { const double s = std::sin(a.f), c = std::cos(a.f); return chain(a, s, c, -s); }
inline Jet2 cos(const Jet2& a) { const double c = std::cos(a.f), s = std::sin(a.f); return chain(a, c, -s, -c); }
inline Jet2 tan(const Jet2& a) { const double t = std::tan(a.f), d = 1 + t * t; return chain(a, t, d, 2 * t * d); }
inline Jet2 exp(const Jet2& a) { const double e = std::exp(a.f); return chain(a, e, e, e); }
inline Jet2 log(const Jet2& a) { const double x = a.f; return chain(a, std::log(x), 1 / x, -1 / (x * x)); }
inline Jet2 sqrt(const Jet2& a) { const double s = std::sqrt(a.f); return chain(a, s, 0.5 / s, -0.25 / (s * s * s)); }
inline Jet2 abs(const Jet2& a) { const double sg = std::copysign(1.0, a.f); return chain(a, std::fabs(a.f), sg, 0); }

struct Jet1 {
    double f = 0, fu = 0, fv = 0;

    constexpr Jet1() = default;
    constexpr Jet1(double value) : f(value) {}
    constexpr Jet1(double f_, double fu_, double fv_) : f(f_), fu(fu_), fv(fv_) {}

    static constexpr Jet1 var_u(double u) { return {u, 1, 0}; }
    static constexpr Jet1 var_v(double v) { return {v, 0, 1}; }

    friend constexpr Jet1 operator-(const Jet1& a) { return {-a.f, -a.fu, -a.fv}; }
    friend constexpr Jet1 operator+(const Jet1& a, const Jet1& b) { return {a.f + b.f, a.fu + b.fu, a.fv + b.fv}; }
    friend constexpr Jet1 operator-(const Jet1& a, const Jet1& b) { return {a.f - b.f, a.fu - b.fu, a.fv - b.fv}; }
    friend constexpr Jet1 operator*(const Jet1& a, const Jet1& b) {
        return {a.f * b.f, a.fu * b.f + a.f * b.fu, a.fv * b.f + a.f * b.fv};
    }
    friend constexpr Jet1 recip(const Jet1& b) {
        const double g = 1.0 / b.f, g2 = g * g;
        return {g, -b.fu * g2, -b.fv * g2};
    }
    friend constexpr Jet1 operator/(const Jet1& a, const Jet1& b) { return a * recip(b); }
    friend constexpr Jet1 operator*(const Jet1& a, double c) { return {a.f * c, a.fu * c, a.fv * c}; }
    friend constexpr Jet1 operator*(double c, const Jet1& a) { return a * c; }
    friend constexpr Jet1 chain(const Jet1& a, double g, double g1) { return {g, g1 * a.fu, g1 * a.fv}; }
    // Uniform-signature overload for generic code; g2 is irrelevant at order 1.
    friend constexpr Jet1 chain(const Jet1& a, double g, double g1, double) { return chain(a, g, g1); }
};

inline Jet1 sin(const Jet1& a) { return chain(a, std::sin(a.f), std::cos(a.f)); }
inline Jet1 cos(const Jet1& a) { return chain(a, std::cos(a.f), -std::sin(a.f)); }
inline Jet1 tan(const Jet1& a) { const double t = std::tan(a.f); return chain(a, t, 1 + t * t); }
inline Jet1 exp(const Jet1& a) { const double e = std::exp(a.f); return chain(a, e, e); }
inline Jet1 log(const Jet1& a) { return chain(a, std::log(a.f), 1 / a.f); }
inline Jet1 sqrt(const Jet1& a) { const double s = std::sqrt(a.f); return chain(a, s, 0.5 / s); }
inline Jet1 abs(const Jet1& a) { return chain(a, std::fabs(a.f), std::copysign(1.0, a.f)); }

struct TJet {
    double f = 0, d = 0, d2 = 0;

    constexpr TJet() = default;
    constexpr TJet(double value) : f(value) {}
    constexpr TJet(double f_, double d_, double d2_) : f(f_), d(d_), d2(d2_) {}

    static constexpr TJet var(double t) { return {t, 1, 0}; }

    friend constexpr TJet operator-(const TJet& a) { return {-a.f, -a.d, -a.d2}; }
    friend constexpr TJet operator+(const TJet& a, const TJet& b) { return {a.f + b.f, a.d + b.d, a.d2 + b.d2}; }
    friend constexpr TJet operator-(const TJet& a, const TJet& b) { return {a.f - b.f, a.d - b.d, a.d2 - b.d2}; }
    friend constexpr TJet operator*(const TJet& a, const TJet& b) {
        return {a.f * b.f, a.d * b.f + a.f * b.d, a.d2 * b.f + 2 * a.d * b.d + a.f * b.d2};
    }
    friend constexpr TJet recip(const TJet& b) {
        const double g = 1.0 / b.f, g2 = g * g, g3 = g2 * g;
        return {g, -b.d * g2, 2 * b.d * b.d * g3 - b.d2 * g2};
    }
    friend constexpr TJet operator/(const TJet& a, const TJet& b) { return a * recip(b); }
    friend constexpr TJet operator*(const TJet& a, double c) { return {a.f * c, a.d * c, a.d2 * c}; }
    friend constexpr TJet operator*(double c, const TJet& a) { return a * c; }
    friend constexpr TJet operator+(const TJet& a, double c) { return {a.f + c, a.d, a.d2}; }
    friend constexpr TJet chain(const TJet& a, double g, double g1, double g2) {
        return {g, g1 * a.d, g2 * a.d * a.d + g1 * a.d2};
    }
};

inline TJet sin(const TJet& a) { const double s = std::sin(a.f), c = std::cos(a.f); return chain(a, s, c, -s); }
inline TJet cos(const TJet& a) { const double c = std::cos(a.f), s = std::sin(a.f); return chain(a, c, -s, -c); }
inline TJet tan(const TJet& a) { const double t = std::tan(a.f), d = 1 + t * t; return chain(a, t, d, 2 * t * d); }
inline TJet exp(const TJet& a) { const double e = std::exp(a.f); return chain(a, e, e, e); }
inline TJet log(const TJet& a) { const double x = a.f; return chain(a, std::log(x), 1 / x, -1 / (x * x)); }
inline TJet sqrt(const TJet& a) { const double s = std::sqrt(a.f); return chain(a, s, 0.5 / s, -0.25 / (s * s * s)); }
inline TJet abs(const TJet& a) { return chain(a, std::fabs(a.f), std::copysign(1.0, a.f), 0); }

// Exact integer power by repeated multiplication (negative exponents via the
// reciprocal).  Used by the evaluator's fast path so that negative bases work.
inline double powi(double x, long n) {
    if (n < 0) return 1.0 / powi(x, -n);
    double r = 1.0, p = x;
    for (; n > 0; n >>= 1) {
        if (n & 1) r *= p;
        p *= p;
    }
    return r;
}

}  // namespace curvatura
