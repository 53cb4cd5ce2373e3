// Benchmark comparing the serial and OpenMP-parallel quadrature kernels on
// identical integrands: the curvature two-form of a bumpy sphere (adaptive
// panel integration) and its Gauss curvature (dense grid sampling).
// Reports wall times, speedup, and the numerical agreement of the results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "curvatura/catalog.hpp"
#include "curvatura/connection.hpp"
#include "curvatura/geometry.hpp"
#include "curvatura/quadrature.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    const int grid = argc > 1 ? std::atoi(argv[1]) : 512;
    if (grid < 1) {
        std::fprintf(stderr, "usage: %s [grid-size]\n", argv[0]);
        return 2;
    }

    const auto entry = curvatura::catalog::make_surface("bumpy_sphere");
    const auto frame = curvatura::geometry::coordinate_frame(entry.metric);
    const auto omega = curvatura::connection::connection_form(entry.metric, frame);
    const auto two_form = curvatura::connection::exterior_derivative(omega);
    const auto k = curvatura::connection::gauss_curvature(entry.metric, frame);
    const auto& c = entry.metric.chart;

    auto integrand = [&](double u, double v) { return two_form.c.value(u, v); };
    auto k_sample = [&](double u, double v) { return k.value(u, v); };

    std::printf("surface: %s, chart [%g, %g] x [%g, %g]\n", entry.signature.c_str(), c.u0, c.u1,
                c.v0, c.v1);

    {
        curvatura::quadrature::QuadOptions serial{1e-8, 12, false};
        curvatura::quadrature::QuadOptions parallel{1e-8, 12, true};
        curvatura::quadrature::QuadStats ss{}, ps{};

        auto t0 = Clock::now();
        const double rs = curvatura::quadrature::adaptive_rect(integrand, c.u0, c.u1, c.v0, c.v1,
                                                               serial, &ss);
        const double serial_ms = ms_since(t0);

        t0 = Clock::now();
        const double rp = curvatura::quadrature::adaptive_rect(integrand, c.u0, c.u1, c.v0, c.v1,
                                                               parallel, &ps);
        const double parallel_ms = ms_since(t0);

        std::printf("adaptive_rect: serial %.1f ms (%ld panels), parallel %.1f ms (%ld panels), "
                    "speedup %.2fx, |delta| %.3g\n",
                    serial_ms, ss.panels, parallel_ms, ps.panels, serial_ms / parallel_ms,
                    std::fabs(rs - rp));
    }

    {
        auto t0 = Clock::now();
        const auto vs = curvatura::quadrature::sample_grid(k_sample, c.u0, c.u1, c.v0, c.v1, grid,
                                                           false);
        const double serial_ms = ms_since(t0);

        t0 = Clock::now();
        const auto vp = curvatura::quadrature::sample_grid(k_sample, c.u0, c.u1, c.v0, c.v1, grid,
                                                           true);
        const double parallel_ms = ms_since(t0);

        double max_delta = 0;
        for (size_t i = 0; i < vs.size(); ++i)
            max_delta = std::max(max_delta, std::fabs(vs[i] - vp[i]));
        std::printf("sample_grid %dx%d: serial %.1f ms, parallel %.1f ms, speedup %.2fx, "
                    "max |delta| %.3g\n",
                    grid, grid, serial_ms, parallel_ms, serial_ms / parallel_ms, max_delta);
    }
    return 0;
}
