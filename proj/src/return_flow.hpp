#pragma once

// Internal: adaptive RKF78 stepping until the solution returns to {x = 0}
// crossing in the starting direction. Shared by oval tracing and the
// perturbed return map.

#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace itergm::detail {

using State = std::vector<double>;

template <class F>
struct SysRef {
    const F* f;
    template <class S>
    void operator()(const S& u, S& du, double s) const { (*f)(u, du, s); }
};

struct ReturnLimits {
    double max_step = 0.1;
    double budget = 1e3;   // arclength
    double escape = 1e3;   // radius
    double min_step = 1e-14;
    double scale = 1;      // typical coordinate size
    int crossings = 1;
};

// u[0], u[1] are x, y; sigma is the sign of x' at the start. after_step may
// modify the state (projection) and record samples. fail(msg) must throw.
// Returns the parameter length travelled; u holds the state at the crossing.
template <class Sys, class AfterStep, class Fail>
double integrate_to_return(const Sys& f, State& u, double sigma, double tol, const ReturnLimits& lim,
                           AfterStep after_step, Fail fail, int& steps) {
    namespace ode = boost::numeric::odeint;
    SysRef<Sys> sys{&f};
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>());
    ode::runge_kutta_fehlberg78<State> plain;
    double s = 0, ds = std::min(lim.max_step, 1e-2 * lim.scale);
    int crossings = 0;
    steps = 0;
    State prev, trial(u.size());
    for (;;) {
        if (s > lim.budget) fail("no return to x = 0 within arclength " + std::to_string(lim.budget));
        prev = u;
        double sprev = s;
        if (stepper.try_step(sys, u, s, ds) == ode::fail) {
            if (ds < lim.min_step)
                fail("step size collapsed near (" + std::to_string(u[0]) + ", " + std::to_string(u[1]) + ")");
            continue;
        }
        ds = std::min(ds, lim.max_step);
        ++steps;
        if (!(std::hypot(u[0], u[1]) <= lim.escape)) fail("trajectory escapes to infinity");
        bool crossed = prev[0] * sigma < 0 && u[0] * sigma >= 0;
        if (!crossed || ++crossings < lim.crossings) {
            after_step(u, false);
            continue;
        }
        // Illinois regula falsi on the step length from the previous state
        double a = 0, fa = prev[0] * sigma, b = s - sprev, fb = u[0] * sigma;
        int side = 0;
        double h = b;
        for (int it = 0; it < 100; ++it) {
            h = (a * fb - b * fa) / (fb - fa);
            if (!(h > a && h < b)) h = 0.5 * (a + b);
            plain.do_step(sys, prev, sprev, trial, h);
            double fh = trial[0] * sigma;
            if (std::abs(fh) < 1e-16 * lim.scale || b - a < 1e-15 * lim.scale) break;
            if (fh < 0) {
                a = h;
                fa = fh;
                if (side == -1) fb *= 0.5;
                side = -1;
            } else {
                b = h;
                fb = fh;
                if (side == 1) fa *= 0.5;
                side = 1;
            }
        }
        plain.do_step(sys, prev, sprev, trial, h);
        u = trial;
        after_step(u, true);
        return sprev + h;
    }
}

}  // namespace itergm::detail
