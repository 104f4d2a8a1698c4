// SPDX-License-Identifier: Apache-2.0
#include "riskbid/numerics/dopri5.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riskbid/errors.hpp"

namespace riskbid::numerics {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (Shampine) coefficients.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double initial_step(const ScalarRhs& f, double t0, double y0, double f0, double t1,
                    const Dopri5Options& o) {
    const double sk = o.atol + o.rtol * std::abs(y0);
    const double dnf = (f0 / sk) * (f0 / sk);
    const double dny = (y0 / sk) * (y0 / sk);
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h = std::min(h, t1 - t0);
    const double f1 = f(t0 + h, y0 + h * f0);
    const double der2 = std::abs(f1 - f0) / sk / h;
    const double der12 = std::max(der2, std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, t1 - t0});
}

}  // namespace

const DenseTrajectory::Step& DenseTrajectory::locate(double t) const {
    if (steps_.empty()) throw SolverError("empty trajectory");
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double x, const Step& s) { return x < s.t0; });
    if (it == steps_.begin()) return steps_.front();
    return *std::prev(it);
}

double DenseTrajectory::value(double t) const {
    const Step& s = locate(t);
    const double th = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
    const double th1 = 1.0 - th;
    const auto& c = s.c;
    return c[0] + th * (c[1] + th1 * (c[2] + th * (c[3] + th1 * c[4])));
}

double DenseTrajectory::derivative(double t) const {
    const Step& s = locate(t);
    const double th = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
    const double th1 = 1.0 - th;
    const auto& c = s.c;
    // P(th) = th * S, S = c1 + th1 * R, R = c2 + th * Q, Q = c3 + th1 * c4
    const double q = c[3] + th1 * c[4];
    const double dq = -c[4];
    const double r = c[2] + th * q;
    const double dr = q + th * dq;
    const double sv = c[1] + th1 * r;
    const double ds = -r + th1 * dr;
    return (sv + th * ds) / s.h;
}

DenseTrajectory integrate_dopri5(const ScalarRhs& f, double t0, double y0, double t1,
                                 const Dopri5Options& o) {
    if (!(t1 > t0)) throw SolverError("integration interval must be nonempty");
    std::vector<DenseTrajectory::Step> steps;

    double t = t0, y = y0;
    double k1 = f(t, y);
    double h = o.initial_step > 0.0 ? o.initial_step : initial_step(f, t0, y0, k1, t1, o);
    const double h_cap = o.max_step > 0.0 ? o.max_step : std::numeric_limits<double>::infinity();
    h = std::min(h, h_cap);
    const double h_floor = 1e-14 * std::max(std::abs(t0), std::abs(t1)) + 1e-300;
    bool last_rejected = false;

    for (std::size_t n = 0; n < o.max_steps; ++n) {
        bool last = false;
        if (t + 1.01 * h >= t1) {
            h = t1 - t;
            last = true;
        }
        const double k2 = f(t + c2 * h, y + h * a21 * k1);
        const double k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const double k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const double k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const double k6 =
            f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const double ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const double tnew = last ? t1 : t + h;
        const double k7 = f(tnew, ynew);

        const double err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double sk = o.atol + o.rtol * std::max(std::abs(y), std::abs(ynew));
        const double errn = std::abs(err) / sk;

        if (!std::isfinite(errn)) {
            h *= 0.2;
            last_rejected = true;
            if (h < h_floor) throw SolverError("step size underflow (non-finite error estimate)");
            continue;
        }

        if (errn <= 1.0) {
            DenseTrajectory::Step s;
            s.t0 = t;
            s.h = tnew - t;
            const double ydiff = ynew - y;
            const double bspl = s.h * k1 - ydiff;
            s.c = {y, ydiff, bspl, ydiff - s.h * k7 - bspl,
                   s.h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7)};
            steps.push_back(s);
            t = tnew;
            y = ynew;
            k1 = k7;
            if (last) return DenseTrajectory(std::move(steps));
            double fac = 0.9 * std::pow(std::max(errn, 1e-20), -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h = std::min(h * fac, h_cap);
            last_rejected = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(errn, -0.2));
            last_rejected = true;
        }
        if (h < h_floor) {
            std::ostringstream os;
            os << "step size underflow at t=" << t;
            throw SolverError(os.str());
        }
    }
    throw SolverError("maximum number of integration steps exceeded");
}

}  // namespace riskbid::numerics
