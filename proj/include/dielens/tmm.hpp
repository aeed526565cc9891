#ifndef DIELENS_TMM_HPP
#define DIELENS_TMM_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "dielens/constants.hpp"
#include "dielens/errors.hpp"
#include "dielens/transformer.hpp"

// Exact plane-wave response of a layered dielectric stack at normal
// incidence. Loss enters through the complex permittivity
// eps * (1 - j tan_delta); lossless layers keep everything real except the
// propagation phase.

namespace dielens {

struct Layer {
    double eps = 1.0;
    double loss_tangent = 0.0;
    double thickness_mm = 0.0;
};

struct Stack {
    double eps_entry = 1.0;
    double eps_exit = 1.0;
    std::vector<Layer> layers;
};

inline void validate(const Stack& s) {
    if (!std::isfinite(s.eps_entry) || !std::isfinite(s.eps_exit) || s.eps_entry < 1.0 ||
        s.eps_exit < 1.0)
        throw argument_error("stack half-space permittivities must be finite and >= 1");
    for (const auto& l : s.layers)
        if (!std::isfinite(l.eps) || l.eps < 1.0 || !(l.thickness_mm >= 0.0) ||
            !std::isfinite(l.thickness_mm) || l.loss_tangent < 0.0 ||
            !std::isfinite(l.loss_tangent))
            throw argument_error("layer needs eps >= 1, thickness >= 0, loss tangent >= 0");
}

inline Stack make_stack(const SectionPlan& plan, double loss_tangent = 0.0) {
    Stack s{plan.media.eps_start, plan.media.eps_end, {}};
    s.layers.reserve(plan.sections.size());
    for (const auto& sec : plan.sections)
        s.layers.push_back({sec.eps, loss_tangent, sec.length_mm});
    return s;
}

namespace detail {

inline std::complex<double> complex_eps(const Layer& l) {
    return {l.eps, -l.eps * l.loss_tangent};
}

// sqrt with the branch that keeps Re >= 0, so wave impedances stay passive
inline std::complex<double> passive_sqrt(std::complex<double> z) {
    auto r = std::sqrt(z);
    if (r.real() < 0.0) r = -r;
    return r;
}

}  // namespace detail

// Input reflection coefficient looking into the stack from the entry side,
// by the backward impedance recursion
//   Z <- Z_l (Z + j Z_l tan(k d)) / (Z_l + j Z tan(k d))
// folded from the exit half-space to the front face.
inline std::complex<double> reflect(const Stack& stack, double f_hz) {
    if (!(f_hz > 0.0) || !std::isfinite(f_hz))
        throw argument_error("frequency must be positive");
    const std::complex<double> j{0.0, 1.0};
    std::complex<double> z = eta0_ohm / std::sqrt(stack.eps_exit);
    for (auto it = stack.layers.rbegin(); it != stack.layers.rend(); ++it) {
        const auto ec = detail::complex_eps(*it);
        const auto n = detail::passive_sqrt(ec);
        const auto zl = eta0_ohm / n;
        const auto t = std::tan(2.0 * std::numbers::pi * f_hz / c0_mm_per_s * n *
                                it->thickness_mm);
        z = zl * (z + j * zl * t) / (zl + j * z * t);
    }
    const double z0 = eta0_ohm / std::sqrt(stack.eps_entry);
    return (z - z0) / (z + z0);
}

// Field transmission coefficient through the stack via the cascade of
// characteristic matrices. For a lossless stack power balances as
//   |Gamma|^2 + |tau|^2 sqrt(eps_exit / eps_entry) = 1.
inline std::complex<double> transmit(const Stack& stack, double f_hz) {
    if (!(f_hz > 0.0) || !std::isfinite(f_hz))
        throw argument_error("frequency must be positive");
    const std::complex<double> j{0.0, 1.0};
    // m is the 2x2 characteristic matrix relating (E, H) across the stack
    std::array<std::complex<double>, 4> m{1.0, 0.0, 0.0, 1.0};
    for (const auto& l : stack.layers) {
        const auto n = detail::passive_sqrt(detail::complex_eps(l));
        const auto y = n / eta0_ohm;
        const auto delta =
            2.0 * std::numbers::pi * f_hz / c0_mm_per_s * n * l.thickness_mm;
        const auto cd = std::cos(delta);
        const auto sd = std::sin(delta);
        const std::array<std::complex<double>, 4> lm{cd, j * sd / y, j * sd * y, cd};
        m = {m[0] * lm[0] + m[1] * lm[2], m[0] * lm[1] + m[1] * lm[3],
             m[2] * lm[0] + m[3] * lm[2], m[2] * lm[1] + m[3] * lm[3]};
    }
    const double y_in = std::sqrt(stack.eps_entry) / eta0_ohm;
    const double y_out = std::sqrt(stack.eps_exit) / eta0_ohm;
    return 2.0 * y_in / (y_in * (m[0] + m[1] * y_out) + (m[2] + m[3] * y_out));
}

struct SweepResult {
    std::vector<double> freq_hz;
    std::vector<std::complex<double>> gamma;
    std::vector<std::complex<double>> tau;
    double f0_hz = 0.0;
    Stack stack;
};

// Uniform frequency sweep, inclusive of both endpoints. f0 defaults to the
// midpoint and is carried along for bandwidth searches.
inline SweepResult sweep(const Stack& stack, double f_lo_hz, double f_hi_hz,
                         std::size_t points, double f0_hz = 0.0) {
    validate(stack);
    if (!(f_lo_hz > 0.0) || !(f_hi_hz > f_lo_hz) || !std::isfinite(f_hi_hz))
        throw argument_error("need 0 < f_lo < f_hi");
    if (points < 2) throw argument_error("sweep needs at least 2 points");
    SweepResult r;
    r.stack = stack;
    r.f0_hz = (f0_hz > 0.0) ? f0_hz : 0.5 * (f_lo_hz + f_hi_hz);
    if (r.f0_hz < f_lo_hz || r.f0_hz > f_hi_hz)
        throw argument_error("design frequency must lie inside the sweep range");
    r.freq_hz.reserve(points);
    r.gamma.reserve(points);
    r.tau.reserve(points);
    const double step = (f_hi_hz - f_lo_hz) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double f =
            (i + 1 == points) ? f_hi_hz : f_lo_hz + step * static_cast<double>(i);
        r.freq_hz.push_back(f);
        r.gamma.push_back(reflect(stack, f));
        r.tau.push_back(transmit(stack, f));
    }
    return r;
}

struct Bandwidth {
    double f_low_hz = 0.0;
    double f_high_hz = 0.0;
    double fbw = 0.0;
    bool center_in_band = false;
    // edge hit the sweep boundary while still below threshold; fbw is a
    // lower bound in that case
    bool clipped_low = false;
    bool clipped_high = false;
};

namespace detail {

inline double mag_at(const Stack& stack, double f_hz) {
    return std::abs(reflect(stack, f_hz));
}

// Bisect the threshold crossing bracketed by [f_in, f_out] where the stack
// is below threshold at f_in. Tolerance is absolute in frequency.
inline double bisect_crossing(const Stack& stack, double f_in, double f_out,
                              double threshold, double tol_hz) {
    while (std::abs(f_out - f_in) > tol_hz) {
        const double mid = 0.5 * (f_in + f_out);
        if (mag_at(stack, mid) <= threshold)
            f_in = mid;
        else
            f_out = mid;
    }
    return 0.5 * (f_in + f_out);
}

}  // namespace detail

// Contiguous band around f0 where |Gamma| stays at or below the threshold.
// Grid points of the sweep locate the first excursion on each side; the
// exact edge is then bisected on the continuous response.
inline Bandwidth bandwidth(const SweepResult& result, double threshold_db) {
    if (result.freq_hz.size() < 2) throw argument_error("sweep is empty");
    const double thr = std::pow(10.0, threshold_db / 20.0);
    const double f0 = result.f0_hz;
    if (f0 < result.freq_hz.front() || f0 > result.freq_hz.back())
        throw argument_error("design frequency must lie inside the sweep range");
    Bandwidth bw;
    if (detail::mag_at(result.stack, f0) > thr) {
        bw.f_low_hz = bw.f_high_hz = f0;
        return bw;
    }
    bw.center_in_band = true;
    const double tol = 1e-4 * f0;
    const auto& f = result.freq_hz;

    std::size_t i0 = 0;
    while (i0 + 1 < f.size() && f[i0 + 1] <= f0) ++i0;

    // march down from f0
    bw.f_low_hz = f.front();
    bw.clipped_low = true;
    double inside = f0;
    for (std::size_t i = i0 + 1; i-- > 0;) {
        if (std::abs(result.gamma[i]) > thr) {
            bw.f_low_hz = detail::bisect_crossing(result.stack, inside, f[i], thr, tol);
            bw.clipped_low = false;
            break;
        }
        inside = f[i];
    }
    // march up from f0
    bw.f_high_hz = f.back();
    bw.clipped_high = true;
    inside = f0;
    for (std::size_t i = i0 + 1; i < f.size(); ++i) {
        if (std::abs(result.gamma[i]) > thr) {
            bw.f_high_hz = detail::bisect_crossing(result.stack, inside, f[i], thr, tol);
            bw.clipped_high = false;
            break;
        }
        inside = f[i];
    }
    bw.fbw = (bw.f_high_hz - bw.f_low_hz) / f0;
    return bw;
}

struct RippleExtremum {
    double freq_hz = 0.0;
    double mag = 0.0;
};

// Local maxima of |Gamma| strictly inside [f_low, f_high], refined by a
// quadratic fit through the grid neighbours and re-evaluated exactly.
inline std::vector<RippleExtremum> ripple_extrema(const SweepResult& result, double f_low_hz,
                                                  double f_high_hz) {
    if (result.freq_hz.size() < 3) return {};
    std::vector<RippleExtremum> out;
    const auto& f = result.freq_hz;
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        if (f[i] <= f_low_hz || f[i] >= f_high_hz) continue;
        const double ym = std::abs(result.gamma[i - 1]);
        const double y0 = std::abs(result.gamma[i]);
        const double yp = std::abs(result.gamma[i + 1]);
        if (y0 < ym || y0 < yp) continue;
        const double denom = ym - 2.0 * y0 + yp;
        double fpk = f[i];
        if (denom < 0.0) {
            const double h = f[i + 1] - f[i];
            fpk += 0.5 * h * (ym - yp) / denom;
            if (fpk < f[i - 1] || fpk > f[i + 1]) fpk = f[i];
        }
        out.push_back({fpk, detail::mag_at(result.stack, fpk)});
    }
    return out;
}

}  // namespace dielens

#endif
