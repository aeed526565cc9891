#ifndef DIELENS_TRANSFORMER_HPP
#define DIELENS_TRANSFORMER_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "dielens/constants.hpp"
#include "dielens/errors.hpp"

// Multi-section quarter-wave impedance transformers between two dielectric
// half-spaces, synthesized by small-reflection theory. Impedances are TEM
// wave impedances eta0/sqrt(eps); every section is a quarter wavelength long
// in its own medium at the design frequency, so higher-permittivity sections
// are physically shorter.

namespace dielens {

enum class XformerKind { quarter_wave, binomial, chebyshev };

struct MediumPair {
    double eps_start = 1.0;
    double eps_end = 1.0;
};

inline void validate(const MediumPair& m) {
    if (!std::isfinite(m.eps_start) || !std::isfinite(m.eps_end) ||
        m.eps_start < 1.0 || m.eps_end < 1.0)
        throw argument_error("medium permittivities must be finite and >= 1");
}

struct TransformerSpec {
    XformerKind kind = XformerKind::quarter_wave;
    int sections = 1;
    double ripple = 0.0;  // chebyshev passband |Gamma|; unused otherwise
    double f0_hz = 80e9;
};

struct Section {
    double eps = 1.0;
    double impedance_ohm = eta0_ohm;
    double length_mm = 0.0;
};

struct SectionPlan {
    XformerKind kind = XformerKind::quarter_wave;
    MediumPair media{};
    double f0_hz = 0.0;
    double ripple = 0.0;  // design ripple for chebyshev plans, 0 otherwise
    std::vector<Section> sections;
};

// Past this the small-reflection synthesis is numerically fine but physically
// meaningless for printable pins, so treat it as a caller mistake.
inline constexpr int max_sections = 8;

inline std::int64_t binom_coeff(int n, int k) {
    if (n < 0 || n > 20) throw argument_error("binom_coeff: n must be in [0, 20]");
    if (k < 0 || k > n) throw argument_error("binom_coeff: k must be in [0, n]");
    if (k > n - k) k = n - k;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        // exact at every step: r holds C(n - k + i - 1, i - 1) * ... product form
        r = r * (n - k + i) / i;
    }
    return r;
}

inline double quarter_wave_length_mm(double eps, double f0_hz) {
    return wavelength_mm(f0_hz) / (4.0 * std::sqrt(eps));
}

namespace detail {

inline void check_synth_args(const MediumPair& media, int n_sections, double f0_hz) {
    validate(media);
    if (n_sections < 1 || n_sections > max_sections)
        throw argument_error("section count must be in [1, 8]");
    if (!(f0_hz > 0.0) || !std::isfinite(f0_hz))
        throw argument_error("design frequency must be positive");
}

// ln(Z_end / Z_start); negative when permittivity increases.
inline double log_impedance_ratio(const MediumPair& m) {
    return -0.5 * std::log(m.eps_end / m.eps_start);
}

inline Section section_from_log_impedance(double lnz, double f0_hz) {
    Section s;
    s.impedance_ohm = std::exp(lnz);
    s.eps = std::exp(2.0 * (std::log(eta0_ohm) - lnz));
    s.length_mm = quarter_wave_length_mm(s.eps, f0_hz);
    return s;
}

// Coefficients of the Chebyshev polynomial T_n, ascending powers of x.
inline std::vector<double> chebyshev_coeffs(int n) {
    std::vector<double> a{1.0}, b{0.0, 1.0};
    if (n == 0) return a;
    for (int i = 1; i < n; ++i) {
        std::vector<double> c(b.size() + 1, 0.0);
        for (std::size_t m = 0; m < b.size(); ++m) c[m + 1] += 2.0 * b[m];
        for (std::size_t m = 0; m < a.size(); ++m) c[m] -= a[m];
        a.swap(b);
        b.swap(c);
    }
    return b;
}

inline double eval_poly(const std::vector<double>& coeffs, double x) {
    double v = 0.0;
    for (std::size_t m = coeffs.size(); m-- > 0;) v = v * x + coeffs[m];
    return v;
}

}  // namespace detail

// Exact reflection magnitude of the bare interface between the two media.
inline double fresnel_magnitude(const MediumPair& m) {
    const double z0 = eta0_ohm / std::sqrt(m.eps_start);
    const double zf = eta0_ohm / std::sqrt(m.eps_end);
    return std::abs((zf - z0) / (zf + z0));
}

inline SectionPlan synth_binomial(const MediumPair& media, int n_sections, double f0_hz) {
    detail::check_synth_args(media, n_sections, f0_hz);
    SectionPlan plan{XformerKind::binomial, media, f0_hz, 0.0, {}};
    const double total = detail::log_impedance_ratio(media);
    double lnz = std::log(eta0_ohm) - 0.5 * std::log(media.eps_start);
    plan.sections.reserve(static_cast<std::size_t>(n_sections));
    for (int n = 0; n < n_sections; ++n) {
        // log-impedance step n carries weight C(N, n) / 2^N of the total
        lnz += std::ldexp(static_cast<double>(binom_coeff(n_sections, n)), -n_sections) * total;
        plan.sections.push_back(detail::section_from_log_impedance(lnz, f0_hz));
    }
    return plan;
}

inline SectionPlan synth_quarter_wave(const MediumPair& media, double f0_hz) {
    SectionPlan plan = synth_binomial(media, 1, f0_hz);
    plan.kind = XformerKind::quarter_wave;
    return plan;
}

// Band-edge electrical length of the equal-ripple design. The passband is
// theta in [theta_m, pi - theta_m].
inline double cheb_theta_m(const MediumPair& media, int n_sections, double ripple) {
    validate(media);
    if (n_sections < 1 || n_sections > max_sections)
        throw argument_error("section count must be in [1, 8]");
    if (!(ripple > 0.0) || !(ripple < 1.0) || !std::isfinite(ripple))
        throw argument_error("ripple must be in (0, 1)");
    if (ripple >= fresnel_magnitude(media))
        throw argument_error(
            "ripple is not below the bare-interface mismatch; no transformer needed");
    const double x = std::abs(detail::log_impedance_ratio(media)) / (2.0 * ripple);
    const double sec_tm = std::cosh(std::acosh(x) / n_sections);
    return std::acos(1.0 / sec_tm);
}

inline SectionPlan synth_chebyshev(const MediumPair& media, int n_sections, double ripple,
                                   double f0_hz) {
    detail::check_synth_args(media, n_sections, f0_hz);
    if (!(ripple > 0.0) || !(ripple < 1.0) || !std::isfinite(ripple))
        throw argument_error("ripple must be in (0, 1)");
    SectionPlan plan{XformerKind::chebyshev, media, f0_hz, ripple, {}};
    plan.sections.reserve(static_cast<std::size_t>(n_sections));
    if (media.eps_start == media.eps_end) {
        // nothing to match: identity sections in the common medium
        const double lnz = std::log(eta0_ohm) - 0.5 * std::log(media.eps_start);
        for (int n = 0; n < n_sections; ++n)
            plan.sections.push_back(detail::section_from_log_impedance(lnz, f0_hz));
        return plan;
    }
    const double theta_m = cheb_theta_m(media, n_sections, ripple);
    const double sec_tm = 1.0 / std::cos(theta_m);

    // Expand T_N(sec_tm * cos t) into a cosine series sum_k gamma[k] cos(k t)
    // using cos^m t = 2^-m * sum_j C(m, j) cos((m - 2j) t).
    const auto poly = detail::chebyshev_coeffs(n_sections);
    std::vector<double> gamma(static_cast<std::size_t>(n_sections) + 1, 0.0);
    for (std::size_t m = 0; m < poly.size(); ++m) {
        if (poly[m] == 0.0) continue;
        const double scale = poly[m] * std::pow(sec_tm, static_cast<double>(m));
        for (std::size_t jj = 0; jj <= m; ++jj) {
            const auto k = static_cast<std::size_t>(
                std::abs(static_cast<int>(m) - 2 * static_cast<int>(jj)));
            gamma[k] += scale * std::ldexp(static_cast<double>(binom_coeff(
                                               static_cast<int>(m), static_cast<int>(jj))),
                                           -static_cast<int>(m));
        }
    }
    // Total on-axis mismatch A * T_N(sec_tm) must equal half the log ratio,
    // which makes |A| equal the ripple by construction and the impedance
    // steps telescope exactly onto the exit medium.
    const double a =
        0.5 * detail::log_impedance_ratio(media) / detail::eval_poly(poly, sec_tm);
    double lnz = std::log(eta0_ohm) - 0.5 * std::log(media.eps_start);
    for (int n = 0; n < n_sections; ++n) {
        const int k = std::abs(n_sections - 2 * n);
        const double refl =
            (k == 0) ? a * gamma[0] : 0.5 * a * gamma[static_cast<std::size_t>(k)];
        lnz += 2.0 * refl;
        plan.sections.push_back(detail::section_from_log_impedance(lnz, f0_hz));
    }
    return plan;
}

inline SectionPlan synth(const TransformerSpec& spec, const MediumPair& media) {
    switch (spec.kind) {
        case XformerKind::quarter_wave:
            if (spec.sections != 1)
                throw argument_error("a quarter-wave transformer has exactly one section");
            return synth_quarter_wave(media, spec.f0_hz);
        case XformerKind::binomial:
            return synth_binomial(media, spec.sections, spec.f0_hz);
        case XformerKind::chebyshev:
            return synth_chebyshev(media, spec.sections, spec.ripple, spec.f0_hz);
    }
    throw argument_error("unknown transformer kind");
}

struct FbwEstimate {
    double fbw = 0.0;
    // false when the requested threshold sits below the design ripple floor
    bool reachable = true;
};

// Closed-form fractional bandwidth of the small-reflection response at a
// given reflection-magnitude threshold. Results are capped at 2 (the band
// cannot extend below DC in the theta domain).
inline FbwEstimate predicted_fbw(const TransformerSpec& spec, const MediumPair& media,
                                 double threshold) {
    validate(media);
    if (!(threshold > 0.0) || !(threshold < 1.0) || !std::isfinite(threshold))
        throw argument_error("threshold must be a reflection magnitude in (0, 1)");
    if (media.eps_start == media.eps_end) return {2.0, true};
    const int n = (spec.kind == XformerKind::quarter_wave) ? 1 : spec.sections;
    if (n < 1 || n > max_sections) throw argument_error("section count must be in [1, 8]");

    if (spec.kind == XformerKind::chebyshev) {
        if (threshold < spec.ripple) return {0.0, false};
        const double theta_m = cheb_theta_m(media, n, spec.ripple);
        const double y =
            std::cosh(std::acosh(threshold / spec.ripple) / n) * std::cos(theta_m);
        if (y >= 1.0) return {2.0, true};
        return {2.0 - 4.0 * std::acos(y) / std::numbers::pi, true};
    }
    // |Gamma(theta)| = |A| |2 cos(theta)|^N with A = 2^-(N+1) ln(Z_end/Z_start)
    const double a = std::ldexp(detail::log_impedance_ratio(media), -(n + 1));
    const double x = 0.5 * std::pow(threshold / std::abs(a), 1.0 / n);
    if (x >= 1.0) return {2.0, true};
    return {2.0 - 4.0 * std::acos(x) / std::numbers::pi, true};
}

}  // namespace dielens

#endif
