#ifndef DIELENS_LENS_HPP
#define DIELENS_LENS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <thread>
#include <vector>

#include "dielens/constants.hpp"
#include "dielens/effmed.hpp"
#include "dielens/errors.hpp"
#include "dielens/tmm.hpp"
#include "dielens/transformer.hpp"

// Discrete plano lens on a square grid. Each element is a dielectric column
// whose length realizes a collimating phase delay; matching layers sit
// symmetrically on both faces. Source-side phases follow the path-length
// condition psi_i = k (R_i - r_i . rhat0) + psi_0, so the aperture leaves the
// lens in phase along the chosen beam direction.

namespace dielens {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

enum class WrapMode { none, modulo_2pi };
enum class ApertureShape { square_grid_circular_trim, full_square };

struct LensSpec {
    double f0_hz = 80e9;
    double period_mm = 1.6;
    int elements_across = 35;
    double f_over_d = 0.55;
    double bulk_eps = 2.738;
    Vec3 beam_dir{0.0, 0.0, 1.0};
    double ref_phase_rad = 0.0;
    double min_body_len_mm = 2.0;
    WrapMode wrap = WrapMode::modulo_2pi;
    ApertureShape aperture = ApertureShape::square_grid_circular_trim;

    double aperture_diam_mm() const { return elements_across * period_mm; }
    double focal_len_mm() const { return f_over_d * aperture_diam_mm(); }
};

inline void validate(const LensSpec& s) {
    if (!(s.f0_hz > 0.0) || !std::isfinite(s.f0_hz))
        throw argument_error("design frequency must be positive");
    if (!(s.period_mm > 0.0) || !std::isfinite(s.period_mm))
        throw argument_error("grid period must be positive");
    if (s.elements_across < 1) throw argument_error("need at least one element across");
    if (!(s.f_over_d > 0.0) || !std::isfinite(s.f_over_d))
        throw argument_error("F/D must be positive");
    if (!(s.bulk_eps > 1.0) || !std::isfinite(s.bulk_eps))
        throw argument_error("bulk permittivity must exceed 1 to realize delay");
    if (std::abs(norm(s.beam_dir) - 1.0) > 1e-9)
        throw argument_error("beam direction must be a unit vector");
    if (!(s.min_body_len_mm >= 0.0) || !std::isfinite(s.min_body_len_mm))
        throw argument_error("minimum body length must be >= 0");
}

struct FaceLayer {
    double pin_side_mm = 0.0;
    double length_mm = 0.0;
    double eps = 1.0;
};

struct ElementPlan {
    int i = 0, j = 0;
    double x_mm = 0.0, y_mm = 0.0;
    double focal_dist_mm = 0.0;
    double phase_rad = 0.0;
    double body_len_mm = 0.0;
    std::vector<FaceLayer> face_layers;  // one face; mirrored on the other
};

struct LensPlan {
    LensSpec spec;
    std::vector<ElementPlan> elements;
    double aperture_diam_mm = 0.0;
    double focal_len_mm = 0.0;
    double total_thickness_mm = 0.0;
};

// Grid positions and focal distances, row-major in (i, j), centered on the
// axis. Circular trim drops elements whose centers fall outside the aperture
// circle.
inline std::vector<ElementPlan> layout_elements(const LensSpec& spec) {
    validate(spec);
    const int n = spec.elements_across;
    const double half = 0.5 * (n - 1);
    const double f = spec.focal_len_mm();
    const double r_max = 0.5 * spec.aperture_diam_mm();
    std::vector<ElementPlan> out;
    out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            ElementPlan e;
            e.i = i;
            e.j = j;
            e.x_mm = (i - half) * spec.period_mm;
            e.y_mm = (j - half) * spec.period_mm;
            const double r = std::hypot(e.x_mm, e.y_mm);
            if (spec.aperture == ApertureShape::square_grid_circular_trim && r > r_max)
                continue;
            e.focal_dist_mm = std::hypot(f, r);
            out.push_back(e);
        }
    }
    return out;
}

// Source-side phase of each element in layout order. With modulo wrapping
// the profile is reduced to [0, 2pi) above its minimum, which bounds the
// realizable delay span to one wavelength.
inline std::vector<double> phase_profile(const LensSpec& spec) {
    const auto elements = layout_elements(spec);
    const double k = wavenumber(spec.f0_hz);
    std::vector<double> psi;
    psi.reserve(elements.size());
    for (const auto& e : elements) {
        const double proj = e.x_mm * spec.beam_dir.x + e.y_mm * spec.beam_dir.y;
        psi.push_back(k * (e.focal_dist_mm - proj) + spec.ref_phase_rad);
    }
    if (spec.wrap == WrapMode::modulo_2pi && !psi.empty()) {
        const double lo = *std::min_element(psi.begin(), psi.end());
        for (auto& p : psi) {
            p = std::fmod(p - lo, 2.0 * std::numbers::pi);
            if (p < 0.0) p += 2.0 * std::numbers::pi;
        }
    }
    return psi;
}

// Delay-line realization: the element with the largest phase requirement
// keeps the minimum body, everything else adds length to make up its phase
// deficit relative to that maximum.
inline std::vector<double> lengths_from_phase(const std::vector<double>& phases,
                                              const LensSpec& spec) {
    validate(spec);
    std::vector<double> len;
    len.reserve(phases.size());
    if (phases.empty()) return len;
    const double k = wavenumber(spec.f0_hz);
    const double slowing = std::sqrt(spec.bulk_eps) - 1.0;
    const double hi = *std::max_element(phases.begin(), phases.end());
    for (const auto p : phases) len.push_back(spec.min_body_len_mm + (hi - p) / (k * slowing));
    return len;
}

inline LensPlan design_lens(const LensSpec& spec) {
    LensPlan plan;
    plan.spec = spec;
    plan.elements = layout_elements(spec);
    plan.aperture_diam_mm = spec.aperture_diam_mm();
    plan.focal_len_mm = spec.focal_len_mm();
    const auto psi = phase_profile(spec);
    const auto len = lengths_from_phase(psi, spec);
    double thickest = 0.0;
    for (std::size_t n = 0; n < plan.elements.size(); ++n) {
        plan.elements[n].phase_rad = psi[n];
        plan.elements[n].body_len_mm = len[n];
        thickest = std::max(thickest, len[n]);
    }
    plan.total_thickness_mm = thickest;
    return plan;
}

// Realize a transformer plan as per-face pin layers, identical on both
// faces of every element. Layer order is air side first. Sections are
// realized at the pin side that reproduces their permittivity in the unit
// cell, so the stack survives a round trip through the mapping.
inline LensPlan attach_matching(const LensPlan& plan, const SectionPlan& sections,
                                const UnitCellGeometry& geom, const MappingModel& model) {
    std::vector<FaceLayer> layers;
    layers.reserve(sections.sections.size());
    double per_face = 0.0;
    for (const auto& s : sections.sections) {
        if (!(s.eps >= 1.0) || s.eps > plan.spec.bulk_eps + 1e-12)
            throw argument_error("section permittivity is outside [1, bulk]; cannot map to a pin");
        FaceLayer l;
        l.eps = s.eps;
        l.length_mm = s.length_mm;
        l.pin_side_mm = thickness_of_eps(s.eps, geom, model);
        per_face += l.length_mm;
        layers.push_back(l);
    }
    LensPlan out = plan;
    double thickest = 0.0;
    for (auto& e : out.elements) {
        e.face_layers = layers;
        thickest = std::max(thickest, 2.0 * per_face + e.body_len_mm);
    }
    out.total_thickness_mm = thickest;
    return out;
}

struct FeedModel {
    double pattern_exponent = 2.0;  // cos^q amplitude taper
    std::optional<Vec3> position;   // defaults to on-axis at -F
};

inline void validate(const FeedModel& f) {
    if (!(f.pattern_exponent >= 0.0) || !std::isfinite(f.pattern_exponent))
        throw argument_error("feed pattern exponent must be finite and >= 0");
}

struct PatternGrid {
    std::size_t n_polar = 91;    // theta in [0, pi/2], both ends included
    std::size_t n_azimuth = 181;  // phi in [0, 2pi), open at the top
};

struct Pattern {
    std::vector<double> theta_rad;
    std::vector<double> phi_rad;
    std::vector<double> power;  // |E|^2, row-major theta x phi
    double peak_theta_rad = 0.0;
    double peak_phi_rad = 0.0;
    double directivity_dbi = 0.0;
};

namespace detail {

struct ApertureSample {
    double x, y, amp, phase;
};

inline void run_rows(std::size_t n_rows, const std::function<void(std::size_t)>& row_job) {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers < 2 || n_rows < 8) {
        for (std::size_t r = 0; r < n_rows; ++r) row_job(r);
        return;
    }
    workers = std::min<unsigned>(workers, 16);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t r = w; r < n_rows; r += workers) row_job(r);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Scalar aperture estimate of the far field. Each element contributes its
// feed illumination advanced by the extra electrical delay of its column, so
// a well designed lens peaks along the design beam direction. Every
// direction bin is computed independently; rows are distributed over threads.
inline Pattern estimate_pattern(const LensPlan& plan, const FeedModel& feed, double f_hz,
                                const PatternGrid& grid = {}) {
    validate(feed);
    if (plan.elements.empty()) throw argument_error("lens plan has no elements");
    if (!(f_hz > 0.0) || !std::isfinite(f_hz))
        throw argument_error("frequency must be positive");
    if (grid.n_polar < 2 || grid.n_azimuth < 1)
        throw argument_error("pattern grid is too coarse");
    const double k = wavenumber(f_hz);
    const Vec3 feed_pos = feed.position.value_or(Vec3{0.0, 0.0, -plan.focal_len_mm});
    const double feed_dist = norm(feed_pos);
    if (!(feed_dist > 0.0)) throw argument_error("feed cannot sit at the lens center");
    // boresight of the feed points at the lens center
    const Vec3 bore{-feed_pos.x / feed_dist, -feed_pos.y / feed_dist, -feed_pos.z / feed_dist};

    const double slowing = std::sqrt(plan.spec.bulk_eps) - 1.0;
    std::vector<detail::ApertureSample> ap;
    ap.reserve(plan.elements.size());
    for (const auto& e : plan.elements) {
        const Vec3 leg{e.x_mm - feed_pos.x, e.y_mm - feed_pos.y, -feed_pos.z};
        const double rho = norm(leg);
        const double ct = dot(leg, bore) / rho;
        const double amp = (ct > 0.0) ? std::pow(ct, feed.pattern_exponent) / rho : 0.0;
        double delay = rho + slowing * e.body_len_mm;
        for (const auto& l : e.face_layers)
            delay += 2.0 * (std::sqrt(l.eps) - 1.0) * l.length_mm;
        ap.push_back({e.x_mm, e.y_mm, amp, -k * delay});
    }

    Pattern p;
    p.theta_rad.resize(grid.n_polar);
    p.phi_rad.resize(grid.n_azimuth);
    for (std::size_t m = 0; m < grid.n_polar; ++m)
        p.theta_rad[m] = 0.5 * std::numbers::pi * static_cast<double>(m) /
                         static_cast<double>(grid.n_polar - 1);
    for (std::size_t n = 0; n < grid.n_azimuth; ++n)
        p.phi_rad[n] =
            2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(grid.n_azimuth);
    p.power.assign(grid.n_polar * grid.n_azimuth, 0.0);

    detail::run_rows(grid.n_polar, [&](std::size_t m) {
        const double st = std::sin(p.theta_rad[m]);
        for (std::size_t n = 0; n < grid.n_azimuth; ++n) {
            const double ux = st * std::cos(p.phi_rad[n]);
            const double uy = st * std::sin(p.phi_rad[n]);
            std::complex<double> e{0.0, 0.0};
            for (const auto& s : ap)
                e += s.amp * std::polar(1.0, s.phase + k * (s.x * ux + s.y * uy));
            p.power[m * grid.n_azimuth + n] = std::norm(e);
        }
    });

    std::size_t pk = 0;
    double u_pk = 0.0, p_rad = 0.0;
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(grid.n_azimuth);
    const double dtheta = 0.5 * std::numbers::pi / static_cast<double>(grid.n_polar - 1);
    for (std::size_t m = 0; m < grid.n_polar; ++m) {
        const double w = (m == 0 || m + 1 == grid.n_polar) ? 0.5 : 1.0;
        for (std::size_t n = 0; n < grid.n_azimuth; ++n) {
            const double u = p.power[m * grid.n_azimuth + n];
            if (u > u_pk) {
                u_pk = u;
                pk = m * grid.n_azimuth + n;
            }
            p_rad += w * u * std::sin(p.theta_rad[m]) * dtheta * dphi;
        }
    }
    if (!(p_rad > 0.0)) throw argument_error("aperture radiates no power; check the feed");
    p.peak_theta_rad = p.theta_rad[pk / grid.n_azimuth];
    p.peak_phi_rad = p.phi_rad[pk % grid.n_azimuth];
    p.directivity_dbi = 10.0 * std::log10(4.0 * std::numbers::pi * u_pk / p_rad);
    return p;
}

}  // namespace dielens

#endif
