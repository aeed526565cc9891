#ifndef DIELENS_IO_HPP
#define DIELENS_IO_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <system_error>

#include "dielens/effmed.hpp"
#include "dielens/errors.hpp"
#include "dielens/lens.hpp"
#include "dielens/solid.hpp"
#include "dielens/tmm.hpp"
#include "dielens/transformer.hpp"

// Plain-text output: CSV with one header row and locale-independent numbers
// at 9 significant digits, plus small human-readable summaries.

namespace dielens {

inline std::string fmt_g(double v, int significant = 9) {
    char buf[64];
    const auto r =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, significant);
    if (r.ec != std::errc{}) throw io_error("number formatting failed");
    return {buf, r.ptr};
}

inline const char* name_of(XformerKind k) {
    switch (k) {
        case XformerKind::quarter_wave: return "quarter-wave";
        case XformerKind::binomial: return "binomial";
        case XformerKind::chebyshev: return "chebyshev";
    }
    return "?";
}

inline const char* name_of(MixingRule r) {
    switch (r) {
        case MixingRule::volume_fraction: return "volume-fraction";
        case MixingRule::maxwell_garnett: return "maxwell-garnett";
        case MixingRule::lookup_table: return "lookup-table";
    }
    return "?";
}

// `pin sides` are optional: synthesis alone has no unit cell to map onto.
inline void write_section_csv(std::ostream& out, const SectionPlan& plan,
                              const std::vector<double>* pin_sides = nullptr) {
    out << "n,eps,impedance_ohm,length_mm,pin_side_mm\n";
    for (std::size_t n = 0; n < plan.sections.size(); ++n) {
        const auto& s = plan.sections[n];
        out << (n + 1) << ',' << fmt_g(s.eps) << ',' << fmt_g(s.impedance_ohm) << ','
            << fmt_g(s.length_mm) << ',';
        if (pin_sides && n < pin_sides->size()) out << fmt_g((*pin_sides)[n]);
        out << '\n';
    }
}

inline void write_section_table(std::ostream& out, const SectionPlan& plan,
                                const std::vector<double>* pin_sides = nullptr) {
    out << name_of(plan.kind) << ", " << plan.sections.size() << " section(s) at "
        << fmt_g(plan.f0_hz / 1e9) << " GHz, eps " << fmt_g(plan.media.eps_start) << " -> "
        << fmt_g(plan.media.eps_end);
    if (plan.kind == XformerKind::chebyshev) out << ", ripple " << fmt_g(plan.ripple);
    out << "\n  n        eps      length_mm     pin_side_mm\n";
    for (std::size_t n = 0; n < plan.sections.size(); ++n) {
        const auto& s = plan.sections[n];
        out << "  " << (n + 1) << "  " << fmt_g(s.eps) << "  " << fmt_g(s.length_mm);
        if (pin_sides && n < pin_sides->size()) out << "  " << fmt_g((*pin_sides)[n]);
        out << '\n';
    }
}

// dB magnitudes are floored so a perfect null stays finite in the file.
inline constexpr double csv_db_floor = -400.0;

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << "freq_hz,re_gamma,im_gamma,mag_gamma_db,re_tau,im_tau\n";
    for (std::size_t n = 0; n < r.freq_hz.size(); ++n) {
        const double mag = std::abs(r.gamma[n]);
        const double db =
            (mag > 0.0) ? std::max(20.0 * std::log10(mag), csv_db_floor) : csv_db_floor;
        out << fmt_g(r.freq_hz[n]) << ',' << fmt_g(r.gamma[n].real()) << ','
            << fmt_g(r.gamma[n].imag()) << ',' << fmt_g(db) << ',' << fmt_g(r.tau[n].real())
            << ',' << fmt_g(r.tau[n].imag()) << '\n';
    }
}

inline void write_lens_csv(std::ostream& out, const LensPlan& plan) {
    std::size_t n_layers = 0;
    if (!plan.elements.empty()) n_layers = plan.elements.front().face_layers.size();
    out << "i,j,x_mm,y_mm,R_mm,phase_rad,L_mm";
    for (std::size_t k = 1; k <= n_layers; ++k)
        out << ",t" << k << "_mm,l" << k << "_mm";
    out << '\n';
    for (const auto& e : plan.elements) {
        out << e.i << ',' << e.j << ',' << fmt_g(e.x_mm) << ',' << fmt_g(e.y_mm) << ','
            << fmt_g(e.focal_dist_mm) << ',' << fmt_g(e.phase_rad) << ','
            << fmt_g(e.body_len_mm);
        for (const auto& l : e.face_layers)
            out << ',' << fmt_g(l.pin_side_mm) << ',' << fmt_g(l.length_mm);
        out << '\n';
    }
}

inline void write_lens_summary(std::ostream& out, const LensPlan& plan) {
    double lo = 0.0, hi = 0.0;
    if (!plan.elements.empty()) {
        lo = hi = plan.elements.front().body_len_mm;
        for (const auto& e : plan.elements) {
            lo = std::min(lo, e.body_len_mm);
            hi = std::max(hi, e.body_len_mm);
        }
    }
    out << "elements=" << plan.elements.size() << " D_mm=" << fmt_g(plan.aperture_diam_mm)
        << " F_mm=" << fmt_g(plan.focal_len_mm) << " L_mm=[" << fmt_g(lo) << ',' << fmt_g(hi)
        << "] total_thickness_mm=" << fmt_g(plan.total_thickness_mm) << '\n';
}

inline void write_print_report_csv(std::ostream& out, const PrintReport& rep) {
    out << "kind,i,j,dimension,value_mm,limit_or_snapped_mm,eps_shift\n";
    for (const auto& v : rep.violations)
        out << "violation," << v.i << ',' << v.j << ',' << v.dimension << ',' << fmt_g(v.value)
            << ',' << fmt_g(v.limit) << ",\n";
    for (const auto& s : rep.snaps)
        out << "snap," << s.i << ',' << s.j << ',' << s.dimension << ',' << fmt_g(s.original)
            << ',' << fmt_g(s.snapped) << ',' << fmt_g(s.eps_shift) << '\n';
}

inline void write_print_report_text(std::ostream& out, const PrintReport& rep) {
    out << "print check: grid " << fmt_g(rep.resolution_mm) << " mm, min feature "
        << fmt_g(rep.min_feature_mm) << " mm\n";
    if (rep.violations.empty() && rep.snaps.empty()) {
        out << "  clean: all dimensions printable and on grid\n";
        return;
    }
    for (const auto& v : rep.violations) {
        out << "  VIOLATION " << v.dimension << " = " << fmt_g(v.value) << " mm (limit "
            << fmt_g(v.limit) << ")";
        if (v.i >= 0) out << " at element (" << v.i << ',' << v.j << ')';
        out << '\n';
    }
    out << "  off-grid dimensions: " << rep.snapped_dims << '\n';
    for (const auto& s : rep.snaps) {
        if (s.i >= 0) continue;  // per-element body snaps are CSV-only noise
        out << "  snap " << s.dimension << ' ' << fmt_g(s.original) << " -> "
            << fmt_g(s.snapped) << " mm";
        if (s.eps_shift != 0.0) out << " (eps shift " << fmt_g(s.eps_shift) << ')';
        out << '\n';
    }
}

}  // namespace dielens

#endif
