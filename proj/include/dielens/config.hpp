#ifndef DIELENS_CONFIG_HPP
#define DIELENS_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <string>

#include "dielens/effmed.hpp"
#include "dielens/errors.hpp"
#include "dielens/lens.hpp"
#include "dielens/transformer.hpp"

// Run configuration parsed from `key = value` lines under bracketed section
// headers. Keys carry their units; anything unrecognized is rejected with
// its line number rather than silently ignored.

namespace dielens {

struct SweepRange {
    double f_lo_hz = 50e9;
    double f_hi_hz = 110e9;
    std::size_t points = 601;
};

struct ExportOptions {
    std::string output_dir = "out";
    double base_thickness_mm = 1.0;
    double resolution_mm = 0.025;
    double min_feature_mm = 0.1;
    bool snap = false;
};

struct RunConfig {
    TransformerSpec xform{XformerKind::chebyshev, 3, 0.01, 80e9};
    double eps_start = 1.0;
    std::optional<double> eps_end;  // defaults to the unit cell bulk
    bool bare = false;              // sections = 0: no matching layers anywhere
    UnitCellGeometry cell{};
    MixingRule rule = MixingRule::volume_fraction;
    double loss_tangent = 0.0;
    std::string calibration_csv;
    SweepRange sweep{};
    LensSpec lens{};
    double feed_q = 2.0;
    ExportOptions exports{};

    MediumPair media() const { return {eps_start, eps_end.value_or(cell.bulk_eps)}; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline validation_error bad_line(std::size_t lineno, const std::string& what) {
    return validation_error("config line " + std::to_string(lineno) + ": " + what);
}

inline double num(const std::string& v, std::size_t lineno) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        throw bad_line(lineno, "`" + v + "` is not a number");
    return x;
}

inline long integer(const std::string& v, std::size_t lineno) {
    long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        throw bad_line(lineno, "`" + v + "` is not an integer");
    return x;
}

inline bool boolean(const std::string& v, std::size_t lineno) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw bad_line(lineno, "`" + v + "` is not true/false");
}

inline XformerKind xformer_kind(const std::string& v, std::size_t lineno) {
    if (v == "quarter-wave") return XformerKind::quarter_wave;
    if (v == "binomial") return XformerKind::binomial;
    if (v == "chebyshev") return XformerKind::chebyshev;
    throw bad_line(lineno, "kind must be quarter-wave|binomial|chebyshev");
}

inline MixingRule mixing_rule(const std::string& v, std::size_t lineno) {
    if (v == "volume-fraction") return MixingRule::volume_fraction;
    if (v == "maxwell-garnett") return MixingRule::maxwell_garnett;
    if (v == "lookup-table") return MixingRule::lookup_table;
    throw bad_line(lineno, "mixing_rule must be volume-fraction|maxwell-garnett|lookup-table");
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string section;
    std::string line;
    std::size_t lineno = 0;
    double beam_theta_deg = 0.0, beam_phi_deg = 0.0;
    bool beam_set = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw detail::bad_line(lineno, "unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "transformer" && section != "sweep" && section != "unit_cell" &&
                section != "lens" && section != "export")
                throw detail::bad_line(lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw detail::bad_line(lineno, "expected `key = value`");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw detail::bad_line(lineno, "expected `key = value`");
        if (section.empty())
            throw detail::bad_line(lineno, "key outside any [section]");

        if (section == "transformer") {
            if (key == "kind")
                cfg.xform.kind = detail::xformer_kind(val, lineno);
            else if (key == "sections") {
                const long n = detail::integer(val, lineno);
                if (n < 0 || n > max_sections)
                    throw detail::bad_line(lineno, "sections must be in [0, 8]");
                cfg.bare = (n == 0);
                cfg.xform.sections = cfg.bare ? 1 : static_cast<int>(n);
            } else if (key == "ripple")
                cfg.xform.ripple = detail::num(val, lineno);
            else if (key == "f0_ghz")
                cfg.xform.f0_hz = detail::num(val, lineno) * 1e9;
            else if (key == "eps_start")
                cfg.eps_start = detail::num(val, lineno);
            else if (key == "eps_end")
                cfg.eps_end = detail::num(val, lineno);
            else
                throw detail::bad_line(lineno, "unknown key `" + key + "` in [transformer]");
        } else if (section == "sweep") {
            if (key == "f_lo_ghz")
                cfg.sweep.f_lo_hz = detail::num(val, lineno) * 1e9;
            else if (key == "f_hi_ghz")
                cfg.sweep.f_hi_hz = detail::num(val, lineno) * 1e9;
            else if (key == "points") {
                const long n = detail::integer(val, lineno);
                if (n < 2) throw detail::bad_line(lineno, "points must be >= 2");
                cfg.sweep.points = static_cast<std::size_t>(n);
            } else
                throw detail::bad_line(lineno, "unknown key `" + key + "` in [sweep]");
        } else if (section == "unit_cell") {
            if (key == "period_mm")
                cfg.cell.period_mm = detail::num(val, lineno);
            else if (key == "bulk_eps")
                cfg.cell.bulk_eps = detail::num(val, lineno);
            else if (key == "mixing_rule")
                cfg.rule = detail::mixing_rule(val, lineno);
            else if (key == "loss_tangent")
                cfg.loss_tangent = detail::num(val, lineno);
            else if (key == "calibration_csv")
                cfg.calibration_csv = val;
            else
                throw detail::bad_line(lineno, "unknown key `" + key + "` in [unit_cell]");
        } else if (section == "lens") {
            if (key == "elements_across")
                cfg.lens.elements_across = static_cast<int>(detail::integer(val, lineno));
            else if (key == "f_over_d")
                cfg.lens.f_over_d = detail::num(val, lineno);
            else if (key == "feed_q")
                cfg.feed_q = detail::num(val, lineno);
            else if (key == "min_body_len_mm")
                cfg.lens.min_body_len_mm = detail::num(val, lineno);
            else if (key == "ref_phase_rad")
                cfg.lens.ref_phase_rad = detail::num(val, lineno);
            else if (key == "wrap") {
                if (val == "none")
                    cfg.lens.wrap = WrapMode::none;
                else if (val == "modulo-2pi")
                    cfg.lens.wrap = WrapMode::modulo_2pi;
                else
                    throw detail::bad_line(lineno, "wrap must be none|modulo-2pi");
            } else if (key == "aperture") {
                if (val == "square-grid-circular-trim")
                    cfg.lens.aperture = ApertureShape::square_grid_circular_trim;
                else if (val == "full-square")
                    cfg.lens.aperture = ApertureShape::full_square;
                else
                    throw detail::bad_line(lineno,
                                           "aperture must be square-grid-circular-trim|full-square");
            } else if (key == "beam_theta_deg") {
                beam_theta_deg = detail::num(val, lineno);
                beam_set = true;
            } else if (key == "beam_phi_deg") {
                beam_phi_deg = detail::num(val, lineno);
                beam_set = true;
            } else
                throw detail::bad_line(lineno, "unknown key `" + key + "` in [lens]");
        } else {  // export
            if (key == "output_dir")
                cfg.exports.output_dir = val;
            else if (key == "base_plate_mm")
                cfg.exports.base_thickness_mm = detail::num(val, lineno);
            else if (key == "resolution_mm")
                cfg.exports.resolution_mm = detail::num(val, lineno);
            else if (key == "min_feature_mm")
                cfg.exports.min_feature_mm = detail::num(val, lineno);
            else if (key == "snap")
                cfg.exports.snap = detail::boolean(val, lineno);
            else
                throw detail::bad_line(lineno, "unknown key `" + key + "` in [export]");
        }
    }
    if (beam_set) {
        const double th = beam_theta_deg * std::numbers::pi / 180.0;
        const double ph = beam_phi_deg * std::numbers::pi / 180.0;
        cfg.lens.beam_dir = {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                             std::cos(th)};
    }
    // the lens shares the transformer's design frequency and the unit cell
    cfg.lens.f0_hz = cfg.xform.f0_hz;
    cfg.lens.period_mm = cfg.cell.period_mm;
    cfg.lens.bulk_eps = cfg.cell.bulk_eps;
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read config file " + path);
    return parse_config(in);
}

inline MappingModel mapping_from_config(const RunConfig& cfg) {
    if (cfg.rule != MixingRule::lookup_table) return make_mapping(cfg.rule);
    if (cfg.calibration_csv.empty())
        throw validation_error("lookup-table mixing needs calibration_csv in [unit_cell]");
    std::ifstream in(cfg.calibration_csv);
    if (!in) throw io_error("cannot read calibration file " + cfg.calibration_csv);
    return read_calibration_csv(in);
}

inline SectionPlan sections_from_config(const RunConfig& cfg) {
    if (cfg.bare) return {cfg.xform.kind, cfg.media(), cfg.xform.f0_hz, 0.0, {}};
    return synth(cfg.xform, cfg.media());
}

inline LensPlan lens_from_config(const RunConfig& cfg) {
    LensPlan plan = design_lens(cfg.lens);
    if (cfg.bare) return plan;
    return attach_matching(plan, sections_from_config(cfg), cfg.cell,
                           mapping_from_config(cfg));
}

}  // namespace dielens

#endif
