#ifndef DIELENS_CLI_HPP
#define DIELENS_CLI_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dielens/config.hpp"
#include "dielens/io.hpp"
#include "dielens/lens.hpp"
#include "dielens/solid.hpp"
#include "dielens/tmm.hpp"

// Command-line front end. Subcommands walk the pipeline in order:
//   synth   transformer sections for a media pair
//   sweep   frequency response and bandwidth of the realized stack
//   lens    full lens plan as CSV
//   export  STL geometry plus a manufacturability report
//   report  one consolidated text rundown of all of the above
// Exit codes: 0 success, 1 I/O failure, 2 usage or config error.

namespace dielens {

namespace detail {

// Transformer sections realized as unit-cell pins: permittivities go
// through the thickness mapping and back, so the sweep sees what a printed
// stack would actually present.
inline Stack realized_stack(const RunConfig& cfg) {
    const auto plan = sections_from_config(cfg);
    Stack s{plan.media.eps_start, plan.media.eps_end, {}};
    if (plan.sections.empty()) return s;
    const auto mapping = mapping_from_config(cfg);
    s.layers.reserve(plan.sections.size());
    for (const auto& sec : plan.sections) {
        const double t = thickness_of_eps(sec.eps, cfg.cell, mapping);
        s.layers.push_back(
            {eps_of_thickness(t, cfg.cell, mapping), cfg.loss_tangent, sec.length_mm});
    }
    return s;
}

inline std::vector<double> pin_sides(const SectionPlan& plan, const UnitCellGeometry& geom,
                                     const MappingModel& mapping) {
    std::vector<double> t;
    t.reserve(plan.sections.size());
    for (const auto& sec : plan.sections)
        t.push_back(thickness_of_eps(sec.eps, geom, mapping));
    return t;
}

inline void write_file(const std::string& path, const std::function<void(std::ostream&)>& fill) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open " + path + " for writing");
    fill(out);
    out.flush();
    if (!out) throw io_error("write to " + path + " failed");
}

inline std::string fbw_label(double threshold_db) {
    return "fbw_" + fmt_g(threshold_db) + "dB";
}

inline void sweep_summary(std::ostream& out, const SweepResult& res, double threshold_db) {
    const auto bw = bandwidth(res, threshold_db);
    out << fbw_label(threshold_db) << '=' << fmt_g(bw.fbw) << " band_ghz=["
        << fmt_g(bw.f_low_hz / 1e9) << ',' << fmt_g(bw.f_high_hz / 1e9) << ']'
        << " f0_ghz=" << fmt_g(res.f0_hz / 1e9);
    if (!bw.center_in_band) out << " (no band: above threshold at f0)";
    if (bw.clipped_low || bw.clipped_high) out << " (band clipped by sweep range)";
    out << '\n';
}

}  // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"stepped-pin dielectric lens design and export"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "synthesize transformer sections");
    std::string kind_token = "chebyshev";
    int n_sections = 0;
    double ripple = 0.0, f0_ghz = 80.0, eps_end = 2.738, eps_start = 1.0;
    double period_mm = 1.6, bulk_eps = 0.0;
    std::string csv_path;
    synth_cmd->add_option("--kind", kind_token, "quarter-wave|binomial|chebyshev")
        ->required();
    auto* n_opt = synth_cmd->add_option("--n", n_sections, "section count");
    auto* ripple_opt =
        synth_cmd->add_option("--ripple", ripple, "chebyshev passband |Gamma|");
    synth_cmd->add_option("--f0-ghz", f0_ghz, "design frequency")->capture_default_str();
    synth_cmd->add_option("--eps", eps_end, "final medium permittivity")->capture_default_str();
    synth_cmd->add_option("--eps-start", eps_start, "first medium permittivity")->capture_default_str();
    synth_cmd->add_option("--period-mm", period_mm, "unit cell period")->capture_default_str();
    synth_cmd->add_option("--bulk-eps", bulk_eps,
                          "unit cell bulk permittivity (default: max of the media)");
    synth_cmd->add_option("--csv", csv_path, "also write the sections as CSV");

    // shared by the config-driven commands
    std::string config_path;
    for (auto* c : {app.add_subcommand("sweep", "sweep the realized stack"),
                    app.add_subcommand("lens", "plan the lens and write its CSV"),
                    app.add_subcommand("export", "write STL and print report"),
                    app.add_subcommand("report", "consolidated text report")})
        c->add_option("--config", config_path, "config file (defaults apply without one)");

    auto* sweep_cmd = app.get_subcommand("sweep");
    auto* lens_cmd = app.get_subcommand("lens");
    auto* export_cmd = app.get_subcommand("export");
    auto* report_cmd = app.get_subcommand("report");

    double f_lo_ghz = 0.0, f_hi_ghz = 0.0, threshold_db = -20.0;
    std::size_t points = 0;
    std::string sweep_out = "sweep.csv";
    auto* flo_opt = sweep_cmd->add_option("--f-lo-ghz", f_lo_ghz, "sweep start");
    auto* fhi_opt = sweep_cmd->add_option("--f-hi-ghz", f_hi_ghz, "sweep end");
    auto* pts_opt = sweep_cmd->add_option("--points", points, "sweep point count");
    sweep_cmd->add_option("--threshold-db", threshold_db, "bandwidth threshold")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "sweep CSV path")->capture_default_str();

    std::string lens_out = "lens.csv";
    lens_cmd->add_option("--out", lens_out, "lens CSV path")->capture_default_str();

    std::string out_dir;
    bool snap_flag = false;
    auto* outdir_opt = export_cmd->add_option("--out-dir", out_dir, "output directory");
    auto* snap_opt = export_cmd->add_flag("--snap", snap_flag,
                                          "snap dimensions to the printer grid before export");
    report_cmd->add_option("--threshold-db", threshold_db, "bandwidth threshold")->capture_default_str();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        // keep the documented exit contract: help is success, usage errors are 2
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(synth_cmd)) {
            TransformerSpec spec;
            if (kind_token == "quarter-wave")
                spec.kind = XformerKind::quarter_wave;
            else if (kind_token == "binomial")
                spec.kind = XformerKind::binomial;
            else if (kind_token == "chebyshev")
                spec.kind = XformerKind::chebyshev;
            else
                throw argument_error("--kind must be quarter-wave|binomial|chebyshev");
            spec.f0_hz = f0_ghz * 1e9;
            if (spec.kind == XformerKind::quarter_wave) {
                spec.sections = n_opt->count() ? n_sections : 1;
            } else {
                if (!n_opt->count())
                    throw argument_error(kind_token + " synthesis needs --n");
                spec.sections = n_sections;
            }
            if (spec.kind == XformerKind::chebyshev) {
                if (!ripple_opt->count())
                    throw argument_error("chebyshev synthesis needs --ripple");
                spec.ripple = ripple;
            }
            const MediumPair media{eps_start, eps_end};
            const auto plan = synth(spec, media);
            UnitCellGeometry geom{period_mm,
                                  bulk_eps > 0.0 ? bulk_eps
                                                 : std::max(media.eps_start, media.eps_end)};
            const auto mapping = make_mapping(MixingRule::volume_fraction);
            const auto pins = detail::pin_sides(plan, geom, mapping);
            write_section_table(out, plan, &pins);
            if (!csv_path.empty())
                detail::write_file(csv_path,
                                   [&](std::ostream& f) { write_section_csv(f, plan, &pins); });
            return 0;
        }

        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);

        if (app.got_subcommand(sweep_cmd)) {
            if (flo_opt->count()) cfg.sweep.f_lo_hz = f_lo_ghz * 1e9;
            if (fhi_opt->count()) cfg.sweep.f_hi_hz = f_hi_ghz * 1e9;
            if (pts_opt->count()) cfg.sweep.points = points;
            const auto res = sweep(detail::realized_stack(cfg), cfg.sweep.f_lo_hz,
                                   cfg.sweep.f_hi_hz, cfg.sweep.points, cfg.xform.f0_hz);
            detail::write_file(sweep_out, [&](std::ostream& f) { write_sweep_csv(f, res); });
            detail::sweep_summary(out, res, threshold_db);
            return 0;
        }
        if (app.got_subcommand(lens_cmd)) {
            const auto plan = lens_from_config(cfg);
            detail::write_file(lens_out, [&](std::ostream& f) { write_lens_csv(f, plan); });
            write_lens_summary(out, plan);
            return 0;
        }
        if (app.got_subcommand(export_cmd)) {
            if (outdir_opt->count()) cfg.exports.output_dir = out_dir;
            if (snap_opt->count()) cfg.exports.snap = true;
            auto plan = lens_from_config(cfg);
            const auto geom = cfg.cell;
            const auto mapping = mapping_from_config(cfg);
            const auto report = check_printable(plan, cfg.exports.resolution_mm,
                                                cfg.exports.min_feature_mm, &geom, &mapping);
            if (cfg.exports.snap) plan = snap_to_grid(plan, cfg.exports.resolution_mm);
            const auto model = to_solid(plan, cfg.exports.base_thickness_mm);
            for (const auto& w : model.warnings) err << "warning: " << w << '\n';

            namespace fs = std::filesystem;
            std::error_code ec;
            fs::create_directories(cfg.exports.output_dir, ec);
            if (ec)
                throw io_error("cannot create " + cfg.exports.output_dir + ": " + ec.message());
            const auto stl_path = (fs::path(cfg.exports.output_dir) / "lens.stl").string();
            const auto bytes = write_stl(model, stl_path);
            detail::write_file(
                (fs::path(cfg.exports.output_dir) / "print_report.txt").string(),
                [&](std::ostream& f) { write_print_report_text(f, report); });
            detail::write_file(
                (fs::path(cfg.exports.output_dir) / "print_report.csv").string(),
                [&](std::ostream& f) { write_print_report_csv(f, report); });
            out << "wrote " << stl_path << " (" << bytes << " bytes, "
                << model.triangles.size() << " triangles) violations="
                << report.violations.size() << " off_grid=" << report.snapped_dims
                << (cfg.exports.snap ? " snapped" : "") << '\n';
            return 0;
        }
        // report
        const auto sections = sections_from_config(cfg);
        const auto mapping = mapping_from_config(cfg);
        const auto pins = detail::pin_sides(sections, cfg.cell, mapping);
        out << "== transformer ==\n";
        write_section_table(out, sections, &pins);
        out << "== stack response ==\n";
        const auto res = sweep(detail::realized_stack(cfg), cfg.sweep.f_lo_hz,
                               cfg.sweep.f_hi_hz, cfg.sweep.points, cfg.xform.f0_hz);
        detail::sweep_summary(out, res, threshold_db);
        out << "== lens ==\n";
        const auto plan = lens_from_config(cfg);
        write_lens_summary(out, plan);
        out << "== print check ==\n";
        write_print_report_text(out, check_printable(plan, cfg.exports.resolution_mm,
                                                     cfg.exports.min_feature_mm, &cfg.cell,
                                                     &mapping));
        return 0;
    } catch (const argument_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const validation_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const io_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace dielens

#endif
