#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dielens/cli.hpp"
#include "dielens/config.hpp"

using namespace dielens;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static std::mt19937_64 rng{std::random_device{}()};
    const auto d = fs::temp_directory_path() / ("dielens-test-" + std::to_string(rng()));
    fs::create_directories(d);
    return d;
}

fs::path write_text(const fs::path& dir, const std::string& name, const std::string& body) {
    const auto p = dir / name;
    std::ofstream out(p);
    out << body;
    REQUIRE(out.good());
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

struct CliRun {
    int rc = 0;
    std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int rc = run_cli(std::move(args), out, err);
    return {rc, out.str(), err.str()};
}

double number_after(const std::string& text, const std::string& tag) {
    const auto pos = text.find(tag);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + tag.size()));
}

}  // namespace

TEST_CASE("config parsing") {
    SECTION("every section and key lands in the run config") {
        std::istringstream in(R"(# lens run
[transformer]
kind = binomial
sections = 2
ripple = 0.03
f0_ghz = 75
eps_start = 1.2
eps_end = 2.5

[sweep]
f_lo_ghz = 40     # inline comment
f_hi_ghz = 120
points = 321

[unit_cell]
period_mm = 2.0
bulk_eps = 2.9
mixing_rule = maxwell-garnett
loss_tangent = 0.002
calibration_csv = cal.csv

[lens]
elements_across = 11
f_over_d = 0.6
feed_q = 3.5
min_body_len_mm = 1.5
ref_phase_rad = 0.25
wrap = none
aperture = full-square
beam_theta_deg = 10
beam_phi_deg = 90

[export]
output_dir = build/out
base_plate_mm = 0.8
resolution_mm = 0.05
min_feature_mm = 0.2
snap = true
)");
        const auto cfg = parse_config(in);
        CHECK(cfg.xform.kind == XformerKind::binomial);
        CHECK(cfg.xform.sections == 2);
        CHECK(cfg.xform.ripple == 0.03);
        CHECK(cfg.xform.f0_hz == 75e9);
        CHECK_FALSE(cfg.bare);
        CHECK(cfg.media().eps_start == 1.2);
        CHECK(cfg.media().eps_end == 2.5);
        CHECK(cfg.sweep.f_lo_hz == 40e9);
        CHECK(cfg.sweep.f_hi_hz == 120e9);
        CHECK(cfg.sweep.points == 321);
        CHECK(cfg.cell.period_mm == 2.0);
        CHECK(cfg.cell.bulk_eps == 2.9);
        CHECK(cfg.rule == MixingRule::maxwell_garnett);
        CHECK(cfg.loss_tangent == 0.002);
        CHECK(cfg.calibration_csv == "cal.csv");
        CHECK(cfg.lens.elements_across == 11);
        CHECK(cfg.lens.f_over_d == 0.6);
        CHECK(cfg.feed_q == 3.5);
        CHECK(cfg.lens.min_body_len_mm == 1.5);
        CHECK(cfg.lens.ref_phase_rad == 0.25);
        CHECK(cfg.lens.wrap == WrapMode::none);
        CHECK(cfg.lens.aperture == ApertureShape::full_square);
        const double th = 10.0 * std::numbers::pi / 180.0;
        CHECK_THAT(cfg.lens.beam_dir.x, WithinAbs(0.0, 1e-12));
        CHECK_THAT(cfg.lens.beam_dir.y, WithinRel(std::sin(th), 1e-12));
        CHECK_THAT(cfg.lens.beam_dir.z, WithinRel(std::cos(th), 1e-12));
        CHECK(cfg.exports.output_dir == "build/out");
        CHECK(cfg.exports.base_thickness_mm == 0.8);
        CHECK(cfg.exports.resolution_mm == 0.05);
        CHECK(cfg.exports.min_feature_mm == 0.2);
        CHECK(cfg.exports.snap);
        // the lens inherits the design frequency and the unit cell
        CHECK(cfg.lens.f0_hz == 75e9);
        CHECK(cfg.lens.period_mm == 2.0);
        CHECK(cfg.lens.bulk_eps == 2.9);
    }
    SECTION("an empty stream yields the defaults") {
        std::istringstream in("");
        const auto cfg = parse_config(in);
        CHECK(cfg.xform.kind == XformerKind::chebyshev);
        CHECK(cfg.xform.sections == 3);
        CHECK(cfg.xform.ripple == 0.01);
        CHECK(cfg.xform.f0_hz == 80e9);
        CHECK(cfg.media().eps_start == 1.0);
        CHECK(cfg.media().eps_end == 2.738);  // bulk fills in
        CHECK(cfg.sweep.points == 601);
        CHECK(cfg.lens.elements_across == 35);
    }
    SECTION("sections = 0 marks a bare run") {
        std::istringstream in("[transformer]\nsections = 0\n");
        const auto cfg = parse_config(in);
        CHECK(cfg.bare);
        CHECK(cfg.xform.sections == 1);  // kept valid for the synthesizer
        CHECK(sections_from_config(cfg).sections.empty());
    }
    SECTION("rejects carry line numbers") {
        std::istringstream unknown_key("[transformer]\nkind = chebyshev\nfoo = 1\n");
        CHECK_THROWS_MATCHES(parse_config(unknown_key), validation_error,
                             MessageMatches(ContainsSubstring("config line 3") &&
                                            ContainsSubstring("unknown key `foo`")));
        std::istringstream unknown_section("[physics]\n");
        CHECK_THROWS_WITH(parse_config(unknown_section),
                          ContainsSubstring("unknown section [physics]"));
        std::istringstream bad_number("[transformer]\nripple = fast\n");
        CHECK_THROWS_WITH(parse_config(bad_number),
                          ContainsSubstring("`fast` is not a number"));
        std::istringstream no_equals("[transformer]\nkind chebyshev\n");
        CHECK_THROWS_WITH(parse_config(no_equals), ContainsSubstring("expected `key = value`"));
        std::istringstream stray("kind = chebyshev\n");
        CHECK_THROWS_WITH(parse_config(stray), ContainsSubstring("outside any [section]"));
        std::istringstream too_many("[transformer]\nsections = 9\n");
        CHECK_THROWS_WITH(parse_config(too_many), ContainsSubstring("[0, 8]"));
        std::istringstream one_point("[sweep]\npoints = 1\n");
        CHECK_THROWS_WITH(parse_config(one_point), ContainsSubstring("points must be >= 2"));
        std::istringstream bad_wrap("[lens]\nwrap = diagonal\n");
        CHECK_THROWS_WITH(parse_config(bad_wrap), ContainsSubstring("wrap must be"));
        std::istringstream open_header("[lens\n");
        CHECK_THROWS_WITH(parse_config(open_header), ContainsSubstring("unterminated"));
        std::istringstream bad_bool("[export]\nsnap = maybe\n");
        CHECK_THROWS_WITH(parse_config(bad_bool), ContainsSubstring("not true/false"));
    }
    SECTION("missing config file is an io error") {
        CHECK_THROWS_AS(load_config("/no/such/file.conf"), io_error);
    }
    SECTION("lookup-table mixing insists on a calibration file") {
        std::istringstream in("[unit_cell]\nmixing_rule = lookup-table\n");
        const auto cfg = parse_config(in);
        CHECK_THROWS_AS(mapping_from_config(cfg), validation_error);
    }
}

TEST_CASE("cli synth") {
    SECTION("chebyshev table carries the synthesized dimensions and pin sides") {
        const auto r = cli({"synth", "--kind", "chebyshev", "--n", "3", "--ripple", "0.01"});
        CHECK(r.rc == 0);
        CHECK_THAT(r.out, ContainsSubstring("chebyshev, 3 section(s) at 80 GHz"));
        CHECK_THAT(r.out, ContainsSubstring("ripple 0.01"));
        CHECK_THAT(r.out, ContainsSubstring("1.16839109"));   // first section eps
        CHECK_THAT(r.out, ContainsSubstring("0.866715585"));  // first section length
        CHECK_THAT(r.out, ContainsSubstring("0.49802902"));   // first pin side
    }
    SECTION("quarter-wave defaults to one section") {
        const auto r = cli({"synth", "--kind", "quarter-wave"});
        CHECK(r.rc == 0);
        CHECK_THAT(r.out, ContainsSubstring("quarter-wave, 1 section(s)"));
        CHECK_THAT(r.out, ContainsSubstring("1.6546903"));
        CHECK_THAT(r.out, ContainsSubstring("0.728303444"));
    }
    SECTION("csv flag writes the same sections as a file") {
        const auto dir = temp_dir();
        const auto path = (dir / "sections.csv").string();
        const auto r = cli({"synth", "--kind", "chebyshev", "--n", "3", "--ripple", "0.01",
                            "--csv", path});
        CHECK(r.rc == 0);
        const auto body = slurp(path);
        CHECK_THAT(body, ContainsSubstring("n,eps,impedance_ohm,length_mm,pin_side_mm"));
        CHECK_THAT(body, ContainsSubstring("1,1.16839109,"));
        CHECK(line_count(body) == 4);
    }
    SECTION("usage rejects") {
        CHECK(cli({"synth", "--kind", "chebyshev", "--n", "3"}).rc == 2);  // no ripple
        CHECK_THAT(cli({"synth", "--kind", "chebyshev", "--n", "3"}).err,
                   ContainsSubstring("needs --ripple"));
        CHECK(cli({"synth", "--kind", "binomial"}).rc == 2);  // no n
        CHECK_THAT(cli({"synth", "--kind", "binomial"}).err, ContainsSubstring("needs --n"));
        CHECK(cli({"synth", "--kind", "quarter-wave", "--n", "2"}).rc == 2);
        CHECK(cli({"synth", "--kind", "butterworth", "--n", "2"}).rc == 2);
        CHECK(cli({"synth"}).rc == 2);  // --kind is required
        CHECK(cli({"synth", "--kind", "binomial", "--n", "2", "--frobnicate"}).rc == 2);
        CHECK(cli({}).rc == 2);  // a subcommand is required
    }
    SECTION("help is success") {
        const auto r = cli({"--help"});
        CHECK(r.rc == 0);
        CHECK_THAT(r.out, ContainsSubstring("synth"));
        CHECK_THAT(r.out, ContainsSubstring("export"));
    }
}

TEST_CASE("cli sweep") {
    const auto dir = temp_dir();
    const auto cfg = write_text(dir, "qw.conf",
                                "[transformer]\nkind = quarter-wave\nsections = 1\n");

    SECTION("quarter-wave stack lands on its textbook bandwidth") {
        const auto csv = (dir / "sweep.csv").string();
        const auto r = cli({"sweep", "--config", cfg.string(), "--out", csv});
        CHECK(r.rc == 0);
        CHECK_THAT(number_after(r.out, "fbw_-20dB="), WithinAbs(0.5169, 1e-3));
        CHECK_THAT(r.out, ContainsSubstring("f0_ghz=80"));
        const auto body = slurp(csv);
        CHECK_THAT(body, ContainsSubstring("freq_hz,re_gamma,im_gamma,mag_gamma_db,re_tau,im_tau"));
        CHECK(line_count(body) == 602);

        const auto csv2 = (dir / "sweep2.csv").string();
        CHECK(cli({"sweep", "--config", cfg.string(), "--out", csv2}).rc == 0);
        CHECK(slurp(csv2) == body);  // rerun is byte-identical
    }
    SECTION("threshold flag renames the figure") {
        const auto r = cli({"sweep", "--config", cfg.string(), "--threshold-db", "-30",
                            "--out", (dir / "t30.csv").string()});
        CHECK(r.rc == 0);
        CHECK_THAT(r.out, ContainsSubstring("fbw_-30dB="));
    }
    SECTION("range flags override the config and must bracket f0") {
        const auto r = cli({"sweep", "--config", cfg.string(), "--f-lo-ghz", "90",
                            "--f-hi-ghz", "110", "--out", (dir / "o.csv").string()});
        CHECK(r.rc == 2);
        CHECK_THAT(r.err, ContainsSubstring("error:"));
    }
    SECTION("a bare interface never reaches -20 dB") {
        const auto bare = write_text(dir, "bare.conf", "[transformer]\nsections = 0\n");
        const auto r = cli({"sweep", "--config", bare.string(),
                            "--out", (dir / "bare.csv").string()});
        CHECK(r.rc == 0);
        CHECK_THAT(r.out, ContainsSubstring("(no band"));
        CHECK_THAT(number_after(r.out, "fbw_-20dB="), WithinAbs(0.0, 1e-12));
    }
    SECTION("calibrated lookup-table mixing runs end to end") {
        const auto cal = write_text(dir, "cal.csv",
                                    "t_mm,eps\n0.0,1.0\n0.4,1.11\n0.8,1.43\n1.2,1.98\n1.6,2.738\n");
        const auto lut = write_text(dir, "lut.conf",
                                    "[unit_cell]\nmixing_rule = lookup-table\ncalibration_csv = " +
                                        cal.string() + "\n");
        const auto r = cli({"sweep", "--config", lut.string(),
                            "--out", (dir / "lut.csv").string()});
        CHECK(r.rc == 0);
        CHECK_THAT(r.out, ContainsSubstring("fbw_-20dB="));
    }
    SECTION("unreadable config is an io failure") {
        const auto r = cli({"sweep", "--config", "/no/such/file.conf",
                            "--out", (dir / "x.csv").string()});
        CHECK(r.rc == 1);
        CHECK_THAT(r.err, ContainsSubstring("cannot read config"));
    }
}

TEST_CASE("cli lens") {
    const auto dir = temp_dir();
    const auto csv = (dir / "lens.csv").string();
    const auto r = cli({"lens", "--out", csv});
    CHECK(r.rc == 0);
    CHECK_THAT(r.out, ContainsSubstring("elements=973"));
    CHECK_THAT(r.out, ContainsSubstring("D_mm=56"));
    CHECK_THAT(r.out, ContainsSubstring("F_mm=30.8"));
    CHECK_THAT(r.out, ContainsSubstring("total_thickness_mm=12.123"));
    const auto body = slurp(csv);
    CHECK_THAT(body,
               ContainsSubstring("i,j,x_mm,y_mm,R_mm,phase_rad,L_mm,t1_mm,l1_mm,t2_mm,l2_mm,t3_mm,l3_mm"));
    CHECK(line_count(body) == 974);
}

TEST_CASE("cli export") {
    const auto dir = temp_dir();
    const auto cfg = write_text(dir, "small.conf", "[lens]\nelements_across = 3\n");
    const auto out_dir = dir / "out";

    SECTION("writes the solid and both report forms") {
        const auto r = cli({"export", "--config", cfg.string(), "--out-dir", out_dir.string()});
        CHECK(r.rc == 0);
        CHECK_THAT(r.out, ContainsSubstring("768 triangles"));
        CHECK_THAT(r.out, ContainsSubstring("violations=0"));
        REQUIRE(fs::exists(out_dir / "lens.stl"));
        CHECK(fs::file_size(out_dir / "lens.stl") == 84u + 50u * 768u);
        CHECK_THAT(slurp(out_dir / "print_report.txt"), ContainsSubstring("print check:"));
        CHECK_THAT(slurp(out_dir / "print_report.csv"),
                   ContainsSubstring("kind,i,j,dimension,value_mm,limit_or_snapped_mm,eps_shift"));
        CHECK(number_after(r.out, "off_grid=") > 0.0);  // wrapped bodies never sit on the grid
    }
    SECTION("snap keeps the geometry but grids the dimensions") {
        const auto snap_dir = dir / "snapped";
        const auto r = cli({"export", "--config", cfg.string(), "--out-dir", snap_dir.string(),
                            "--snap"});
        CHECK(r.rc == 0);
        CHECK_THAT(r.out, ContainsSubstring(" snapped"));
        CHECK(fs::file_size(snap_dir / "lens.stl") == 84u + 50u * 768u);
    }
    SECTION("an unwritable output directory is an io failure") {
        const auto blocker = write_text(dir, "blocker", "not a directory\n");
        const auto r = cli({"export", "--config", cfg.string(), "--out-dir",
                            (blocker / "sub").string()});
        CHECK(r.rc == 1);
    }
}

TEST_CASE("cli report") {
    const auto r = cli({"report"});
    CHECK(r.rc == 0);
    CHECK_THAT(r.out, ContainsSubstring("== transformer =="));
    CHECK_THAT(r.out, ContainsSubstring("== stack response =="));
    CHECK_THAT(r.out, ContainsSubstring("== lens =="));
    CHECK_THAT(r.out, ContainsSubstring("== print check =="));
    CHECK_THAT(r.out, ContainsSubstring("3 section(s) at 80 GHz"));
    CHECK_THAT(r.out, ContainsSubstring("fbw_-20dB="));
    CHECK_THAT(r.out, ContainsSubstring("elements=973"));
}
