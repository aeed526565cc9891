#ifndef DIELENS_SOLID_HPP
#define DIELENS_SOLID_HPP

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "dielens/errors.hpp"
#include "dielens/lens.hpp"

// Solid geometry for printing: every feature of the lens is an axis-aligned
// box, so the model is a plain triangle soup of 12-triangle prisms with no
// CSG involved. Units are mm throughout; STL output is binary little-endian.

namespace dielens {

struct Vec3f {
    float x = 0.0f, y = 0.0f, z = 0.0f;
};

struct Triangle {
    Vec3f normal;
    std::array<Vec3f, 3> vertex;
};

struct SolidModel {
    std::vector<Triangle> triangles;
    double bbox_min[3] = {0.0, 0.0, 0.0};
    double bbox_max[3] = {0.0, 0.0, 0.0};
    std::vector<std::string> warnings;
};

namespace detail {

// 12 triangles of the box [x0,x1]x[y0,y1]x[z0,z1], outward normals,
// counter-clockwise seen from outside.
inline void emit_box(std::vector<Triangle>& out, double x0, double x1, double y0, double y1,
                     double z0, double z1) {
    const auto v = [](double x, double y, double z) {
        return Vec3f{static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)};
    };
    out.push_back({v(0, 0, -1), {v(x0, y0, z0), v(x1, y1, z0), v(x1, y0, z0)}});
    out.push_back({v(0, 0, -1), {v(x0, y0, z0), v(x0, y1, z0), v(x1, y1, z0)}});
    out.push_back({v(0, 0, 1), {v(x0, y0, z1), v(x1, y0, z1), v(x1, y1, z1)}});
    out.push_back({v(0, 0, 1), {v(x0, y0, z1), v(x1, y1, z1), v(x0, y1, z1)}});
    out.push_back({v(-1, 0, 0), {v(x0, y0, z0), v(x0, y1, z1), v(x0, y1, z0)}});
    out.push_back({v(-1, 0, 0), {v(x0, y0, z0), v(x0, y0, z1), v(x0, y1, z1)}});
    out.push_back({v(1, 0, 0), {v(x1, y0, z0), v(x1, y1, z0), v(x1, y1, z1)}});
    out.push_back({v(1, 0, 0), {v(x1, y0, z0), v(x1, y1, z1), v(x1, y0, z1)}});
    out.push_back({v(0, -1, 0), {v(x0, y0, z0), v(x1, y0, z0), v(x1, y0, z1)}});
    out.push_back({v(0, -1, 0), {v(x0, y0, z0), v(x1, y0, z1), v(x0, y0, z1)}});
    out.push_back({v(0, 1, 0), {v(x0, y1, z0), v(x1, y1, z1), v(x1, y1, z0)}});
    out.push_back({v(0, 1, 0), {v(x0, y1, z0), v(x0, y1, z1), v(x1, y1, z1)}});
}

}  // namespace detail

// Render the plan as stepped square pins on an optional square backing
// plate. Columns stand bottom-flush on the plate; each face's layers run
// air side outward, mirrored about the body. Zero-size layers cannot be
// printed and are dropped with a warning.
inline SolidModel to_solid(const LensPlan& plan, double base_thickness_mm) {
    if (!(base_thickness_mm >= 0.0) || !std::isfinite(base_thickness_mm))
        throw argument_error("base thickness must be >= 0");
    SolidModel model;
    std::map<std::string, std::size_t> dropped;  // message -> element count

    std::vector<std::vector<Triangle>> per_elem(plan.elements.size());
    detail::run_rows(plan.elements.size(), [&](std::size_t n) {
        const auto& e = plan.elements[n];
        auto& tris = per_elem[n];
        double z = base_thickness_mm;
        const auto pin = [&](double side, double len) {
            const double h = 0.5 * side;
            detail::emit_box(tris, e.x_mm - h, e.x_mm + h, e.y_mm - h, e.y_mm + h, z, z + len);
            z += len;
        };
        for (auto it = e.face_layers.begin(); it != e.face_layers.end(); ++it)
            if (it->pin_side_mm > 0.0 && it->length_mm > 0.0) pin(it->pin_side_mm, it->length_mm);
        if (e.body_len_mm > 0.0) pin(plan.spec.period_mm, e.body_len_mm);
        for (auto it = e.face_layers.rbegin(); it != e.face_layers.rend(); ++it)
            if (it->pin_side_mm > 0.0 && it->length_mm > 0.0) pin(it->pin_side_mm, it->length_mm);
    });
    // warnings collected serially so their order is stable
    for (const auto& e : plan.elements) {
        for (std::size_t k = 0; k < e.face_layers.size(); ++k) {
            const auto& l = e.face_layers[k];
            if (l.pin_side_mm > 0.0 && l.length_mm > 0.0) continue;
            ++dropped["layer " + std::to_string(k + 1) + " has zero size; dropped"];
        }
        if (!(e.body_len_mm > 0.0)) ++dropped["body has zero length; dropped"];
    }

    std::size_t total = 0;
    for (const auto& t : per_elem) total += t.size();
    model.triangles.reserve(total + 12);
    if (base_thickness_mm > 0.0) {
        const double half = 0.5 * plan.aperture_diam_mm;
        detail::emit_box(model.triangles, -half, half, -half, half, 0.0, base_thickness_mm);
    }
    for (auto& t : per_elem)
        model.triangles.insert(model.triangles.end(), t.begin(), t.end());

    for (const auto& [msg, count] : dropped)
        model.warnings.push_back(msg + " on " + std::to_string(count) + " element(s)");

    if (!model.triangles.empty()) {
        for (int a = 0; a < 3; ++a) {
            model.bbox_min[a] = 1e300;
            model.bbox_max[a] = -1e300;
        }
        for (const auto& t : model.triangles)
            for (const auto& v : t.vertex) {
                const double p[3] = {v.x, v.y, v.z};
                for (int a = 0; a < 3; ++a) {
                    if (p[a] < model.bbox_min[a]) model.bbox_min[a] = p[a];
                    if (p[a] > model.bbox_max[a]) model.bbox_max[a] = p[a];
                }
            }
    }
    return model;
}

// Binary STL: 80-byte header, uint32 triangle count, then 50 bytes per
// triangle (12 float32 + uint16 attribute). Returns the exact byte count,
// 84 + 50 * triangles.
inline std::uint64_t write_stl(const SolidModel& model, std::ostream& out) {
    static_assert(std::endian::native == std::endian::little,
                  "STL writer assumes a little-endian host");
    char header[80] = {};
    std::strncpy(header, "binary stl stepped-pin lens (mm)", sizeof(header) - 1);
    out.write(header, sizeof(header));
    const auto count = static_cast<std::uint32_t>(model.triangles.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (const auto& t : model.triangles) {
        char rec[50];
        const float f[12] = {t.normal.x,    t.normal.y,    t.normal.z,    t.vertex[0].x,
                             t.vertex[0].y, t.vertex[0].z, t.vertex[1].x, t.vertex[1].y,
                             t.vertex[1].z, t.vertex[2].x, t.vertex[2].y, t.vertex[2].z};
        std::memcpy(rec, f, 48);
        rec[48] = 0;
        rec[49] = 0;
        out.write(rec, sizeof(rec));
    }
    out.flush();
    if (!out) throw io_error("STL write failed");
    return 84u + 50u * static_cast<std::uint64_t>(model.triangles.size());
}

inline std::uint64_t write_stl(const SolidModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open " + path + " for writing");
    try {
        return write_stl(model, out);
    } catch (const io_error&) {
        throw io_error("STL write to " + path + " failed");
    }
}

struct PrintViolation {
    int i = -1, j = -1;  // -1,-1 marks a plan-wide layer dimension
    std::string dimension;
    double value = 0.0;
    double limit = 0.0;
};

struct SnapAdjustment {
    int i = -1, j = -1;
    std::string dimension;
    double original = 0.0;
    double snapped = 0.0;
    double eps_shift = 0.0;  // induced unit-cell eps change, pin sides only
};

struct PrintReport {
    double resolution_mm = 0.025;
    double min_feature_mm = 0.0;
    std::vector<PrintViolation> violations;
    std::vector<SnapAdjustment> snaps;
    std::size_t snapped_dims = 0;
};

namespace detail {

inline double snap_value(double v, double res) { return std::round(v / res) * res; }

inline bool off_grid(double v, double res) {
    return std::abs(v - snap_value(v, res)) > 1e-9;
}

}  // namespace detail

// Manufacturability review. Feature checks: pin sides below min_feature,
// inter-pin gaps (period - t) below min_feature wherever grid neighbours
// both carry that layer, and bodies shorter than min_body_len_mm. Every
// off-grid dimension is listed with its snapped value; pin-side snaps also
// report the permittivity shift they induce when a mapping is supplied.
// Report only; snap_to_grid applies the changes.
inline PrintReport check_printable(const LensPlan& plan, double resolution_mm,
                                   double min_feature_mm,
                                   const UnitCellGeometry* geom = nullptr,
                                   const MappingModel* model = nullptr) {
    if (!(resolution_mm > 0.0) || !std::isfinite(resolution_mm))
        throw argument_error("printer resolution must be positive");
    if (!(min_feature_mm >= 0.0) || !std::isfinite(min_feature_mm))
        throw argument_error("minimum feature size must be >= 0");
    PrintReport rep;
    rep.resolution_mm = resolution_mm;
    rep.min_feature_mm = min_feature_mm;

    // layer stacks are identical across elements, so judge them once
    const std::vector<FaceLayer>* layers = nullptr;
    bool has_neighbours = plan.elements.size() > 1;
    if (!plan.elements.empty()) layers = &plan.elements.front().face_layers;
    if (layers) {
        for (std::size_t k = 0; k < layers->size(); ++k) {
            const auto& l = (*layers)[k];
            if (!(l.length_mm > 0.0)) continue;
            const std::string tname = "t" + std::to_string(k + 1);
            const std::string lname = "l" + std::to_string(k + 1);
            if (l.pin_side_mm < min_feature_mm)
                rep.violations.push_back({-1, -1, tname, l.pin_side_mm, min_feature_mm});
            const double gap = plan.spec.period_mm - l.pin_side_mm;
            if (has_neighbours && gap > 1e-12 && gap < min_feature_mm)
                rep.violations.push_back({-1, -1, "gap" + std::to_string(k + 1), gap,
                                          min_feature_mm});
            if (detail::off_grid(l.pin_side_mm, resolution_mm)) {
                SnapAdjustment s{-1, -1, tname, l.pin_side_mm,
                                 detail::snap_value(l.pin_side_mm, resolution_mm), 0.0};
                if (geom && model)
                    s.eps_shift = eps_of_thickness(s.snapped, *geom, *model) -
                                  eps_of_thickness(s.original, *geom, *model);
                rep.snaps.push_back(s);
            }
            if (detail::off_grid(l.length_mm, resolution_mm))
                rep.snaps.push_back({-1, -1, lname, l.length_mm,
                                     detail::snap_value(l.length_mm, resolution_mm), 0.0});
        }
    }
    for (const auto& e : plan.elements) {
        if (e.body_len_mm < plan.spec.min_body_len_mm - 1e-12)
            rep.violations.push_back({e.i, e.j, "L", e.body_len_mm, plan.spec.min_body_len_mm});
        if (detail::off_grid(e.body_len_mm, resolution_mm))
            rep.snaps.push_back({e.i, e.j, "L", e.body_len_mm,
                                 detail::snap_value(e.body_len_mm, resolution_mm), 0.0});
    }
    rep.snapped_dims = rep.snaps.size();
    return rep;
}

// Round every manufactured dimension to the nearest grid multiple. Moves
// are bounded by resolution/2.
inline LensPlan snap_to_grid(const LensPlan& plan, double resolution_mm) {
    if (!(resolution_mm > 0.0) || !std::isfinite(resolution_mm))
        throw argument_error("printer resolution must be positive");
    LensPlan out = plan;
    double thickest = 0.0;
    for (auto& e : out.elements) {
        double per_face = 0.0;
        for (auto& l : e.face_layers) {
            l.pin_side_mm = detail::snap_value(l.pin_side_mm, resolution_mm);
            l.length_mm = detail::snap_value(l.length_mm, resolution_mm);
            per_face += l.length_mm;
        }
        e.body_len_mm = detail::snap_value(e.body_len_mm, resolution_mm);
        thickest = std::max(thickest, 2.0 * per_face + e.body_len_mm);
    }
    out.total_thickness_mm = thickest;
    return out;
}

}  // namespace dielens

#endif
