#ifndef DIELENS_EFFMED_HPP
#define DIELENS_EFFMED_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dielens/errors.hpp"

// Effective permittivity of a square unit cell holding a square dielectric
// pin of side t, period p. Analytic mixing rules cover design work; a
// measured (t, eps) table interpolated monotonically covers calibration
// against full-wave or printed samples. All rules are monotone in t, so the
// inverse map is a plain bisection.

namespace dielens {

struct UnitCellGeometry {
    double period_mm = 1.6;
    double bulk_eps = 2.738;
};

inline void validate(const UnitCellGeometry& g) {
    if (!(g.period_mm > 0.0) || !std::isfinite(g.period_mm))
        throw argument_error("unit cell period must be positive");
    if (!(g.bulk_eps >= 1.0) || !std::isfinite(g.bulk_eps))
        throw argument_error("bulk permittivity must be >= 1");
}

enum class MixingRule { volume_fraction, maxwell_garnett, lookup_table };

struct MappingModel {
    MixingRule rule = MixingRule::volume_fraction;
    // populated for lookup_table only
    std::vector<double> t_mm;
    std::vector<double> eps;
    std::vector<double> slope;  // Fritsch-Carlson tangents, one per knot
};

inline MappingModel make_mapping(MixingRule rule) {
    if (rule == MixingRule::lookup_table)
        throw argument_error("lookup-table mapping needs a calibration table");
    return {rule, {}, {}, {}};
}

// Monotone cubic interpolant through strictly increasing (t, eps) samples.
// Fritsch-Carlson limiting keeps the curve monotone between knots, which the
// inverse map relies on.
inline MappingModel load_calibration(const std::vector<std::pair<double, double>>& table) {
    if (table.size() < 4)
        throw validation_error("calibration table needs at least 4 rows");
    MappingModel m{MixingRule::lookup_table, {}, {}, {}};
    m.t_mm.reserve(table.size());
    m.eps.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& [t, e] = table[i];
        if (!std::isfinite(t) || !std::isfinite(e) || t < 0.0 || e < 1.0)
            throw validation_error("calibration row " + std::to_string(i + 1) +
                                   ": need t >= 0 and eps >= 1");
        if (i > 0 && !(t > m.t_mm.back()))
            throw validation_error("calibration row " + std::to_string(i + 1) +
                                   ": thickness must be strictly increasing");
        if (i > 0 && !(e > m.eps.back()))
            throw validation_error("calibration row " + std::to_string(i + 1) +
                                   ": permittivity must be strictly increasing");
        m.t_mm.push_back(t);
        m.eps.push_back(e);
    }
    const std::size_t n = m.t_mm.size();
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d[i] = (m.eps[i + 1] - m.eps[i]) / (m.t_mm[i + 1] - m.t_mm[i]);
    m.slope.assign(n, 0.0);
    m.slope[0] = d[0];
    m.slope[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) m.slope[i] = 0.5 * (d[i - 1] + d[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double a = m.slope[i] / d[i];
        const double b = m.slope[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m.slope[i] = tau * a * d[i];
            m.slope[i + 1] = tau * b * d[i];
        }
    }
    return m;
}

// Lines are `t_mm,eps_eff`; `#` starts a comment, blank lines are skipped.
// A header row matching the column names is tolerated.
inline MappingModel read_calibration_csv(std::istream& in) {
    std::vector<std::pair<double, double>> table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("t_mm", 0) == 0) continue;
        std::istringstream row(line);
        double t = 0.0, e = 0.0;
        char comma = 0;
        if (!(row >> t >> comma >> e) || comma != ',')
            throw validation_error("calibration line " + std::to_string(lineno) +
                                   ": expected `t_mm,eps_eff`");
        table.emplace_back(t, e);
    }
    return load_calibration(table);
}

namespace detail {

inline double hermite_eval(const MappingModel& m, double t, bool* clamped) {
    if (t <= m.t_mm.front()) {
        if (clamped && t < m.t_mm.front()) *clamped = true;
        return m.eps.front();
    }
    if (t >= m.t_mm.back()) {
        if (clamped && t > m.t_mm.back()) *clamped = true;
        return m.eps.back();
    }
    const auto it = std::upper_bound(m.t_mm.begin(), m.t_mm.end(), t);
    const auto i = static_cast<std::size_t>(it - m.t_mm.begin()) - 1;
    const double h = m.t_mm[i + 1] - m.t_mm[i];
    const double s = (t - m.t_mm[i]) / h;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * m.eps[i] + h * h10 * m.slope[i] + h01 * m.eps[i + 1] +
           h * h11 * m.slope[i + 1];
}

}  // namespace detail

// Effective permittivity of a pin of side t. `clamped`, when given, reports
// whether a lookup table was evaluated outside its sampled range.
inline double eps_of_thickness(double t_mm, const UnitCellGeometry& geom,
                               const MappingModel& model, bool* clamped = nullptr) {
    validate(geom);
    if (clamped) *clamped = false;
    if (!std::isfinite(t_mm) || t_mm < 0.0 || t_mm > geom.period_mm)
        throw argument_error("pin side must lie in [0, period]");
    switch (model.rule) {
        case MixingRule::volume_fraction: {
            const double q = (t_mm / geom.period_mm) * (t_mm / geom.period_mm);
            return 1.0 + q * (geom.bulk_eps - 1.0);
        }
        case MixingRule::maxwell_garnett: {
            const double q = (t_mm / geom.period_mm) * (t_mm / geom.period_mm);
            const double beta = (geom.bulk_eps - 1.0) / (geom.bulk_eps + 1.0);
            return (1.0 + q * beta) / (1.0 - q * beta);
        }
        case MixingRule::lookup_table:
            if (model.t_mm.empty())
                throw argument_error("lookup-table mapping has no calibration loaded");
            return detail::hermite_eval(model, t_mm, clamped);
    }
    throw argument_error("unknown mixing rule");
}

// Inverse of eps_of_thickness by bisection on [0, period], resolved to
// 1e-9 mm. The target must be reachable by the mapping.
inline double thickness_of_eps(double eps, const UnitCellGeometry& geom,
                               const MappingModel& model) {
    validate(geom);
    if (!std::isfinite(eps)) throw argument_error("target permittivity must be finite");
    double lo = 0.0, hi = geom.period_mm;
    const double e_lo = eps_of_thickness(lo, geom, model);
    const double e_hi = eps_of_thickness(hi, geom, model);
    if (eps < e_lo - 1e-12 || eps > e_hi + 1e-12)
        throw argument_error("target permittivity is outside the unit cell's reachable range");
    if (eps <= e_lo) return lo;
    if (eps >= e_hi) return hi;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (eps_of_thickness(mid, geom, model) < eps)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace dielens

#endif
