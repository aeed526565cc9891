#ifndef DIELENS_CONSTANTS_HPP
#define DIELENS_CONSTANTS_HPP

#include <numbers>

// Unit conventions used throughout: lengths in mm, frequencies in Hz,
// permittivities relative, impedances in ohm, angles in radians.

namespace dielens {

inline constexpr double c0_mm_per_s = 2.99792458e11;
inline constexpr double eta0_ohm = 376.730313;

inline constexpr double wavelength_mm(double f_hz) { return c0_mm_per_s / f_hz; }

// free-space wavenumber, rad/mm
inline constexpr double wavenumber(double f_hz) {
    return 2.0 * std::numbers::pi * f_hz / c0_mm_per_s;
}

}  // namespace dielens

#endif
