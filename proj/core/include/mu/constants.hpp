#pragma once

// CODATA 2018 values, SI units.
namespace mu::constants {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double electron_mass = 9.1093837015e-31;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;
inline constexpr double electron_volt = 1.602176634e-19;
inline constexpr double boltzmann = 1.380649e-23;

inline constexpr double cesium133_mass = 132.905451961 * atomic_mass_unit;
inline constexpr double rubidium87_mass = 86.909180527 * atomic_mass_unit;
inline constexpr double silicon_mass = 28.0855 * atomic_mass_unit;

// Lower bound on hbar/sigma_q and upper bound on sigma_s for admissible modifications.
inline constexpr double min_length_scale = 1e-14;
inline constexpr double max_sigma_s = 2e-11;

}  // namespace mu::constants
