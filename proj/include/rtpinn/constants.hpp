#pragma once

// CODATA 2018 exact SI values.
namespace rtpinn::constants {

inline constexpr double planck = 6.62607015e-34;         // J s
inline constexpr double boltzmann = 1.380649e-23;        // J / K
inline constexpr double speed_of_light = 299792458.0;    // m / s
inline constexpr double elementary_charge = 1.602176634e-19;  // C (J per eV)

inline constexpr double ev_to_kelvin(double ev) { return ev * elementary_charge / boltzmann; }

}  // namespace rtpinn::constants
