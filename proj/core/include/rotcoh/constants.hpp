#pragma once

#include <numbers>

namespace rotcoh::units {

inline constexpr double kPi = std::numbers::pi;

// Speed of light, cm per ps. A wavenumber E [cm^-1] advances phase by 2*pi*c*E per ps.
inline constexpr double kLightCmPerPs = 0.0299792458;

// 1 cm^-1 expressed in GHz.
inline constexpr double kGHzPerWavenumber = 29.9792458;

// Atomic unit of electric field, V/cm.
inline constexpr double kFieldAuInVPerCm = 5.14220675e9;

inline constexpr double kHartreeInWavenumber = 219474.6314;

inline constexpr double ghz_to_wavenumber(double ghz) { return ghz / kGHzPerWavenumber; }
inline constexpr double wavenumber_to_ghz(double cm1) { return cm1 * kGHzPerWavenumber; }

// Angular frequency (rad/ps) of an energy given in cm^-1.
inline constexpr double angular_frequency(double cm1) { return 2.0 * kPi * kLightCmPerPs * cm1; }

}  // namespace rotcoh::units
