#pragma once

namespace cqed::consts {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
inline constexpr double c_light = 299792458.0;        // m/s
inline constexpr double hbar = 1.054571817e-34;       // J s

// Unit helpers used at the reporting boundary; everything internal is SI
// (rad/s for rates, metres for lengths).
inline constexpr double ghz_to_rads(double ghz) { return ghz * 1e9 * two_pi; }
inline constexpr double rads_to_ghz(double rads) { return rads / (1e9 * two_pi); }
inline constexpr double pm = 1e-12;
inline constexpr double nm = 1e-9;

}  // namespace cqed::consts
