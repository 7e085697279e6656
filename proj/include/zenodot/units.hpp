// units.hpp — unit conventions and physical constants
//
// All energies are in micro-electronvolts (ueV), all times in nanoseconds (ns),
// rates in 1/ns. Angular frequencies follow from omega = E / hbar.

#pragma once

namespace zenodot {

// hbar in ueV * ns
inline constexpr double hbar = 0.6582119569;

// Planck constant h = 2 pi hbar in ueV * ns (h * 1 GHz = 4.1357 ueV)
inline constexpr double planck_h = 4.135667696;

inline constexpr const char* code_version = "0.1.0";

}  // namespace zenodot
