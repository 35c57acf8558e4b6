#pragma once

// Unit system: energies and frequencies in eV, lengths in nm, temperatures in K.
// A frequency omega is identified with the photon energy hbar*omega.

namespace casimir {

inline constexpr double hbar_c = 197.3269804;       // eV nm
inline constexpr double k_boltzmann = 8.617333262e-5; // eV / K
inline constexpr double pi = 3.14159265358979323846;

// 1 eV/nm^3 in Pa (= J/m^3): e * 1e27.
inline constexpr double ev_per_nm3_to_pa = 1.602176634e8;

// Matsubara frequency xi_l = 2 pi k_B T l, in eV.
inline constexpr double matsubara_frequency(double temperature_k, int l) {
    return 2.0 * pi * k_boltzmann * temperature_k * static_cast<double>(l);
}

} // namespace casimir
