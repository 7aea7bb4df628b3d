#pragma once

namespace qexcess {

inline constexpr double kPi = 3.14159265358979323846;

// CODATA 2018, CGS.
inline constexpr double kHbar = 1.054571817e-27;     // erg s
inline constexpr double kBoltzmann = 1.380649e-16;   // erg / K

struct PhysicalConstants {
    double hbar = kHbar;
    double kB = kBoltzmann;
    // Multiplier on hbar. 1 is physical; values toward 0 probe the classical limit.
    double hbar_scale = 1.0;

    double effective_hbar() const { return hbar * hbar_scale; }

    // Throws ConfigError unless hbar > 0, kB > 0 and 0 <= hbar_scale <= 1.
    void validate() const;

    bool operator==(const PhysicalConstants&) const = default;
};

} // namespace qexcess
