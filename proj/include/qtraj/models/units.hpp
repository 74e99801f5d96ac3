#pragma once

namespace qtraj::models {

// Scattering problems are solved in whatever unit system the caller
// prefers; everything downstream works through hbar and the mass only.
struct PhysicalUnits {
    double hbar = 1.0;
    double mass = 1.0;
};

}  // namespace qtraj::models
