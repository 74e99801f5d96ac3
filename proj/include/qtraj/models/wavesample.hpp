#pragma once

#include "qtraj/cx.hpp"

namespace qtraj::models {

// Wavefunction value and spatial derivative at one complex position.
struct WaveSample {
    Cx x{};
    Cx psi{};
    Cx dpsi{};
};

}  // namespace qtraj::models
