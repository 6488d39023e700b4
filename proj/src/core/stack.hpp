#pragma once

#include <array>
#include <string>

namespace gtherm {

struct Layer {
    std::string name;
    double thickness = 0.0;      // meters
    double conductivity = 0.0;   // W/(m K)
    double heat_capacity = 0.0;  // volumetric, J/(m^3 K)
};

// Layered package description: die -> TIM -> spreader, spreader top coupled
// to ambient through a lumped sink resistance.
struct ChipStack {
    double die_edge = 0.01;  // meters (100 mm^2 die)
    std::array<Layer, 3> layers = {
        Layer{"die", 0.15e-3, 130.0, 1.75e6},
        Layer{"tim", 0.02e-3, 4.0, 4.0e6},
        Layer{"spreader", 3.5e-3, 400.0, 3.55e6},
    };
    double ambient = 318.15;       // kelvin
    double sink_resistance = 0.25; // K/W, spreader top to ambient
    int n = 64;                    // lateral grid points per side

    double pitch() const { return die_edge / n; }
    const Layer& die() const { return layers[0]; }
    const Layer& tim() const { return layers[1]; }
    const Layer& spreader() const { return layers[2]; }

    void validate() const;
};

ChipStack load_stack(const std::string& path);
void save_stack(const ChipStack& s, const std::string& path);

} // namespace gtherm
