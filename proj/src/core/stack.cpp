#include "stack.hpp"

#include "errors.hpp"
#include "kvfile.hpp"

namespace gtherm {

void ChipStack::validate() const {
    if (n < 2) throw ConfigError("stack", "grid side must be >= 2");
    if (n % 2 != 0) throw ConfigError("stack", "grid side must be even (center impulse)");
    if (!(die_edge > 0.0)) throw ConfigError("stack", "die_edge must be positive");
    if (!(ambient > 0.0)) throw ConfigError("stack", "ambient must be positive");
    if (!(sink_resistance > 0.0)) throw ConfigError("stack", "sink_resistance must be positive");
    for (const auto& l : layers) {
        if (!(l.thickness > 0.0))
            throw ConfigError("stack", "layer '" + l.name + "': thickness must be positive");
        if (!(l.conductivity > 0.0))
            throw ConfigError("stack", "layer '" + l.name + "': conductivity must be positive");
        if (!(l.heat_capacity > 0.0))
            throw ConfigError("stack", "layer '" + l.name + "': heat capacity must be positive");
    }
}

namespace {
const std::vector<std::string> kStackKeys = {
    "n",
    "die_edge",
    "die_thickness",
    "die_conductivity",
    "die_heat_capacity",
    "tim_thickness",
    "tim_conductivity",
    "tim_heat_capacity",
    "spreader_thickness",
    "spreader_conductivity",
    "spreader_heat_capacity",
    "ambient",
    "sink_resistance",
};
}

ChipStack load_stack(const std::string& path) {
    KvFile kv = KvFile::parse_file(path);
    kv.check_known(kStackKeys);
    ChipStack s;
    s.n = static_cast<int>(kv.get_int("n", s.n));
    s.die_edge = kv.get_double("die_edge", s.die_edge);
    s.layers[0].thickness = kv.get_double("die_thickness", s.layers[0].thickness);
    s.layers[0].conductivity = kv.get_double("die_conductivity", s.layers[0].conductivity);
    s.layers[0].heat_capacity = kv.get_double("die_heat_capacity", s.layers[0].heat_capacity);
    s.layers[1].thickness = kv.get_double("tim_thickness", s.layers[1].thickness);
    s.layers[1].conductivity = kv.get_double("tim_conductivity", s.layers[1].conductivity);
    s.layers[1].heat_capacity = kv.get_double("tim_heat_capacity", s.layers[1].heat_capacity);
    s.layers[2].thickness = kv.get_double("spreader_thickness", s.layers[2].thickness);
    s.layers[2].conductivity = kv.get_double("spreader_conductivity", s.layers[2].conductivity);
    s.layers[2].heat_capacity = kv.get_double("spreader_heat_capacity", s.layers[2].heat_capacity);
    s.ambient = kv.get_double("ambient", s.ambient);
    s.sink_resistance = kv.get_double("sink_resistance", s.sink_resistance);
    s.validate();
    return s;
}

void save_stack(const ChipStack& s, const std::string& path) {
    KvFile kv;
    kv.set_int("n", s.n);
    kv.set_double("die_edge", s.die_edge);
    kv.set_double("die_thickness", s.layers[0].thickness);
    kv.set_double("die_conductivity", s.layers[0].conductivity);
    kv.set_double("die_heat_capacity", s.layers[0].heat_capacity);
    kv.set_double("tim_thickness", s.layers[1].thickness);
    kv.set_double("tim_conductivity", s.layers[1].conductivity);
    kv.set_double("tim_heat_capacity", s.layers[1].heat_capacity);
    kv.set_double("spreader_thickness", s.layers[2].thickness);
    kv.set_double("spreader_conductivity", s.layers[2].conductivity);
    kv.set_double("spreader_heat_capacity", s.layers[2].heat_capacity);
    kv.set_double("ambient", s.ambient);
    kv.set_double("sink_resistance", s.sink_resistance);
    kv.save(path);
}

} // namespace gtherm
