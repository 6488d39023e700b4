#include "field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace gtherm {

const char* unit_name(Unit u) {
    switch (u) {
        case Unit::Watts: return "watts";
        case Unit::Kelvin: return "kelvin";
        case Unit::KelvinPerWatt: return "kelvin_per_watt";
        case Unit::Dimensionless: return "dimensionless";
    }
    return "dimensionless";
}

Unit unit_from_name(const std::string& name) {
    if (name == "watts") return Unit::Watts;
    if (name == "kelvin") return Unit::Kelvin;
    if (name == "kelvin_per_watt") return Unit::KelvinPerWatt;
    if (name == "dimensionless") return Unit::Dimensionless;
    throw ConfigError("field-io", "unknown field unit '" + name + "'");
}

FieldMap::FieldMap(int n, double pitch, Unit unit, double fill)
    : n_(n), pitch_(pitch), unit_(unit), v_(static_cast<size_t>(n) * n, fill) {
    if (n < 2) throw ConfigError("field", "grid side must be >= 2, got " + std::to_string(n));
    if (!(pitch > 0.0)) throw ConfigError("field", "pitch must be positive");
}

double FieldMap::max() const {
    return *std::max_element(v_.begin(), v_.end());
}

double FieldMap::min() const {
    return *std::min_element(v_.begin(), v_.end());
}

double FieldMap::sum() const {
    // Neumaier compensated sum; mean(p_var) must hold to ~1e-12 * mu.
    double s = 0.0, comp = 0.0;
    for (double x : v_) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            comp += (s - t) + x;
        else
            comp += (x - t) + s;
        s = t;
    }
    return s + comp;
}

std::pair<int, int> FieldMap::argmax() const {
    size_t best = 0;
    for (size_t k = 1; k < v_.size(); ++k)
        if (v_[k] > v_[best]) best = k;
    return {static_cast<int>(best) / n_, static_cast<int>(best) % n_};
}

void FieldMap::validate(const char* what) const {
    for (double x : v_)
        if (!std::isfinite(x))
            throw ValidationError("field", std::string(what) + ": non-finite entry");
}

FieldMap& FieldMap::operator+=(const FieldMap& o) {
    if (!same_shape(o)) throw ConfigError("field", "shape mismatch in field addition");
    for (size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
}

FieldMap& FieldMap::operator-=(const FieldMap& o) {
    if (!same_shape(o)) throw ConfigError("field", "shape mismatch in field subtraction");
    for (size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
}

FieldMap& FieldMap::operator*=(double s) {
    for (double& x : v_) x *= s;
    return *this;
}

void write_field(const FieldMap& f, std::ostream& os) {
    os.precision(17);
    os << f.n() << ' ' << f.pitch() << ' ' << unit_name(f.unit()) << '\n';
    for (int i = 0; i < f.n(); ++i) {
        for (int j = 0; j < f.n(); ++j) {
            if (j) os << ' ';
            os << f(i, j);
        }
        os << '\n';
    }
}

void save_field(const FieldMap& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("field-io", "cannot open '" + path + "' for writing");
    write_field(f, os);
    if (!os) throw ConfigError("field-io", "write failed for '" + path + "'");
}

FieldMap read_field(std::istream& is, const std::string& origin) {
    int n = 0;
    double pitch = 0.0;
    std::string unit_tok;
    if (!(is >> n >> pitch >> unit_tok))
        throw ConfigError("field-io", origin + ": malformed header (want 'n pitch unit')");
    if (n < 2) throw ConfigError("field-io", origin + ": grid side must be >= 2");
    FieldMap f(n, pitch, unit_from_name(unit_tok));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!(is >> f(i, j)))
                throw ConfigError("field-io", origin + ": truncated value grid at row " +
                                                  std::to_string(i));
    f.validate(origin.c_str());
    return f;
}

FieldMap load_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("field-io", "cannot open '" + path + "'");
    return read_field(is, path);
}

} // namespace gtherm
