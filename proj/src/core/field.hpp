#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace gtherm {

enum class Unit {
    Watts,          // power per cell
    Kelvin,         // temperature rise
    KelvinPerWatt,  // impulse response / Green's function samples
    Dimensionless,
};

const char* unit_name(Unit u);
Unit unit_from_name(const std::string& name);

// Square scalar grid over the die (or the mirrored 2n domain). Row-major,
// row 0 = chip edge nearest the origin. Values must stay finite; the
// validate() hook is called after every mutating operation in this module.
class FieldMap {
public:
    FieldMap() = default;
    FieldMap(int n, double pitch, Unit unit, double fill = 0.0);

    static FieldMap zeros(int n, double pitch, Unit unit) { return FieldMap(n, pitch, unit); }

    int n() const noexcept { return n_; }
    double pitch() const noexcept { return pitch_; }
    Unit unit() const noexcept { return unit_; }
    void set_unit(Unit u) noexcept { unit_ = u; }

    double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * n_ + j]; }
    double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * n_ + j]; }

    const std::vector<double>& values() const noexcept { return v_; }
    std::vector<double>& values() noexcept { return v_; }
    size_t size() const noexcept { return v_.size(); }

    double max() const;
    double min() const;
    double sum() const;   // compensated summation
    double mean() const { return sum() / static_cast<double>(v_.size()); }
    // Cell indices of the maximum value (first hit in row-major order).
    std::pair<int, int> argmax() const;

    bool same_shape(const FieldMap& o) const noexcept {
        return n_ == o.n_ && pitch_ == o.pitch_;
    }

    // Throws ValidationError if any entry is non-finite.
    void validate(const char* what) const;

    FieldMap& operator+=(const FieldMap& o);
    FieldMap& operator-=(const FieldMap& o);
    FieldMap& operator*=(double s);
    friend FieldMap operator+(FieldMap a, const FieldMap& b) { return a += b; }
    friend FieldMap operator-(FieldMap a, const FieldMap& b) { return a -= b; }
    friend FieldMap operator*(FieldMap a, double s) { return a *= s; }
    friend FieldMap operator*(double s, FieldMap a) { return a *= s; }

private:
    int n_ = 0;
    double pitch_ = 0.0;
    Unit unit_ = Unit::Dimensionless;
    std::vector<double> v_;
};

// Text format: first line "n pitch unit", then n whitespace-separated rows
// of n decimal values. Values are written with 17 significant digits.
void save_field(const FieldMap& f, const std::string& path);
FieldMap load_field(const std::string& path);
void write_field(const FieldMap& f, std::ostream& os);
FieldMap read_field(std::istream& is, const std::string& origin);

} // namespace gtherm
