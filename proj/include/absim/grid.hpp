#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "absim/errors.hpp"
#include "absim/vec3.hpp"

namespace absim {

using cplx = std::complex<double>;

// Uniform periodic grid.  Point (i1,i2,i3) sits at origin + (i1*dx1, i2*dx2,
// i3*dx3); storage is row-major with axis 3 fastest.
struct GridSpec {
    std::array<std::uint32_t, 3> n{8, 8, 8};
    std::array<double, 3> extents{1, 1, 1};
    std::array<double, 3> origin{0, 0, 0};

    double dx(int k) const { return extents[k] / n[k]; }
    std::size_t size() const { return std::size_t(n[0]) * n[1] * n[2]; }
    double cell_volume() const { return dx(0) * dx(1) * dx(2); }

    std::size_t index(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
        return (std::size_t(i) * n[1] + j) * n[2] + k;
    }
    Vec3 point(std::uint32_t i, std::uint32_t j, std::uint32_t k) const {
        return {origin[0] + i * dx(0), origin[1] + j * dx(1), origin[2] + k * dx(2)};
    }
    // signed momentum of FFT bin i along axis k (Nyquist bin mapped negative)
    double momentum(int axis, std::uint32_t i) const;
    double nyquist(int axis) const { return 3.14159265358979323846 / dx(axis); }

    bool operator==(const GridSpec& o) const {
        return n == o.n && extents == o.extents && origin == o.origin;
    }
    void validate() const;  // throws on non-FFT-friendly sizes or degenerate extents

    // grid centered on the box [-L/2, L/2) with a half-cell stagger, which keeps
    // grid points off the coordinate planes and the enclosing sphere
    static GridSpec centered(std::array<std::uint32_t, 3> n, std::array<double, 3> extents);
};

// Complex amplitudes on a grid with L2 quantities weighted by the cell volume.
class WaveField {
public:
    WaveField() = default;
    explicit WaveField(const GridSpec& g) : grid_(g), data_(g.size()) {}

    const GridSpec& grid() const { return grid_; }
    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }
    std::size_t size() const { return data_.size(); }

    double norm() const;
    double norm2() const;
    WaveField& scale(cplx s);
    WaveField& normalize();  // to unit L2 norm

private:
    GridSpec grid_;
    std::vector<cplx> data_;
};

double norm(const WaveField& f);
cplx inner(const WaveField& a, const WaveField& b);   // conjugate-linear in the first slot
Vec3 expectation_p(const WaveField& f);               // momentum expectation (unit mass)
Vec3 expectation_x(const WaveField& f);

WaveField operator+(const WaveField& a, const WaveField& b);
WaveField operator-(const WaveField& a, const WaveField& b);

}  // namespace absim
