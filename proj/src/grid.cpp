#include "absim/grid.hpp"

#include <cmath>

#include "absim/fft.hpp"

namespace absim {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool fft_friendly(std::uint32_t n) {
    if (n < 8 || n % 2 != 0) return false;
    for (std::uint32_t p : {2u, 3u, 5u, 7u})
        while (n % p == 0) n /= p;
    return n == 1;
}
}  // namespace

double GridSpec::momentum(int axis, std::uint32_t i) const {
    std::int64_t f = i;
    if (f >= std::int64_t(n[axis]) / 2) f -= n[axis];
    return 2.0 * kPi * f / extents[axis];
}

void GridSpec::validate() const {
    for (int k = 0; k < 3; ++k) {
        if (!fft_friendly(n[k]))
            throw std::invalid_argument("grid: axis sizes must be even products of 2,3,5,7 (>= 8)");
        if (!(extents[k] > 0) || !std::isfinite(extents[k]) || !std::isfinite(origin[k]))
            throw std::invalid_argument("grid: bad extents or origin");
    }
}

GridSpec GridSpec::centered(std::array<std::uint32_t, 3> n, std::array<double, 3> extents) {
    GridSpec g;
    g.n = n;
    g.extents = extents;
    for (int k = 0; k < 3; ++k) g.origin[k] = -0.5 * extents[k] + 0.5 * extents[k] / n[k];
    g.validate();
    return g;
}

double WaveField::norm2() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return s * grid_.cell_volume();
}

double WaveField::norm() const { return std::sqrt(norm2()); }

WaveField& WaveField::scale(cplx s) {
    for (cplx& v : data_) v *= s;
    return *this;
}

WaveField& WaveField::normalize() {
    double n = norm();
    if (n > 0) scale(1.0 / n);
    return *this;
}

double norm(const WaveField& f) { return f.norm(); }

cplx inner(const WaveField& a, const WaveField& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("inner: fields live on different grids");
    cplx s{0, 0};
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) s += std::conj(da[i]) * db[i];
    return s * a.grid().cell_volume();
}

Vec3 expectation_p(const WaveField& f) {
    const GridSpec& g = f.grid();
    std::vector<cplx> hat = f.data();
    fft_for(g).forward(hat);
    double w = g.cell_volume() / double(g.size());
    double n2 = 0.0;
    Vec3 p{0, 0, 0};
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < g.n[0]; ++i) {
        double k1 = g.momentum(0, i);
        for (std::uint32_t j = 0; j < g.n[1]; ++j) {
            double k2 = g.momentum(1, j);
            for (std::uint32_t k = 0; k < g.n[2]; ++k, ++idx) {
                double a2 = std::norm(hat[idx]);
                n2 += a2;
                p += Vec3{k1, k2, g.momentum(2, k)} * a2;
            }
        }
    }
    (void)w;
    if (n2 == 0) return {0, 0, 0};
    return p / n2;
}

Vec3 expectation_x(const WaveField& f) {
    const GridSpec& g = f.grid();
    double n2 = 0.0;
    Vec3 xm{0, 0, 0};
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < g.n[0]; ++i)
        for (std::uint32_t j = 0; j < g.n[1]; ++j)
            for (std::uint32_t k = 0; k < g.n[2]; ++k, ++idx) {
                double a2 = std::norm(f[idx]);
                n2 += a2;
                xm += g.point(i, j, k) * a2;
            }
    if (n2 == 0) return {0, 0, 0};
    return xm / n2;
}

WaveField operator+(const WaveField& a, const WaveField& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("operator+: fields live on different grids");
    WaveField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

WaveField operator-(const WaveField& a, const WaveField& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("operator-: fields live on different grids");
    WaveField r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

}  // namespace absim
