#pragma once

#include <complex>
#include <memory>

#include "absim/grid.hpp"

namespace absim {

// Thin wrapper over FFTW with cached plans for one grid shape.  Transforms are
// unnormalized (forward then backward multiplies by the point count); callers
// use `backward_normalized` to get the inverse.  Plans use FFTW_ESTIMATE so the
// chosen algorithm, and therefore the bit pattern of results, is reproducible.
class Fft3D {
public:
    explicit Fft3D(const GridSpec& grid);
    ~Fft3D();
    Fft3D(const Fft3D&) = delete;
    Fft3D& operator=(const Fft3D&) = delete;

    void forward(std::vector<cplx>& inout) const;
    void backward(std::vector<cplx>& inout) const;             // unnormalized
    void backward_normalized(std::vector<cplx>& inout) const;  // divides by N

    const GridSpec& grid() const { return grid_; }

private:
    struct Impl;
    GridSpec grid_;
    std::unique_ptr<Impl> impl_;
};

// Process-wide plan cache keyed by grid shape.
const Fft3D& fft_for(const GridSpec& grid);

}  // namespace absim
