#include "absim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace absim {

struct Fft3D::Impl {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    mutable std::mutex mu;  // the scratch buffer is shared between callers
    mutable std::vector<cplx> buf;
};

Fft3D::Fft3D(const GridSpec& grid) : grid_(grid), impl_(new Impl) {
    impl_->buf.resize(grid.size());
    auto* p = reinterpret_cast<fftw_complex*>(impl_->buf.data());
    // in-place plans on an internal buffer; FFTW_ESTIMATE keeps planning
    // deterministic across runs
    impl_->fwd = fftw_plan_dft_3d(int(grid.n[0]), int(grid.n[1]), int(grid.n[2]), p, p,
                                  FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_3d(int(grid.n[0]), int(grid.n[1]), int(grid.n[2]), p, p,
                                  FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft3D::~Fft3D() {
    if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
    if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
}

void Fft3D::forward(std::vector<cplx>& inout) const {
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->buf = inout;
    fftw_execute_dft(impl_->fwd, reinterpret_cast<fftw_complex*>(impl_->buf.data()),
                     reinterpret_cast<fftw_complex*>(impl_->buf.data()));
    inout = impl_->buf;
}

void Fft3D::backward(std::vector<cplx>& inout) const {
    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->buf = inout;
    fftw_execute_dft(impl_->bwd, reinterpret_cast<fftw_complex*>(impl_->buf.data()),
                     reinterpret_cast<fftw_complex*>(impl_->buf.data()));
    inout = impl_->buf;
}

void Fft3D::backward_normalized(std::vector<cplx>& inout) const {
    backward(inout);
    double s = 1.0 / double(grid_.size());
    for (cplx& v : inout) v *= s;
}

const Fft3D& fft_for(const GridSpec& grid) {
    static std::mutex mu;
    static std::map<std::array<std::uint32_t, 3>, std::unique_ptr<Fft3D>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(grid.n);
    if (it == cache.end()) it = cache.emplace(grid.n, std::make_unique<Fft3D>(grid)).first;
    return *it->second;
}

}  // namespace absim
