#include "absim/quantum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "absim/fft.hpp"

namespace absim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI{0.0, 1.0};

double quintic_smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (t * (6 * t - 15) + 10);
}

// 4-point Gauss-Legendre on [0,1]
constexpr double kG4x[4] = {0.06943184420297371, 0.33000947820757187, 0.6699905217924281,
                            0.9305681557970263};
constexpr double kG4w[4] = {0.17392742256872693, 0.32607257743127307, 0.32607257743127307,
                            0.17392742256872693};

}  // namespace

void PacketSpec::validate(const GridSpec& grid) const {
    double v = speed();
    for (int k = 0; k < 3; ++k) {
        if (!(sigma[k] > 0)) throw std::invalid_argument("packet: widths must be positive");
        if (!(sigma[k] > 2 * grid.dx(k)))
            throw ResolutionGuard("packet: width below twice the grid spacing");
        if (!(grid.nyquist(k) > kMass * v + 6.0 / sigma[k]))
            throw ResolutionGuard("packet: Nyquist momentum too small for this velocity/width");
    }
}

WaveField make_gaussian(const PacketSpec& spec, const GridSpec& grid) {
    spec.validate(grid);
    WaveField f(grid);
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < grid.n[0]; ++i)
        for (std::uint32_t j = 0; j < grid.n[1]; ++j)
            for (std::uint32_t k = 0; k < grid.n[2]; ++k, ++idx) {
                Vec3 x = grid.point(i, j, k);
                Vec3 d = x - spec.center;
                double q = d.x * d.x / (4 * spec.sigma[0] * spec.sigma[0]) +
                           d.y * d.y / (4 * spec.sigma[1] * spec.sigma[1]) +
                           d.z * d.z / (4 * spec.sigma[2] * spec.sigma[2]);
                f[idx] = std::exp(cplx{-q, kMass * spec.velocity.dot(x)});
            }
    f.normalize();
    return f;
}

WaveField momentum_cutoff(const WaveField& field, const Vec3& velocity) {
    double v = velocity.norm();
    if (!(v > 0)) throw std::invalid_argument("momentum_cutoff: speed must be positive");
    const GridSpec& g = field.grid();
    const double inner_r = kMass * std::sqrt(v) / 16.0;
    const double outer_r = kMass * std::sqrt(v) / 8.0;
    WaveField out = field;
    fft_for(g).forward(out.data());
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < g.n[0]; ++i)
        for (std::uint32_t j = 0; j < g.n[1]; ++j)
            for (std::uint32_t k = 0; k < g.n[2]; ++k, ++idx) {
                Vec3 p{g.momentum(0, i), g.momentum(1, j), g.momentum(2, k)};
                double r = (p - velocity * kMass).norm();
                double m = 1.0 - quintic_smoothstep((r - inner_r) / (outer_r - inner_r));
                out[idx] *= m;
            }
    fft_for(g).backward_normalized(out.data());
    return out;
}

namespace {

template <class Dispersion>
WaveField evolve_diagonal(const WaveField& field, double t, Dispersion&& energy) {
    const GridSpec& g = field.grid();
    WaveField out = field;
    fft_for(g).forward(out.data());
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < g.n[0]; ++i)
        for (std::uint32_t j = 0; j < g.n[1]; ++j)
            for (std::uint32_t k = 0; k < g.n[2]; ++k, ++idx)
                out[idx] *= std::exp(-kI * (t * energy(i, j, k)));
    fft_for(g).backward_normalized(out.data());
    return out;
}

}  // namespace

WaveField free_evolve(const WaveField& field, double t) {
    if (t == 0.0) return field;
    const GridSpec& g = field.grid();
    return evolve_diagonal(field, t, [&](std::uint32_t i, std::uint32_t j, std::uint32_t k) {
        Vec3 p{g.momentum(0, i), g.momentum(1, j), g.momentum(2, k)};
        return p.norm2() / (2 * kMass);
    });
}

WaveField free_evolve_stencil(const WaveField& field, double t) {
    if (t == 0.0) return field;
    const GridSpec& g = field.grid();
    return evolve_diagonal(field, t, [&](std::uint32_t i, std::uint32_t j, std::uint32_t k) {
        double e = 0.0;
        std::uint32_t ids[3] = {i, j, k};
        for (int ax = 0; ax < 3; ++ax) {
            double kd = g.momentum(ax, ids[ax]) * g.dx(ax);
            e += (2 - 2 * std::cos(kd)) / (2 * kMass * g.dx(ax) * g.dx(ax));
        }
        return e;
    });
}

DiscreteHamiltonian::DiscreteHamiltonian(const GridSpec& grid, const PotentialField& field,
                                         const PropagatorConfig& config)
    : grid_(grid) {
    grid_.validate();
    const std::size_t n = grid_.size();
    for (int ax = 0; ax < 3; ++ax) {
        hop_[ax] = 1.0 / (2 * kMass * grid_.dx(ax) * grid_.dx(ax));
        links_[ax].assign(n, cplx{1, 0});
    }
    diag_.assign(n, 0.0);
    const bool zero_field = field.flux().all_zero();
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < grid_.n[0]; ++i)
        for (std::uint32_t j = 0; j < grid_.n[1]; ++j)
            for (std::uint32_t k = 0; k < grid_.n[2]; ++k, ++idx) {
                Vec3 x = grid_.point(i, j, k);
                diag_[idx] = field.eval_V(x) +
                             (config.confinement_v0 != 0.0 && field.magnet().contains(x)
                                  ? config.confinement_v0
                                  : 0.0) +
                             2 * (hop_[0] + hop_[1] + hop_[2]);
                if (zero_field) continue;
                for (int ax = 0; ax < 3; ++ax) {
                    Vec3 step{0, 0, 0};
                    if (ax == 0) step.x = grid_.dx(0);
                    if (ax == 1) step.y = grid_.dx(1);
                    if (ax == 2) step.z = grid_.dx(2);
                    double integral = 0.0;
                    for (int q = 0; q < 4; ++q)
                        integral += kG4w[q] * field.eval_A(x + step * kG4x[q]).dot(step);
                    links_[ax][idx] = std::exp(-kI * integral);
                }
            }
}

void DiscreteHamiltonian::apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const auto& n = grid_.n;
    out.resize(in.size());
    std::size_t idx = 0;
    const std::size_t s1 = std::size_t(n[1]) * n[2], s2 = n[2], s3 = 1;
    for (std::uint32_t i = 0; i < n[0]; ++i)
        for (std::uint32_t j = 0; j < n[1]; ++j)
            for (std::uint32_t k = 0; k < n[2]; ++k, ++idx) {
                cplx acc = diag_[idx] * in[idx];
                // neighbor in +ax: hop through this site's link; in -ax: through
                // the neighbor's conjugated link
                std::size_t ip = (i + 1 < n[0]) ? idx + s1 : idx - std::size_t(n[0] - 1) * s1;
                std::size_t im = (i > 0) ? idx - s1 : idx + std::size_t(n[0] - 1) * s1;
                std::size_t jp = (j + 1 < n[1]) ? idx + s2 : idx - std::size_t(n[1] - 1) * s2;
                std::size_t jm = (j > 0) ? idx - s2 : idx + std::size_t(n[1] - 1) * s2;
                std::size_t kp = (k + 1 < n[2]) ? idx + s3 : idx - std::size_t(n[2] - 1) * s3;
                std::size_t km = (k > 0) ? idx - s3 : idx + std::size_t(n[2] - 1) * s3;
                acc -= hop_[0] * (links_[0][idx] * in[ip] + std::conj(links_[0][im]) * in[im]);
                acc -= hop_[1] * (links_[1][idx] * in[jp] + std::conj(links_[1][jm]) * in[jm]);
                acc -= hop_[2] * (links_[2][idx] * in[kp] + std::conj(links_[2][km]) * in[km]);
                out[idx] = acc;
            }
}

double DiscreteHamiltonian::diag_max() const {
    double m = 0.0;
    for (double d : diag_) m = std::max(m, std::abs(d));
    return m + 2 * (hop_[0] + hop_[1] + hop_[2]);
}

DiscreteHamiltonian build_hamiltonian(const GridSpec& grid, const PotentialField& field,
                                      const PropagatorConfig& config) {
    return DiscreteHamiltonian(grid, field, config);
}

SpectralHamiltonian::SpectralHamiltonian(const GridSpec& grid, const PotentialField& field,
                                         const PropagatorConfig& config)
    : grid_(grid) {
    grid_.validate();
    const std::size_t n = grid_.size();
    const bool zero_field = field.flux().all_zero();
    for (auto& a : a_) a.assign(n, 0.0);
    diag_.assign(n, 0.0);
    zero_interaction_ = true;
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < grid_.n[0]; ++i)
        for (std::uint32_t j = 0; j < grid_.n[1]; ++j)
            for (std::uint32_t k = 0; k < grid_.n[2]; ++k, ++idx) {
                Vec3 x = grid_.point(i, j, k);
                Vec3 a = zero_field ? Vec3{0, 0, 0} : field.eval_A(x);
                a_[0][idx] = a.x;
                a_[1][idx] = a.y;
                a_[2][idx] = a.z;
                diag_[idx] = a.norm2() / (2 * kMass) + field.eval_V(x) +
                             (config.confinement_v0 != 0.0 && field.magnet().contains(x)
                                  ? config.confinement_v0
                                  : 0.0);
                if (a.norm2() != 0.0 || diag_[idx] != 0.0) zero_interaction_ = false;
            }
}

void SpectralHamiltonian::apply_interaction(const std::vector<cplx>& in,
                                            std::vector<cplx>& out) const {
    const GridSpec& g = grid_;
    const std::size_t n = g.size();
    out.assign(n, cplx{0, 0});
    if (zero_interaction_) return;

    // -(A.p + p.A)/2m as the explicitly symmetric pseudospectral pair
    std::vector<cplx> hat = in;
    fft_for(g).forward(hat);
    std::vector<cplx> grad(n), prod(n), div_hat(n, cplx{0, 0});
    for (int ax = 0; ax < 3; ++ax) {
        // p_ax in  ->  A_ax * (p_ax in)
        for (std::size_t q = 0; q < n; ++q) grad[q] = hat[q];
        std::size_t idx = 0;
        for (std::uint32_t i = 0; i < g.n[0]; ++i)
            for (std::uint32_t j = 0; j < g.n[1]; ++j)
                for (std::uint32_t k = 0; k < g.n[2]; ++k, ++idx) {
                    std::uint32_t ids[3] = {i, j, k};
                    double p = g.momentum(ax, ids[ax]);
                    // drop the unpaired Nyquist bin so p stays Hermitian
                    if (ids[ax] == g.n[ax] / 2) p = 0.0;
                    grad[idx] *= p;
                }
        fft_for(g).backward_normalized(grad);
        for (std::size_t q = 0; q < n; ++q) {
            out[q] += -0.5 / kMass * a_[ax][q] * grad[q];
            prod[q] = a_[ax][q] * in[q];
        }
        // accumulate p.(A in) in Fourier space
        fft_for(g).forward(prod);
        idx = 0;
        for (std::uint32_t i = 0; i < g.n[0]; ++i)
            for (std::uint32_t j = 0; j < g.n[1]; ++j)
                for (std::uint32_t k = 0; k < g.n[2]; ++k, ++idx) {
                    std::uint32_t ids[3] = {i, j, k};
                    double p = g.momentum(ax, ids[ax]);
                    if (ids[ax] == g.n[ax] / 2) p = 0.0;
                    div_hat[idx] += p * prod[idx];
                }
    }
    fft_for(g).backward_normalized(div_hat);
    for (std::size_t q = 0; q < n; ++q) out[q] += -0.5 / kMass * div_hat[q] + diag_[q] * in[q];
}

void SpectralHamiltonian::apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const GridSpec& g = grid_;
    apply_interaction(in, out);
    std::vector<cplx> hat = in;
    fft_for(g).forward(hat);
    std::size_t idx = 0;
    for (std::uint32_t i = 0; i < g.n[0]; ++i)
        for (std::uint32_t j = 0; j < g.n[1]; ++j)
            for (std::uint32_t k = 0; k < g.n[2]; ++k, ++idx) {
                Vec3 p{g.momentum(0, i), g.momentum(1, j), g.momentum(2, k)};
                hat[idx] *= p.norm2() / (2 * kMass);
            }
    fft_for(g).backward_normalized(hat);
    for (std::size_t q = 0; q < g.size(); ++q) out[q] += hat[q];
}

void krylov_expm_apply(const std::function<void(const std::vector<cplx>&, std::vector<cplx>&)>& H,
                       std::vector<cplx>& psi, double dt, int max_dim, double tol) {
    const std::size_t n = psi.size();
    double beta = 0.0;
    for (const cplx& v : psi) beta += std::norm(v);
    beta = std::sqrt(beta);
    if (beta == 0.0 || dt == 0.0) return;

    std::vector<std::vector<cplx>> V;
    V.emplace_back(n);
    for (std::size_t q = 0; q < n; ++q) V[0][q] = psi[q] / beta;

    std::vector<double> alpha, betas;  // Lanczos tridiagonal
    std::vector<cplx> w(n);
    int m = 0;
    double resid = 0.0;
    std::vector<cplx> combo;  // coefficients of exp(-i dt T) e1

    auto small_exp = [&](int dim) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
        for (int r = 0; r < dim; ++r) {
            T(r, r) = alpha[r];
            if (r + 1 < dim) T(r, r + 1) = T(r + 1, r) = betas[r];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Eigen::VectorXcd phases(dim);
        for (int r = 0; r < dim; ++r) phases(r) = std::exp(cplx{0, -dt * es.eigenvalues()(r)});
        Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(dim);
        e1(0) = 1.0;
        Eigen::VectorXcd y = es.eigenvectors() * (phases.asDiagonal() * (es.eigenvectors().transpose() * e1));
        combo.assign(dim, cplx{0, 0});
        for (int r = 0; r < dim; ++r) combo[r] = y(r);
    };

    for (m = 0; m < max_dim; ++m) {
        H(V[m], w);
        double a = 0.0;
        for (std::size_t q = 0; q < n; ++q) a += std::real(std::conj(V[m][q]) * w[q]);
        alpha.push_back(a);
        for (std::size_t q = 0; q < n; ++q) w[q] -= a * V[m][q];
        if (m > 0)
            for (std::size_t q = 0; q < n; ++q) w[q] -= betas[m - 1] * V[m - 1][q];
        // full reorthogonalization keeps the basis clean at small m
        for (int r = 0; r <= m; ++r) {
            cplx c{0, 0};
            for (std::size_t q = 0; q < n; ++q) c += std::conj(V[r][q]) * w[q];
            for (std::size_t q = 0; q < n; ++q) w[q] -= c * V[r][q];
        }
        double b = 0.0;
        for (const cplx& v : w) b += std::norm(v);
        b = std::sqrt(b);
        betas.push_back(b);
        small_exp(m + 1);
        resid = b * std::abs(combo[m]);
        if (resid < tol || b < 1e-14) {
            ++m;
            break;
        }
        if (m + 1 < max_dim) {
            V.emplace_back(n);
            for (std::size_t q = 0; q < n; ++q) V[m + 1][q] = w[q] / b;
        }
    }
    if (resid >= tol && betas.back() >= 1e-14)
        throw KrylovStall("krylov: residual target not reached at maximum subspace dimension");

    for (std::size_t q = 0; q < n; ++q) {
        cplx acc{0, 0};
        for (int r = 0; r < m; ++r) acc += combo[r] * V[r][q];
        psi[q] = beta * acc;
    }
}

EvolveResult interacting_evolve(const WaveField& phi_v, double t0, double t1,
                                const PotentialField& field, const PropagatorConfig& config,
                                const std::vector<double>& snapshot_times,
                                const std::optional<PacketSpec>& packet) {
    const GridSpec& g = phi_v.grid();
    EvolveResult res;
    res.state = free_evolve(phi_v, t0);

    // far-past guard: the prepared state must have left the magnet's vicinity
    if (packet) {
        double sg = std::max({packet->sigma[0], packet->sigma[1], packet->sigma[2]});
        double mass = 0.0;
        std::size_t idx = 0;
        for (std::uint32_t i = 0; i < g.n[0]; ++i)
            for (std::uint32_t j = 0; j < g.n[1]; ++j)
                for (std::uint32_t k = 0; k < g.n[2]; ++k, ++idx)
                    if (field.magnet().distance(g.point(i, j, k)) < 2 * sg)
                        mass += std::norm(res.state[idx]);
        mass *= g.cell_volume();
        res.guard_mass = mass;
        if (mass >= config.far_past_mass_tol)
            throw FarPastGuard("interacting_evolve: prepared mass near the magnet is " +
                               std::to_string(mass));
    }

    double norm0 = res.state.norm();

    Scheme scheme = config.scheme;
    std::unique_ptr<SpectralHamiltonian> sh;
    std::unique_ptr<DiscreteHamiltonian> dh;
    if (scheme == Scheme::SpectralKrylov || scheme == Scheme::SplitSpectral) {
        sh = std::make_unique<SpectralHamiltonian>(g, field, config);
        if (sh->interaction_is_zero()) scheme = Scheme::SpectralFree;
    } else if (scheme == Scheme::LinkKrylov) {
        dh = std::make_unique<DiscreteHamiltonian>(g, field, config);
    }

    double max_speed = packet ? packet->speed() : 1.0;
    double dt = config.dt > 0 ? config.dt
                              : 0.5 * std::min({g.dx(0), g.dx(1), g.dx(2)}) / std::max(max_speed, 1.0);

    auto advance = [&](double step) {
        if (step == 0.0) return;
        switch (scheme) {
            case Scheme::SpectralFree:
                res.state = free_evolve(res.state, step);
                break;
            case Scheme::LinkKrylov: {
                auto mv = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
                    dh->apply(in, out);
                };
                krylov_expm_apply(mv, res.state.data(), step, config.krylov_dim, config.krylov_tol);
                break;
            }
            case Scheme::SpectralKrylov: {
                auto mv = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
                    sh->apply(in, out);
                };
                krylov_expm_apply(mv, res.state.data(), step, config.krylov_dim, config.krylov_tol);
                break;
            }
            case Scheme::SplitSpectral: {
                auto mv = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
                    sh->apply_interaction(in, out);
                };
                res.state = free_evolve(res.state, 0.5 * step);
                krylov_expm_apply(mv, res.state.data(), step, config.krylov_dim, config.krylov_tol);
                res.state = free_evolve(res.state, 0.5 * step);
                break;
            }
        }
        ++res.steps;
    };

    // march through snapshot times, landing on each exactly
    auto march_to = [&](double target, double from) {
        double span = target - from;
        if (span < -1e-12)
            throw std::invalid_argument("interacting_evolve: snapshot times must be increasing");
        if (span <= 0) return;
        int steps = std::max(1, int(std::ceil(span / dt - 1e-9)));
        double h = span / steps;
        for (int s = 0; s < steps; ++s) advance(h);
    };
    double t = t0;
    for (double mark : snapshot_times) {
        march_to(mark, t);
        t = mark;
        res.snapshots.push_back(res.state);
        res.snapshot_times.push_back(mark);
    }
    march_to(t1, t);
    res.norm_drift = std::abs(res.state.norm() - norm0);
    return res;
}

}  // namespace absim
