#include "poisson.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smd::detail {

namespace {

std::vector<std::complex<double>> twiddle(int n, double sign) {
    std::vector<std::complex<double>> w(static_cast<std::size_t>(n) * n);
    for (int m = 0; m < n; ++m)
        for (int i = 0; i < n; ++i) {
            // reduce m*i mod n first so large products keep full accuracy
            const long idx = (static_cast<long>(m) * i) % n;
            const double angle = sign * 2.0 * std::numbers::pi * double(idx) / double(n);
            w[static_cast<std::size_t>(m) * n + i] = {std::cos(angle), std::sin(angle)};
        }
    return w;
}

}  // namespace

PoissonSolver::PoissonSolver(const Grid& g)
    : nx_(g.nx), ny_(g.ny), nz_(g.nz), hx_(g.hx), hy_(g.hy), hz_(g.hz) {
    lambda_x_.resize(nx_);
    for (int m = 0; m < nx_; ++m) {
        const double s = std::sin(std::numbers::pi * m / nx_);
        lambda_x_[m] = -4.0 * s * s / (hx_ * hx_);
    }
    lambda_y_.resize(ny_);
    for (int m = 0; m < ny_; ++m) {
        const double s = std::sin(std::numbers::pi * m / ny_);
        lambda_y_[m] = -4.0 * s * s / (hy_ * hy_);
    }
    wx_fwd_ = twiddle(nx_, -1.0);
    wx_inv_ = twiddle(nx_, 1.0);
    wy_fwd_ = twiddle(ny_, -1.0);
    wy_inv_ = twiddle(ny_, 1.0);
    spec_.resize(static_cast<std::size_t>(nx_) * ny_ * nz_);
    line_.resize(std::max(nx_, ny_));
    diag_.resize(nz_);
    rhs_col_.resize(nz_);
}

void PoissonSolver::dft_x(bool forward) {
    const auto& w = forward ? wx_fwd_ : wx_inv_;
    const double scale = forward ? 1.0 : 1.0 / nx_;
    for (int k = 0; k < nz_; ++k)
        for (int j = 0; j < ny_; ++j) {
            std::complex<double>* row = &spec_[(static_cast<std::size_t>(k) * ny_ + j) * nx_];
            for (int m = 0; m < nx_; ++m) {
                std::complex<double> acc{0.0, 0.0};
                const std::complex<double>* wm = &w[static_cast<std::size_t>(m) * nx_];
                for (int i = 0; i < nx_; ++i) acc += wm[i] * row[i];
                line_[m] = acc * scale;
            }
            for (int m = 0; m < nx_; ++m) row[m] = line_[m];
        }
}

void PoissonSolver::dft_y(bool forward) {
    const auto& w = forward ? wy_fwd_ : wy_inv_;
    const double scale = forward ? 1.0 : 1.0 / ny_;
    for (int k = 0; k < nz_; ++k)
        for (int i = 0; i < nx_; ++i) {
            for (int m = 0; m < ny_; ++m) {
                std::complex<double> acc{0.0, 0.0};
                const std::complex<double>* wm = &w[static_cast<std::size_t>(m) * ny_];
                for (int j = 0; j < ny_; ++j)
                    acc += wm[j] * spec_[(static_cast<std::size_t>(k) * ny_ + j) * nx_ + i];
                line_[m] = acc * scale;
            }
            for (int m = 0; m < ny_; ++m)
                spec_[(static_cast<std::size_t>(k) * ny_ + m) * nx_ + i] = line_[m];
        }
}

void PoissonSolver::solve(const Field3& rhs, Field3& psi) {
    for (int k = 0; k < nz_; ++k)
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                spec_[(static_cast<std::size_t>(k) * ny_ + j) * nx_ + i] = rhs(i, j, k);

    dft_x(true);
    dft_y(true);

    const double invh2 = 1.0 / (hz_ * hz_);
    for (int my = 0; my < ny_; ++my)
        for (int mx = 0; mx < nx_; ++mx) {
            const double lambda = lambda_x_[mx] + lambda_y_[my];
            const std::size_t base = static_cast<std::size_t>(my) * nx_ + mx;
            const std::size_t stride = static_cast<std::size_t>(nx_) * ny_;
            for (int k = 0; k < nz_; ++k) rhs_col_[k] = spec_[base + stride * k];

            const bool mean_mode = (mx == 0 && my == 0);
            if (mean_mode) {
                // enforce compatibility, then pin the bottom cell
                std::complex<double> mean{0.0, 0.0};
                for (int k = 0; k < nz_; ++k) mean += rhs_col_[k];
                mean /= double(nz_);
                for (int k = 0; k < nz_; ++k) rhs_col_[k] -= mean;
            }

            // assemble tridiagonal rows: wall rows have a single z neighbour
            for (int k = 0; k < nz_; ++k) {
                const double links = (k > 0 ? 1.0 : 0.0) + (k + 1 < nz_ ? 1.0 : 0.0);
                diag_[k] = lambda - links * invh2;
            }
            double lower = invh2, upper = invh2;
            if (mean_mode) {
                diag_[0] = 1.0;
                rhs_col_[0] = {0.0, 0.0};
            }

            // Thomas sweep; the first superdiagonal entry is zero for the
            // pinned mean mode.
            std::vector<std::complex<double>>& d = diag_;
            std::vector<std::complex<double>>& r = rhs_col_;
            double first_upper = mean_mode ? 0.0 : upper;
            for (int k = 1; k < nz_; ++k) {
                const double up_prev = (k == 1) ? first_upper : upper;
                const std::complex<double> w = lower / d[k - 1];
                d[k] -= w * up_prev;
                r[k] -= w * r[k - 1];
            }
            r[nz_ - 1] /= d[nz_ - 1];
            for (int k = nz_ - 2; k >= 0; --k) {
                const double up = (k == 0) ? first_upper : upper;
                r[k] = (r[k] - up * r[k + 1]) / d[k];
            }

            for (int k = 0; k < nz_; ++k) spec_[base + stride * k] = r[k];
        }

    dft_x(false);
    dft_y(false);

    for (int k = 0; k < nz_; ++k)
        for (int j = 0; j < ny_; ++j)
            for (int i = 0; i < nx_; ++i)
                psi(i, j, k) = spec_[(static_cast<std::size_t>(k) * ny_ + j) * nx_ + i].real();
}

}  // namespace smd::detail
