#pragma once

#include <complex>
#include <vector>

#include "smd/core.hpp"

namespace smd::detail {

// Direct solver for the cell-centered Poisson problem with periodic x,y and
// zero-flux walls in z: discrete Fourier transform over the periodic
// directions, then one tridiagonal solve per transverse mode. The (0,0) mode
// is fixed by pinning its bottom cell to zero.
class PoissonSolver {
public:
    explicit PoissonSolver(const Grid& g);

    // rhs and psi use interior cells only; psi ghosts are left untouched.
    void solve(const Field3& rhs, Field3& psi);

private:
    void dft_x(bool forward);
    void dft_y(bool forward);

    int nx_, ny_, nz_;
    double hx_, hy_, hz_;
    std::vector<double> lambda_x_, lambda_y_;            // transverse eigenvalues
    std::vector<std::complex<double>> wx_fwd_, wx_inv_;  // twiddle matrices
    std::vector<std::complex<double>> wy_fwd_, wy_inv_;
    std::vector<std::complex<double>> spec_;             // nx*ny*nz working array
    std::vector<std::complex<double>> line_;
    std::vector<std::complex<double>> diag_, rhs_col_;   // tridiagonal workspace
    std::vector<double> lower_upper_;
};

}  // namespace smd::detail
