#pragma once

// Inner loops of the propagator. Every kernel has a straightforward serial
// reference in `kernels::serial`; the unqualified versions are the
// production ones and use OpenMP when the build enables it.
//
// Reductions are summed over fixed-size blocks in index order, so their
// result does not depend on the number of threads.

#include <cstddef>
#include <span>
#include <vector>

#include "wmqt/state.hpp"

namespace wmqt::kernels {

inline constexpr std::size_t reduction_block = 2048;

/// Sum of |a_i|^2.
real sum_abs2(std::span<const complex> a);

/// Sum of (x0 + i*dx) * |a_i|^2.
real sum_x_abs2(std::span<const complex> a, real x0, real dx);

/// Sum of w_i * |a_i|^2.
real sum_weighted_abs2(std::span<const complex> a, std::span<const real> w);

/// Right-hand side of a Crank-Nicolson step on the interior nodes:
///   out_i = d_i psi_i + c (psi_{i-1} + psi_{i+1}),   0 < i < n-1,
/// with out_0 = out_{n-1} = 0.
void cn_rhs(std::span<const complex> psi, std::span<const complex> diag,
            complex coupling, std::span<complex> out);

/// LU factors of the interior block of a tridiagonal matrix with diagonal
/// `diag` and a constant off-diagonal (the discrete Laplacian coupling).
/// The Dirichlet end nodes are excluded from the system.
class TridiagonalLU {
public:
    TridiagonalLU() = default;
    TridiagonalLU(std::span<const complex> diag, complex off);

    void factorize(std::span<const complex> diag, complex off);

    /// Overwrites `x` (full-length, interior holds the rhs) with the solution;
    /// end nodes are set to zero.
    void solve(std::span<complex> x) const;

    std::size_t size() const { return inv_pivot_.size(); }
    complex off() const { return off_; }
    std::span<const complex> inv_pivot() const { return inv_pivot_; }
    std::span<const complex> upper() const { return upper_; }

private:
    complex off_{};
    std::vector<complex> inv_pivot_;  // 1 / m_i
    std::vector<complex> upper_;      // off / m_i
};

namespace serial {

real sum_abs2(std::span<const complex> a);
real sum_x_abs2(std::span<const complex> a, real x0, real dx);

void cn_rhs(std::span<const complex> psi, std::span<const complex> diag,
            complex coupling, std::span<complex> out);

/// One Crank-Nicolson step in a single pass: the right-hand side is formed
/// inside the forward sweep. `scratch` must have psi.size() elements.
void cn_step_fused(std::span<complex> psi, std::span<const complex> diag,
                   complex coupling, const TridiagonalLU& lu,
                   std::span<complex> scratch);

}  // namespace serial

/// Number of worker threads the parallel kernels will use (1 without OpenMP).
int max_threads();

/// Thread count for parallel kernels launched from the calling thread.
void set_threads(int n);

}  // namespace wmqt::kernels
