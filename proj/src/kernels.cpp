#include "wmqt/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wmqt/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wmqt::kernels {

namespace {

std::size_t block_count(std::size_t n) {
    return (n + reduction_block - 1) / reduction_block;
}

template <typename Term>
real blocked_sum(std::size_t n, Term term) {
    std::size_t const nb = block_count(n);
    std::vector<real> partial(nb, 0.0);
    auto const nbi = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel for schedule(static) if (nb > 1)
    for (std::ptrdiff_t b = 0; b < nbi; ++b) {
        std::size_t const lo = static_cast<std::size_t>(b) * reduction_block;
        std::size_t const hi = std::min(n, lo + reduction_block);
        real s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            s += term(i);
        }
        partial[static_cast<std::size_t>(b)] = s;
    }
    real total = 0.0;
    for (real s : partial) {
        total += s;
    }
    return total;
}

}  // namespace

real sum_abs2(std::span<const complex> a) {
    return blocked_sum(a.size(), [&](std::size_t i) { return std::norm(a[i]); });
}

real sum_x_abs2(std::span<const complex> a, real x0, real dx) {
    return blocked_sum(a.size(), [&](std::size_t i) {
        return (x0 + static_cast<real>(i) * dx) * std::norm(a[i]);
    });
}

real sum_weighted_abs2(std::span<const complex> a, std::span<const real> w) {
    return blocked_sum(a.size(), [&](std::size_t i) { return w[i] * std::norm(a[i]); });
}

void cn_rhs(std::span<const complex> psi, std::span<const complex> diag,
            complex coupling, std::span<complex> out) {
    auto const n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 1; i < n - 1; ++i) {
        out[i] = diag[i] * psi[i] + coupling * (psi[i - 1] + psi[i + 1]);
    }
    out.front() = 0.0;
    out.back() = 0.0;
}

TridiagonalLU::TridiagonalLU(std::span<const complex> diag, complex off) {
    factorize(diag, off);
}

void TridiagonalLU::factorize(std::span<const complex> diag, complex off) {
    std::size_t const n = diag.size();
    off_ = off;
    inv_pivot_.assign(n, 0.0);
    upper_.assign(n, 0.0);
    if (n < 3) {
        return;
    }
    real const scale = std::abs(off) + 1.0;
    complex prev_upper = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        complex const pivot = diag[i] - off * prev_upper;
        if (!(std::abs(pivot) > 1e-14 * scale)) {
            throw NumericalError("singular tridiagonal system at row " + std::to_string(i));
        }
        inv_pivot_[i] = 1.0 / pivot;
        upper_[i] = off * inv_pivot_[i];
        prev_upper = upper_[i];
    }
}

void TridiagonalLU::solve(std::span<complex> x) const {
    std::size_t const n = x.size();
    // forward
    complex prev = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        prev = (x[i] - off_ * prev) * inv_pivot_[i];
        x[i] = prev;
    }
    // back
    x[n - 1] = 0.0;
    for (std::size_t i = n - 2; i >= 2; --i) {
        x[i - 1] -= upper_[i - 1] * x[i];
    }
    x[0] = 0.0;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads([[maybe_unused]] int n) {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, n));
#endif
}

namespace serial {

real sum_abs2(std::span<const complex> a) {
    real s = 0.0;
    for (complex const& z : a) {
        s += std::norm(z);
    }
    return s;
}

real sum_x_abs2(std::span<const complex> a, real x0, real dx) {
    real s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (x0 + static_cast<real>(i) * dx) * std::norm(a[i]);
    }
    return s;
}

void cn_rhs(std::span<const complex> psi, std::span<const complex> diag,
            complex coupling, std::span<complex> out) {
    std::size_t const n = psi.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out[i] = diag[i] * psi[i] + coupling * (psi[i - 1] + psi[i + 1]);
    }
    out.front() = 0.0;
    out.back() = 0.0;
}

void cn_step_fused(std::span<complex> psi, std::span<const complex> diag,
                   complex coupling, const TridiagonalLU& lu,
                   std::span<complex> scratch) {
    std::size_t const n = psi.size();
    auto const inv_pivot = lu.inv_pivot();
    auto const upper = lu.upper();
    complex const off = lu.off();

    // Forward sweep reads psi_{i+1} before anything overwrites it; the
    // intermediate y is kept in scratch so psi stays intact for the rhs.
    complex prev = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        complex const rhs = diag[i] * psi[i] + coupling * (psi[i - 1] + psi[i + 1]);
        prev = (rhs - off * prev) * inv_pivot[i];
        scratch[i] = prev;
    }
    psi[n - 1] = 0.0;
    psi[n - 2] = scratch[n - 2];
    for (std::size_t i = n - 2; i >= 2; --i) {
        psi[i - 1] = scratch[i - 1] - upper[i - 1] * psi[i];
    }
    psi[0] = 0.0;
}

}  // namespace serial

}  // namespace wmqt::kernels
