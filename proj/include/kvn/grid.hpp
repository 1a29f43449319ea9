#pragma once

#include <cmath>
#include <numbers>

#include "kvn/errors.hpp"
#include "kvn/fft.hpp"

namespace kvn {

enum class Axis { q, p };

// Periodic rectangular discretization of phase space. The point at q_max is
// identified with q_min; samples are q_j = q_min + j*dq, j in [0, n_q).
struct PhaseGrid {
    int n_q = 0;
    int n_p = 0;
    double q_min = 0, q_max = 0;
    double p_min = 0, p_max = 0;
    double hbar = 1.0;

    double Lq() const { return q_max - q_min; }
    double Lp() const { return p_max - p_min; }
    double dq() const { return Lq() / n_q; }
    double dp() const { return Lp() / n_p; }
    double cell() const { return dq() * dp(); }
    double q(int j) const { return q_min + j * dq(); }
    double p(int k) const { return p_min + k * dp(); }

    // FFT-ordered wavenumbers: index f maps to frequency f for f < n/2, f-n above.
    double kq(int j) const {
        int f = j < n_q / 2 ? j : j - n_q;
        return 2.0 * std::numbers::pi * f / Lq();
    }
    double kp(int k) const {
        int f = k < n_p / 2 ? k : k - n_p;
        return 2.0 * std::numbers::pi * f / Lp();
    }

    int size() const { return n_q * n_p; }

    bool operator==(const PhaseGrid&) const = default;
};

inline PhaseGrid make_grid(int n_q, int n_p, double q_min, double q_max, double p_min,
                           double p_max, double hbar = 1.0) {
    if (!detail::is_pow2(n_q) || n_q < 8 || !detail::is_pow2(n_p) || n_p < 8)
        throw error(errc::invalid_dimension, "grid counts must be powers of two >= 8");
    if (!(q_max > q_min) || !(p_max > p_min))
        throw error(errc::invalid_range, "grid ranges must be nonempty and increasing");
    if (!(hbar > 0.0)) throw error(errc::invalid_range, "hbar must be positive");
    return PhaseGrid{n_q, n_p, q_min, q_max, p_min, p_max, hbar};
}

// Interior sub-domain where seam/window artifacts are excluded: the central
// 50% of each axis, q in [q_min + Lq/4, q_max - Lq/4) and likewise in p.
struct TrustRegion {
    int j_lo, j_hi;  // half-open
    int k_lo, k_hi;

    bool contains(int j, int k) const { return j >= j_lo && j < j_hi && k >= k_lo && k < k_hi; }
};

inline TrustRegion trust_region(const PhaseGrid& g) {
    return TrustRegion{g.n_q / 4, 3 * g.n_q / 4, g.n_p / 4, 3 * g.n_p / 4};
}

}  // namespace kvn
