#pragma once

#include <random>

#include "kvn/states.hpp"

namespace kvn {

// Deterministic normal deviates: mt19937_64 + explicit Box-Muller, so a seed
// pins the stream independent of the standard library.
class GaussianRng {
  public:
    explicit GaussianRng(uint64_t seed) : eng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform_();
        } while (u1 <= 0.0);
        const double u2 = uniform_();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    double uniform_() {
        return (eng_() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit in [0,1)
    }
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Truncated Fourier series with power-law coefficient decay (exponent 2 by
// default): band-limited, periodic, generically nonzero at the seam.
inline Amplitude random_bandlimited_amplitude(const PhaseGrid& g, uint64_t seed,
                                              int max_mode = 0, double decay = 2.0) {
    if (max_mode <= 0) max_mode = std::min(g.n_q, g.n_p) / 8;
    if (2 * max_mode >= std::min(g.n_q, g.n_p))
        throw error(errc::invalid_dimension, "max_mode too large for grid");
    GaussianRng rng(seed);
    ComplexField coef(g);
    for (int a = -max_mode; a <= max_mode; ++a) {
        for (int b = -max_mode; b <= max_mode; ++b) {
            const double g1 = rng(), g2 = rng();
            const double w = std::pow(1.0 + a * a + b * b, -decay / 2.0);
            const int ja = (a + g.n_q) % g.n_q;
            const int kb = (b + g.n_p) % g.n_p;
            coef(ja, kb) = cplx(g1, g2) * w;
        }
    }
    fft_axis(coef, Axis::q, +1);
    fft_axis(coef, Axis::p, +1);
    return normalize(std::move(coef));
}

}  // namespace kvn
