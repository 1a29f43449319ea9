#pragma once

#include <complex>
#include <numbers>
#include <span>
#include <unordered_map>
#include <vector>

#include "kvn/errors.hpp"

namespace kvn {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct FftTables {
    std::vector<cplx> fwd;   // e^{-2*pi*i*j/n}, j in [0, n/2)
    std::vector<int> rev;    // bit-reversal permutation
};

inline const FftTables& fft_tables(int n) {
    thread_local std::unordered_map<int, FftTables> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    FftTables t;
    t.fwd.resize(n / 2);
    for (int j = 0; j < n / 2; ++j) {
        double a = -2.0 * std::numbers::pi * j / n;
        t.fwd[j] = cplx(std::cos(a), std::sin(a));
    }
    t.rev.resize(n);
    int lg = 0;
    while ((1 << lg) < n) ++lg;
    for (int i = 0; i < n; ++i) {
        int r = 0;
        for (int b = 0; b < lg; ++b)
            if (i & (1 << b)) r |= 1 << (lg - 1 - b);
        t.rev[i] = r;
    }
    return cache.emplace(n, std::move(t)).first->second;
}

}  // namespace detail

// In-place radix-2 transform, unnormalized.
// sign = -1: forward, sum f[j] e^{-2pi i jk/n};  sign = +1: inverse kernel (no 1/n).
inline void fft_pow2(std::span<cplx> data, int sign) {
    const int n = static_cast<int>(data.size());
    if (n == 1) return;
    if (!detail::is_pow2(n))
        throw error(errc::invalid_dimension, "fft length must be a power of two");
    const auto& t = detail::fft_tables(n);
    for (int i = 0; i < n; ++i) {
        int r = t.rev[i];
        if (i < r) std::swap(data[i], data[r]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len >> 1;
        const int stride = n / len;
        for (int start = 0; start < n; start += len) {
            for (int j = 0; j < half; ++j) {
                cplx w = t.fwd[j * stride];
                if (sign > 0) w = std::conj(w);
                cplx u = data[start + j];
                cplx v = data[start + j + half] * w;
                data[start + j] = u + v;
                data[start + j + half] = u - v;
            }
        }
    }
}

}  // namespace kvn
