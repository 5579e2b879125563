#pragma once

// Hand-rolled generators shared by the test binaries.

#include "lax_core.hpp"

#include <cstdint>
#include <random>

namespace toda::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    int sign() { return (eng_() & 1u) ? 1 : -1; }

    PhasePoint point(int n, double scale = 1.0)
    {
        Vector q(n);
        Vector p(n);
        for (int k = 0; k < n; ++k)
            q[k] = uniform(-scale, scale);
        for (int k = 0; k < n; ++k)
            p[k] = uniform(-scale, scale);
        return PhasePoint(q, p);
    }

    SignVector signs(int n)
    {
        std::vector<int> e(static_cast<std::size_t>(n));
        for (auto& x : e)
            x = sign();
        return SignVector(e);
    }

    SignVector signs_with_parity(int n, int parity)
    {
        std::vector<int> e(static_cast<std::size_t>(n));
        int prod = 1;
        for (auto& x : e) {
            x = sign();
            prod *= x;
        }
        if (prod != parity)
            e[static_cast<std::size_t>(integer(0, n - 1))] *= -1;
        return SignVector(e);
    }

private:
    std::mt19937_64 eng_;
};

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline PhasePoint zero_point(int n) { return PhasePoint(Vector::Zero(n), Vector::Zero(n)); }

} // namespace toda::testing
