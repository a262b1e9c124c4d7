#pragma once

#include <cmath>
#include <random>

#include "doctest.h"

namespace homsim_test {

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-12) {
    return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

#define CHECK_REL(a, b, rel)                                                                \
    do {                                                                                    \
        INFO("lhs=", (a), " rhs=", (b));                                                    \
        CHECK(homsim_test::close_rel((a), (b), (rel)));                                     \
    } while (0)

inline std::mt19937& rng() {
    static std::mt19937 gen(0xC0FFEEu);
    return gen;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

}  // namespace homsim_test
