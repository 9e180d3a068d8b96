#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qsched/bits.hpp"

namespace qsched {

// Quadratic binary cost  energy(x) = offset + sum_i linear[i] x_i + sum_{i<j} quadratic[{i,j}] x_i x_j.
// Coefficients derived from scheduling instances are exact integers stored in doubles;
// sums stay exactly representable at the magnitudes involved.
struct QuboProblem {
    int num_vars = 0;
    std::map<int, double> linear;
    std::map<std::pair<int, int>, double> quadratic; // keys ordered (i < j), stored once
    double offset = 0.0;

    void add_offset(double c) { offset += c; }

    void add_linear(int i, double c) {
        if (i < 0 || i >= num_vars) throw std::invalid_argument("qubo: variable index out of range");
        linear[i] += c;
    }

    void add_quadratic(int i, int j, double c) {
        if (i == j) { add_linear(i, c); return; } // x^2 = x for binaries
        if (i < 0 || j < 0 || i >= num_vars || j >= num_vars)
            throw std::invalid_argument("qubo: variable index out of range");
        if (i > j) std::swap(i, j);
        quadratic[{i, j}] += c;
    }

    // Drops exact-zero coefficients accumulated by cancellation.
    void compress() {
        for (auto it = linear.begin(); it != linear.end();)
            it = (it->second == 0.0) ? linear.erase(it) : std::next(it);
        for (auto it = quadratic.begin(); it != quadratic.end();)
            it = (it->second == 0.0) ? quadratic.erase(it) : std::next(it);
    }

    double energy(const std::vector<int>& x) const {
        if (static_cast<int>(x.size()) != num_vars)
            throw std::invalid_argument("qubo: assignment length mismatch");
        double e = offset;
        for (const auto& [i, c] : linear) e += c * x[static_cast<std::size_t>(i)];
        for (const auto& [ij, c] : quadratic)
            e += c * x[static_cast<std::size_t>(ij.first)] * x[static_cast<std::size_t>(ij.second)];
        return e;
    }

    double energy_of_index(std::uint64_t k) const {
        double e = offset;
        for (const auto& [i, c] : linear) e += c * bit_of(k, i);
        for (const auto& [ij, c] : quadratic)
            e += c * bit_of(k, ij.first) * bit_of(k, ij.second);
        return e;
    }
};

} // namespace qsched
