#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qsched {

// Bit/qubit bookkeeping used everywhere:
//   * qubit q is bit q of a computational-basis index (qubit 0 = least significant),
//   * bit value 0 corresponds to spin z = +1 (sigma_z|0> = +|0>),
//   * textual bitstrings put qubit 0 as the leftmost character.

inline int bit_of(std::uint64_t index, int qubit) {
    return static_cast<int>((index >> qubit) & 1ULL);
}

inline int spin_of(std::uint64_t index, int qubit) {
    return 1 - 2 * bit_of(index, qubit);
}

inline std::string index_to_bitstring(std::uint64_t index, int num_qubits) {
    std::string s(static_cast<std::size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; ++q) {
        if (bit_of(index, q)) s[static_cast<std::size_t>(q)] = '1';
    }
    return s;
}

inline std::uint64_t bitstring_to_index(const std::string& s) {
    std::uint64_t index = 0;
    for (std::size_t q = 0; q < s.size(); ++q) {
        if (s[q] == '1') {
            index |= (1ULL << q);
        } else if (s[q] != '0') {
            throw std::invalid_argument("bitstring must contain only '0'/'1': " + s);
        }
    }
    return index;
}

} // namespace qsched
