#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qsched/bits.hpp"
#include "qsched/qubo.hpp"

namespace qsched {

// Statevector / diagonal-energy size cap. 2^26 complex doubles is about 1 GiB.
// Overridable via set_qubit_cap() or the QSCHED_QUBIT_CAP environment variable.
inline int& qubit_cap() {
    static int cap = [] {
        if (const char* env = std::getenv("QSCHED_QUBIT_CAP")) {
            int v = std::atoi(env);
            if (v > 0) return v;
        }
        return 26;
    }();
    return cap;
}

inline void set_qubit_cap(int cap) {
    if (cap < 1) throw std::invalid_argument("qubit cap must be positive");
    qubit_cap() = cap;
}

// Spin-picture cost:  energy(s) = constant + sum_q h[q] z_q + sum_{q<r} J[{q,r}] z_q z_r,
// with z_q = +1 for bit 0 (see bits.hpp for all conventions).
struct IsingHamiltonian {
    int num_qubits = 0;
    double constant = 0.0;
    std::map<int, double> fields;
    std::map<std::pair<int, int>, double> couplings; // keys ordered (q < r), stored once

    void add_field(int q, double c) {
        if (q < 0 || q >= num_qubits) throw std::invalid_argument("ising: qubit index out of range");
        fields[q] += c;
    }

    void add_coupling(int q, int r, double c) {
        if (q < 0 || r < 0 || q >= num_qubits || r >= num_qubits || q == r)
            throw std::invalid_argument("ising: bad coupling indices");
        if (q > r) std::swap(q, r);
        couplings[{q, r}] += c;
    }

    void compress() {
        for (auto it = fields.begin(); it != fields.end();)
            it = (it->second == 0.0) ? fields.erase(it) : std::next(it);
        for (auto it = couplings.begin(); it != couplings.end();)
            it = (it->second == 0.0) ? couplings.erase(it) : std::next(it);
    }

    double energy_of_index(std::uint64_t k) const {
        double e = constant;
        for (const auto& [q, h] : fields) e += h * spin_of(k, q);
        for (const auto& [qr, j] : couplings)
            e += j * spin_of(k, qr.first) * spin_of(k, qr.second);
        return e;
    }

    double energy(const std::string& bitstring) const {
        if (static_cast<int>(bitstring.size()) != num_qubits)
            throw std::invalid_argument("ising: bitstring length mismatch");
        return energy_of_index(bitstring_to_index(bitstring));
    }
};

// Substitutes x = (1 - z)/2 and collects terms.
inline IsingHamiltonian qubo_to_ising(const QuboProblem& q) {
    IsingHamiltonian h;
    h.num_qubits = q.num_vars;
    h.constant = q.offset;
    for (const auto& [i, c] : q.linear) {
        h.constant += c / 2.0;
        h.add_field(i, -c / 2.0);
    }
    for (const auto& [ij, c] : q.quadratic) {
        // x_i x_j = (1 - z_i - z_j + z_i z_j)/4
        h.constant += c / 4.0;
        h.add_field(ij.first, -c / 4.0);
        h.add_field(ij.second, -c / 4.0);
        h.add_coupling(ij.first, ij.second, c / 4.0);
    }
    h.compress();
    return h;
}

// Dense vector of all 2^N basis energies; entry k = energy of basis state k.
inline std::vector<double> diagonal_energies(const IsingHamiltonian& h) {
    if (h.num_qubits > qubit_cap())
        throw std::invalid_argument("diagonal_energies: " + std::to_string(h.num_qubits) +
                                    " qubits exceeds cap " + std::to_string(qubit_cap()));
    const std::uint64_t dim = 1ULL << h.num_qubits;
    std::vector<double> e(dim, h.constant);
    // One pass per term; each term touches every basis index with a sign pattern.
    for (const auto& [q, hq] : h.fields) {
        const std::uint64_t mask = 1ULL << q;
        for (std::uint64_t k = 0; k < dim; ++k) e[k] += (k & mask) ? -hq : hq;
    }
    for (const auto& [qr, j] : h.couplings) {
        const std::uint64_t mq = 1ULL << qr.first;
        const std::uint64_t mr = 1ULL << qr.second;
        for (std::uint64_t k = 0; k < dim; ++k) {
            const bool bq = (k & mq) != 0;
            const bool br = (k & mr) != 0;
            e[k] += (bq == br) ? j : -j;
        }
    }
    return e;
}

} // namespace qsched
