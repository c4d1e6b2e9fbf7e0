#pragma once

// Shared fixtures: Pauli matrices, tensor products, qubit and two-qubit
// reference systems.

#include <memory>

#include "qf/hilbert.hpp"

namespace qf::fixtures {

inline num::Matrix pauli_x() {
    num::Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline num::Matrix pauli_y() {
    num::Matrix m(2, 2);
    m << num::Complex(0, 0), num::Complex(0, -1), num::Complex(0, 1), num::Complex(0, 0);
    return m;
}

inline num::Matrix pauli_z() {
    num::Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline num::Matrix kron(const num::Matrix& a, const num::Matrix& b) {
    num::Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline num::CVector ket(std::initializer_list<num::Complex> amps) {
    num::CVector v(static_cast<int>(amps.size()));
    int i = 0;
    for (auto a : amps) v(i++) = a;
    return v / v.norm();
}

inline num::CVector bell_phi_plus() {
    return ket({1, 0, 0, 1});
}

/// Qubit system: sigma_z, sigma_x, the |0><0| state.
inline std::shared_ptr<HilbertSystem> qubit_system() {
    std::vector<HermitianObservable> obs;
    obs.emplace_back("sz", pauli_z());
    obs.emplace_back("sx", pauli_x());
    std::vector<std::pair<std::string, num::Matrix>> states;
    states.emplace_back("zero", pure_state_matrix(ket({1, 0})));
    return std::make_shared<HilbertSystem>(2, std::move(obs), std::move(states));
}

/// Two-qubit system with local Z/X observables, a nondegenerate witness
/// Z(x)I + 3 I(x)Z (spectrum {-4,-2,2,4}) and the Bell state.
inline std::shared_ptr<HilbertSystem> two_qubit_system() {
    const num::Matrix i2 = num::Matrix::Identity(2, 2);
    std::vector<HermitianObservable> obs;
    obs.emplace_back("zi", kron(pauli_z(), i2));
    obs.emplace_back("iz", kron(i2, pauli_z()));
    obs.emplace_back("xi", kron(pauli_x(), i2));
    obs.emplace_back("ix", kron(i2, pauli_x()));
    obs.emplace_back("witness", kron(pauli_z(), i2) + 3.0 * kron(i2, pauli_z()));
    std::vector<std::pair<std::string, num::Matrix>> states;
    states.emplace_back("bell", pure_state_matrix(bell_phi_plus()));
    return std::make_shared<HilbertSystem>(4, std::move(obs), std::move(states));
}

}  // namespace qf::fixtures
