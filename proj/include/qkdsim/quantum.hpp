#pragma once

// Exact finite-dimensional quantum kernel for two- and three-qubit systems:
// density matrices, +/-1-valued projective observables, analytic expectation
// values, and Born-rule sampling of joint outcomes. Everything is immutable
// after construction and safe to share across threads.
//
// Tolerance policy: structural checks (trace, Hermiticity) at 1e-12, derived
// quantities (spectra, expectations) at 1e-10. Monte Carlo assertions live in
// the test suites at five standard errors.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qkdsim/rng.hpp"

namespace qkdsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kStructuralTol = 1e-12;
inline constexpr double kDerivedTol = 1e-10;

/// Maximal CHSH value reachable by quantum statistics, 2*sqrt(2).
inline constexpr double kTsirelsonBound = 2.0 * std::numbers::sqrt2;
inline constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

/// One joint measurement outcome; both entries are +1 or -1.
struct OutcomePair {
    int a = +1;
    int b = +1;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

/// Density matrix of a bipartite register. The leading tensor factors belong
/// to Alice, the trailing ones to Bob; total size is two or three qubits.
class QuantumState {
public:
    static QuantumState from_density(Matrix rho, int alice_qubits, int bob_qubits) {
        if (alice_qubits < 1 || bob_qubits < 1) {
            throw std::invalid_argument("each party needs at least one qubit");
        }
        const int total = alice_qubits + bob_qubits;
        if (total < 2 || total > 3) {
            throw std::invalid_argument("supported registers have two or three qubits");
        }
        const Eigen::Index dim = Eigen::Index{1} << total;
        if (rho.rows() != dim || rho.cols() != dim) {
            throw std::invalid_argument("density matrix size does not match the qubit count");
        }
        if (std::abs(rho.trace() - Complex(1.0)) > kStructuralTol) {
            throw std::invalid_argument("density matrix must have unit trace");
        }
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStructuralTol) {
            throw std::invalid_argument("density matrix must be Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kDerivedTol) {
            throw std::invalid_argument("density matrix must be positive semidefinite");
        }
        return QuantumState(std::move(rho), alice_qubits, bob_qubits);
    }

    const Matrix& density() const noexcept { return rho_; }
    int alice_qubits() const noexcept { return alice_qubits_; }
    int bob_qubits() const noexcept { return bob_qubits_; }
    Eigen::Index alice_dim() const noexcept { return Eigen::Index{1} << alice_qubits_; }
    Eigen::Index bob_dim() const noexcept { return Eigen::Index{1} << bob_qubits_; }

    double purity() const { return (rho_ * rho_).trace().real(); }

private:
    QuantumState(Matrix rho, int alice_qubits, int bob_qubits)
        : rho_(std::move(rho)), alice_qubits_(alice_qubits), bob_qubits_(bob_qubits) {}

    Matrix rho_;
    int alice_qubits_;
    int bob_qubits_;
};

/// Hermitian operator with spectrum {+1, -1}. The two eigenprojectors are
/// computed once at construction; sampling only ever touches the projectors.
class Observable {
public:
    static Observable from_matrix(const Matrix& m) {
        if (m.rows() != m.cols() || m.rows() < 2) {
            throw std::invalid_argument("observable must be a square matrix");
        }
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kStructuralTol) {
            throw std::invalid_argument("observable must be Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
        bool has_plus = false;
        bool has_minus = false;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const double ev = es.eigenvalues()[i];
            if (std::abs(ev - 1.0) <= kDerivedTol) {
                has_plus = true;
            } else if (std::abs(ev + 1.0) <= kDerivedTol) {
                has_minus = true;
            } else {
                throw std::invalid_argument("observable eigenvalues must be +1 or -1");
            }
        }
        if (!has_plus || !has_minus) {
            throw std::invalid_argument("observable must have both +1 and -1 outcomes");
        }
        const Matrix id = Matrix::Identity(m.rows(), m.cols());
        return Observable(m, (id + m) / 2.0, (id - m) / 2.0);
    }

    const Matrix& matrix() const noexcept { return m_; }
    const Matrix& projector_plus() const noexcept { return proj_plus_; }
    const Matrix& projector_minus() const noexcept { return proj_minus_; }
    const Matrix& projector(int outcome) const noexcept {
        return outcome == +1 ? proj_plus_ : proj_minus_;
    }
    Eigen::Index dim() const noexcept { return m_.rows(); }

private:
    Observable(Matrix m, Matrix pp, Matrix pm)
        : m_(std::move(m)), proj_plus_(std::move(pp)), proj_minus_(std::move(pm)) {}

    Matrix m_;
    Matrix proj_plus_;
    Matrix proj_minus_;
};

/// Alice's three inputs and Bob's two, as measurement operators.
struct ObservableSet {
    std::array<Observable, 3> alice;  // A0, A1, A2
    std::array<Observable, 2> bob;    // B1, B2
};

/// A0 = sigma_z, A1 = (sigma_z + sigma_x)/sqrt2, A2 = (sigma_z - sigma_x)/sqrt2,
/// B1 = sigma_z, B2 = sigma_x.
inline ObservableSet standard_observables() {
    const Matrix z = pauli_z();
    const Matrix x = pauli_x();
    return ObservableSet{
        {Observable::from_matrix(z),
         Observable::from_matrix((z + x) / std::numbers::sqrt2),
         Observable::from_matrix((z - x) / std::numbers::sqrt2)},
        {Observable::from_matrix(z), Observable::from_matrix(x)}};
}

/// (|00> + |11>)/sqrt2 as a rank-1 density matrix.
inline QuantumState bell_phi_plus() {
    Eigen::VectorXcd v(4);
    v << 1, 0, 0, 1;
    v /= std::numbers::sqrt2;
    return QuantumState::from_density(v * v.adjoint(), 1, 1);
}

/// visibility * |phi+><phi+| + (1 - visibility) * I/4.
inline QuantumState werner_state(double visibility) {
    if (!(visibility >= 0.0 && visibility <= 1.0)) {
        throw std::domain_error("visibility must lie in [0, 1]");
    }
    const Matrix rho = visibility * bell_phi_plus().density() +
                       ((1.0 - visibility) / 4.0) * Matrix::Identity(4, 4);
    return QuantumState::from_density(rho, 1, 1);
}

/// |b0 b1 (b2)> as a density matrix; bits are listed first-factor-first.
inline QuantumState computational_basis_state(const std::vector<int>& bits, int alice_qubits) {
    const int n = static_cast<int>(bits.size());
    Eigen::Index index = 0;
    for (int bit : bits) {
        if (bit != 0 && bit != 1) throw std::invalid_argument("basis bits must be 0 or 1");
        index = (index << 1) | bit;
    }
    const Eigen::Index dim = Eigen::Index{1} << n;
    Matrix rho = Matrix::Zero(dim, dim);
    rho(index, index) = 1.0;
    return QuantumState::from_density(std::move(rho), alice_qubits, n - alice_qubits);
}

/// Tr(rho (A (x) B)). The result of a valid call is real.
inline double expectation(const QuantumState& state, const Observable& obs_a,
                          const Observable& obs_b) {
    if (obs_a.dim() != state.alice_dim() || obs_b.dim() != state.bob_dim()) {
        throw std::invalid_argument("observable dimensions do not match the state partition");
    }
    const Complex value = (state.density() * kron(obs_a.matrix(), obs_b.matrix())).trace();
    if (std::abs(value.imag()) > kDerivedTol) {
        throw std::logic_error("expectation value has a non-negligible imaginary part");
    }
    return value.real();
}

/// Joint Born probabilities for outcomes (+,+), (+,-), (-,+), (-,-).
inline std::array<double, 4> joint_outcome_distribution(const QuantumState& state,
                                                        const Observable& obs_a,
                                                        const Observable& obs_b) {
    if (obs_a.dim() != state.alice_dim() || obs_b.dim() != state.bob_dim()) {
        throw std::invalid_argument("observable dimensions do not match the state partition");
    }
    std::array<double, 4> probs{};
    for (int ia = 0; ia < 2; ++ia) {
        const Matrix& pa = ia == 0 ? obs_a.projector_plus() : obs_a.projector_minus();
        for (int ib = 0; ib < 2; ++ib) {
            const Matrix& pb = ib == 0 ? obs_b.projector_plus() : obs_b.projector_minus();
            double p = (state.density() * kron(pa, pb)).trace().real();
            if (p < 0.0) {
                if (p < -kDerivedTol) throw std::logic_error("negative outcome probability");
                p = 0.0;
            }
            probs[static_cast<std::size_t>(ia * 2 + ib)] = p;
        }
    }
    return probs;
}

/// Draw one joint outcome from the Born distribution.
inline OutcomePair sample_outcomes(const QuantumState& state, const Observable& obs_a,
                                   const Observable& obs_b, RandomStream& rng) {
    const auto probs = joint_outcome_distribution(state, obs_a, obs_b);
    const double u = rng.next_double();
    double cumulative = 0.0;
    int index = 3;
    for (int k = 0; k < 3; ++k) {
        cumulative += probs[static_cast<std::size_t>(k)];
        if (u < cumulative) {
            index = k;
            break;
        }
    }
    return OutcomePair{index < 2 ? +1 : -1, index % 2 == 0 ? +1 : -1};
}

/// <A1 B1> + <A1 B2> + <A2 B1> - <A2 B2> evaluated analytically.
inline double chsh_analytic(const QuantumState& state, const ObservableSet& obs) {
    return expectation(state, obs.alice[1], obs.bob[0]) +
           expectation(state, obs.alice[1], obs.bob[1]) +
           expectation(state, obs.alice[2], obs.bob[0]) -
           expectation(state, obs.alice[2], obs.bob[1]);
}

}  // namespace qkdsim
