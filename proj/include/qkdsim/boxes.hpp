#pragma once

// Input/output device pairs ("boxes"). Alice's box takes one of three inputs,
// Bob's one of two; each box emits +1 or -1. Implementations cover honest
// quantum boxes (Born sampling of a shared state), Eve's deterministic local
// tables X1..X4, and the fixed product-state boxes she is reduced to when the
// measurement operators are known.

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qkdsim/quantum.hpp"
#include "qkdsim/rng.hpp"

namespace qkdsim {

enum class AliceInput : int { A0 = 0, A1 = 1, A2 = 2 };
enum class BobInput : int { B1 = 0, B2 = 1 };

inline constexpr std::array<AliceInput, 3> kAliceInputs{AliceInput::A0, AliceInput::A1,
                                                        AliceInput::A2};
inline constexpr std::array<BobInput, 2> kBobInputs{BobInput::B1, BobInput::B2};

enum class BoxKind {
    Honest,
    X1,
    X2,
    X3,
    X4,
    WernerNoisy,
    DDProductZero,  // |00>
    DDProductOne,   // |11>
};

enum class LocalBoxKind : int { X1 = 0, X2 = 1, X3 = 2, X4 = 3 };

/// A deterministic local box family member plus Eve's predetermined key bit.
struct LocalBoxSpec {
    LocalBoxKind kind = LocalBoxKind::X1;
    int a0 = +1;  // +1 or -1
};

class BoxPair {
public:
    virtual ~BoxPair() = default;
    BoxPair(const BoxPair&) = delete;
    BoxPair& operator=(const BoxPair&) = delete;

    virtual OutcomePair respond(AliceInput a_in, BobInput b_in, RandomStream& rng) const = 0;

    BoxKind kind() const noexcept { return kind_; }
    /// True when the outputs follow a fixed per-party table; such a box must
    /// respond deterministically.
    bool is_local() const noexcept { return is_local_; }

protected:
    BoxPair(BoxKind kind, bool is_local) noexcept : kind_(kind), is_local_(is_local) {}

private:
    BoxKind kind_;
    bool is_local_;
};

using BoxHandle = std::shared_ptr<const BoxPair>;

/// Deterministic box: each party's output depends only on that party's input.
class TableBox final : public BoxPair {
public:
    TableBox(BoxKind kind, std::array<int, 3> alice_out, std::array<int, 2> bob_out)
        : BoxPair(kind, true), alice_out_(alice_out), bob_out_(bob_out) {
        for (int v : alice_out_) check_sign(v);
        for (int v : bob_out_) check_sign(v);
    }

    OutcomePair respond(AliceInput a_in, BobInput b_in, RandomStream&) const override {
        return OutcomePair{alice_out_[static_cast<std::size_t>(a_in)],
                           bob_out_[static_cast<std::size_t>(b_in)]};
    }

    const std::array<int, 3>& alice_outputs() const noexcept { return alice_out_; }
    const std::array<int, 2>& bob_outputs() const noexcept { return bob_out_; }

private:
    static void check_sign(int v) {
        if (v != +1 && v != -1) throw std::invalid_argument("box outputs must be +1 or -1");
    }

    std::array<int, 3> alice_out_;
    std::array<int, 2> bob_out_;
};

/// Box realized by Born sampling of a fixed state with per-input observables.
/// The six joint outcome distributions are computed once at construction;
/// respond() is a single uniform draw against a cached cdf.
class QuantumBox final : public BoxPair {
public:
    QuantumBox(BoxKind kind, QuantumState state, std::array<Observable, 3> alice_obs,
               std::array<Observable, 2> bob_obs)
        : BoxPair(kind, false),
          state_(std::move(state)),
          alice_obs_(std::move(alice_obs)),
          bob_obs_(std::move(bob_obs)) {
        for (const AliceInput ai : kAliceInputs) {
            for (const BobInput bj : kBobInputs) {
                const auto probs = joint_outcome_distribution(
                    state_, alice_obs_[static_cast<std::size_t>(ai)],
                    bob_obs_[static_cast<std::size_t>(bj)]);
                auto& cdf = cdf_[pair_index(ai, bj)];
                cdf[0] = probs[0];
                cdf[1] = cdf[0] + probs[1];
                cdf[2] = cdf[1] + probs[2];
            }
        }
    }

    OutcomePair respond(AliceInput a_in, BobInput b_in, RandomStream& rng) const override {
        const auto& cdf = cdf_[pair_index(a_in, b_in)];
        const double u = rng.next_double();
        if (u < cdf[0]) return OutcomePair{+1, +1};
        if (u < cdf[1]) return OutcomePair{+1, -1};
        if (u < cdf[2]) return OutcomePair{-1, +1};
        return OutcomePair{-1, -1};
    }

    const QuantumState& state() const noexcept { return state_; }
    const Observable& alice_observable(AliceInput a) const noexcept {
        return alice_obs_[static_cast<std::size_t>(a)];
    }
    const Observable& bob_observable(BobInput b) const noexcept {
        return bob_obs_[static_cast<std::size_t>(b)];
    }

private:
    static std::size_t pair_index(AliceInput a, BobInput b) noexcept {
        return static_cast<std::size_t>(a) * 2 + static_cast<std::size_t>(b);
    }

    QuantumState state_;
    std::array<Observable, 3> alice_obs_;
    std::array<Observable, 2> bob_obs_;
    std::array<std::array<double, 3>, 6> cdf_{};
};

namespace detail {

// Output signs of (a1, a2, b1, b2) relative to a0 for each local box family.
//   X1: a0 =  a1 =  a2 = b1 =  b2
//   X2: a0 =  a1 = -a2 = b1 =  b2
//   X3: a0 =  a1 =  a2 = b1 = -b2
//   X4: a0 = -a1 =  a2 = b1 = -b2
inline constexpr std::array<std::array<int, 4>, 4> kLocalBoxSigns{{
    {+1, +1, +1, +1},
    {+1, -1, +1, +1},
    {+1, +1, +1, -1},
    {-1, +1, +1, -1},
}};

inline BoxKind to_box_kind(LocalBoxKind kind) {
    switch (kind) {
        case LocalBoxKind::X1: return BoxKind::X1;
        case LocalBoxKind::X2: return BoxKind::X2;
        case LocalBoxKind::X3: return BoxKind::X3;
        case LocalBoxKind::X4: return BoxKind::X4;
    }
    throw std::invalid_argument("unknown local box kind");
}

inline void check_a0(int a0) {
    if (a0 != +1 && a0 != -1) throw std::invalid_argument("a0 must be +1 or -1");
}

}  // namespace detail

/// Build the deterministic table box for a local family member.
inline BoxHandle local_box(LocalBoxSpec spec) {
    detail::check_a0(spec.a0);
    const auto& s = detail::kLocalBoxSigns[static_cast<std::size_t>(spec.kind)];
    return std::make_shared<TableBox>(
        detail::to_box_kind(spec.kind),
        std::array<int, 3>{spec.a0, s[0] * spec.a0, s[1] * spec.a0},
        std::array<int, 2>{s[2] * spec.a0, s[3] * spec.a0});
}

/// Honest box: measure the shared two-qubit state with the standard inputs.
inline BoxHandle honest_box(const QuantumState& state) {
    if (state.alice_qubits() != 1 || state.bob_qubits() != 1) {
        throw std::invalid_argument("honest boxes share one qubit per party");
    }
    auto obs = standard_observables();
    return std::make_shared<QuantumBox>(BoxKind::Honest, state, obs.alice, obs.bob);
}

/// Honest box over a Werner-noisy channel.
inline BoxHandle werner_box(double visibility) {
    auto obs = standard_observables();
    return std::make_shared<QuantumBox>(BoxKind::WernerNoisy, werner_state(visibility),
                                        obs.alice, obs.bob);
}

/// Eve's only deterministic-key option when the measurement operators are
/// fixed: the sigma_z eigenstate |00> (a0 = +1) or |11> (a0 = -1), still
/// measured with the standard observables.
inline BoxHandle dd_product_box(int a0) {
    detail::check_a0(a0);
    const int bit = a0 == +1 ? 0 : 1;
    auto obs = standard_observables();
    return std::make_shared<QuantumBox>(
        a0 == +1 ? BoxKind::DDProductZero : BoxKind::DDProductOne,
        computational_basis_state({bit, bit}, 1), obs.alice, obs.bob);
}

/// Per-cell outcome products <a_i b_j> of a deterministic box, exact.
/// Order: (1,1), (1,2), (2,1), (2,2).
inline std::array<int, 4> deterministic_correlators(const BoxPair& box) {
    if (!box.is_local()) {
        throw std::logic_error("deterministic correlators require a local box");
    }
    RandomStream dummy(0);
    std::array<int, 4> products{};
    std::size_t idx = 0;
    for (const AliceInput ai : {AliceInput::A1, AliceInput::A2}) {
        for (const BobInput bj : kBobInputs) {
            const OutcomePair out = box.respond(ai, bj, dummy);
            products[idx++] = out.a * out.b;
        }
    }
    return products;
}

/// CHSH value of a deterministic box by exact enumeration of the four test
/// input pairs. Always an even integer in [-4, 4]; at most 2 for any box
/// whose outputs factor into per-party tables.
inline int chsh_of_deterministic_box(const BoxPair& box) {
    const auto c = deterministic_correlators(box);
    return c[0] + c[1] + c[2] - c[3];
}

/// Exact correlators of a weighted mixture of deterministic boxes.
inline std::array<double, 4> mixture_correlators(
    const std::vector<std::pair<LocalBoxSpec, double>>& weighted) {
    double total = 0.0;
    for (const auto& [spec, weight] : weighted) {
        if (weight < 0.0) throw std::domain_error("mixture weights must be nonnegative");
        total += weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::domain_error("mixture weights must sum to 1");

    std::array<double, 4> correlators{};
    for (const auto& [spec, weight] : weighted) {
        const auto c = deterministic_correlators(*local_box(spec));
        for (std::size_t i = 0; i < 4; ++i) correlators[i] += weight * c[i];
    }
    return correlators;
}

/// Check the product-state realization of X1 or X2 against its table.
///
/// X1: |00> (or |11> for a0 = -1) with every input measured as sigma_z.
/// X2: Alice holds two qubits, Bob one, in |01>|0> for a0 = +1, with
///     A0 = A1 = sigma_z (x) I, A2 = I (x) sigma_z, B1 = B2 = sigma_z.
///     For a0 = -1 all three qubits are flipped (|10>|1>); the relation
///     b1 = b2 = a0 forces Bob's flip along with Alice's.
///
/// Samples the realization on all six input pairs and confirms both the
/// analytic point mass and the drawn outcomes match the deterministic table.
inline bool verify_local_realization(LocalBoxSpec spec) {
    detail::check_a0(spec.a0);
    if (spec.kind != LocalBoxKind::X1 && spec.kind != LocalBoxKind::X2) {
        throw std::invalid_argument("no product-state realization is defined for X3/X4");
    }

    const Matrix z = pauli_z();
    const Matrix id2 = Matrix::Identity(2, 2);
    const Observable zz = Observable::from_matrix(z);

    std::array<Observable, 3> alice_obs{zz, zz, zz};
    std::array<Observable, 2> bob_obs{zz, zz};
    std::optional<QuantumState> state;
    if (spec.kind == LocalBoxKind::X1) {
        const int bit = spec.a0 == +1 ? 0 : 1;
        state = computational_basis_state({bit, bit}, 1);
    } else {
        const Observable z_first = Observable::from_matrix(kron(z, id2));
        const Observable z_second = Observable::from_matrix(kron(id2, z));
        alice_obs = {z_first, z_first, z_second};
        state = spec.a0 == +1 ? computational_basis_state({0, 1, 0}, 2)
                              : computational_basis_state({1, 0, 1}, 2);
    }

    const QuantumBox realization(detail::to_box_kind(spec.kind), *state, alice_obs, bob_obs);
    const BoxHandle table = local_box(spec);

    RandomStream table_rng(0);
    RandomStream sample_rng(0x9d1f0c2b5aa7e3d4ULL);
    for (const AliceInput ai : kAliceInputs) {
        for (const BobInput bj : kBobInputs) {
            const OutcomePair want = table->respond(ai, bj, table_rng);
            const auto probs = joint_outcome_distribution(
                state, alice_obs[static_cast<std::size_t>(ai)],
                bob_obs[static_cast<std::size_t>(bj)]);
            const std::size_t want_index =
                static_cast<std::size_t>((want.a == +1 ? 0 : 2) + (want.b == +1 ? 0 : 1));
            if (probs[want_index] < 1.0 - 1e-9) return false;
            for (int draw = 0; draw < 16; ++draw) {
                const OutcomePair got = realization.respond(ai, bj, sample_rng);
                if (got.a != want.a || got.b != want.b) return false;
            }
        }
    }
    return true;
}

}  // namespace qkdsim
