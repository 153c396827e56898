#pragma once

#include "dicke/fock.hpp"

namespace dicke {

/// Independent amplitude damping of both modes: every particle is lost with
/// probability eta. Kraus operators <n-k|A_k|n> = sqrt(C(n,k) eta^k (1-eta)^(n-k))
/// act on each mode; outputs are grouped by the remaining particle number.
/// Sectors whose weight is exactly zero are dropped.
SectoredState loss_channel(const SectoredState& state, double eta);

/// Closed-form Dicke squeezing of an N-particle Dicke state after every
/// qubit is fully dephased with probability p: 1 / (N(1-p) + 2 - p^2).
double dephased_dicke_xi(int particles, double p);

/// Brute-force evaluation on the 2^N qubit space. Applies
/// rho -> (1-p) rho + p (P_a rho P_a + P_b rho P_b) to every qubit of the
/// N-qubit Dicke state and evaluates N(<dJz^2> + 1/4) / <Jx^2 + Jy^2>.
/// The density matrix is held once as a 4^N complex vector (16 MiB at N = 10,
/// 256 MiB at N = 12). Throws ResourceLimit above N = 12.
double dephasing_qubit_oracle(int particles, double p);

inline constexpr int kMaxOracleQubits = 12;

}  // namespace dicke
