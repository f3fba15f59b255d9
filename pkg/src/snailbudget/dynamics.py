"""Worst-case target + spectator gate dynamics under amplitude damping.

Density matrices are column-stacked, ``vec(A rho B) = (B^T x A) vec(rho)``,
so the superoperator of ``rho -> U rho U^dagger`` is ``conj(U) x U``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .operators import HilbertSpace, dag, embed, annihilation, expm, hs_inner, lowering_ops
from .params import GateKind, SpectatorModel, to_angular

QUBITS4 = HilbertSpace((2, 2, 2, 2))
LN2 = math.log(2.0)


@dataclass(frozen=True)
class LindbladModel:
    hamiltonian: np.ndarray  # rad/s
    collapse_rates: tuple  # 1/s per mode
    space: HilbertSpace
    t_f: float

    def liouvillian(self):
        return build_liouvillian(self.hamiltonian, self.collapse_rates, self.space)


@dataclass(frozen=True)
class GateResult:
    channel: np.ndarray
    avg_fidelity: float
    t_f: float
    eta: float
    delta2: float


def target_rate(eta, g3_over_2pi, lam):
    """Angular rate of the resonant conversion term, ``6 |eta| g3 lambda^2``."""
    return 6.0 * abs(eta) * to_angular(g3_over_2pi) * lam**2


def gate_duration(rate, theta):
    if not rate > 0:
        raise ValueError("gate rate must be positive")
    return theta / rate


def spectator_rate(rate, delta2, t_f, model=SpectatorModel.ANGLE_MATCHED):
    """Static rate of the worst-case spectator conversion term.

    ``ANGLE_MATCHED`` picks the rate whose angle accumulated over ``t_f``
    equals the detuned bound ``2 rate / (2 pi delta2)`` widened by ``1/ln 2``
    for crowding from both sides. ``LITERAL`` applies the prefactor
    ``2 / (delta2[MHz] ln 2)`` to ``rate`` as a bare number.
    """
    if not delta2 > 0:
        raise ValueError("conversion separation must be positive")
    model = SpectatorModel(model)
    if model is SpectatorModel.OFF:
        return 0.0
    if model is SpectatorModel.LITERAL:
        return rate * 2.0 / ((delta2 / 1e6) * LN2)
    if not t_f > 0:
        raise ValueError("gate duration must be positive")
    return 2.0 * rate / (to_angular(delta2) * LN2 * t_f)


def _conversion(space, i, j):
    qi = embed(annihilation(space.mode_dims[i]), i, space)
    qj = embed(annihilation(space.mode_dims[j]), j, space)
    term = dag(qi) @ qj
    return term + dag(term)


def build_hamiltonian(rate, spec_rate, space=QUBITS4):
    """``rate (q0^dag q1 + h.c.) + spec_rate (q2^dag q3 + h.c.)``."""
    if tuple(space.mode_dims) != (2, 2, 2, 2):
        raise ValueError("the target+spectator model needs four two-level modes")
    return rate * _conversion(space, 0, 1) + spec_rate * _conversion(space, 2, 3)


def build_liouvillian(H, collapse_rates, space=QUBITS4):
    H = np.asarray(H, dtype=complex)
    d = space.total_dim
    if H.shape != (d, d):
        raise ValueError(f"Hamiltonian shape {H.shape} does not match dimension {d}")
    if len(collapse_rates) != space.n_modes:
        raise ValueError("need one collapse rate per mode")
    ident = np.eye(d, dtype=complex)
    L = -1j * (np.kron(ident, H) - np.kron(H.T, ident))
    for gamma, q in zip(collapse_rates, lowering_ops(space)):
        if gamma < 0:
            raise ValueError("collapse rates must be non-negative")
        if gamma == 0:
            continue
        qdq = dag(q) @ q
        L += gamma * (np.kron(q.conj(), q) - 0.5 * np.kron(ident, qdq) - 0.5 * np.kron(qdq.T, ident))
    return L


def evolve(L, t):
    """Channel after time ``t`` under the static generator ``L``."""
    if t < 0:
        raise ValueError("time must be non-negative")
    return expm(L * t)


def rk4_step_matrix(L, h):
    """One classical RK4 step of ``x' = L x`` written as a matrix polynomial."""
    X = h * np.asarray(L)
    ident = np.eye(X.shape[0], dtype=X.dtype)
    X2 = X @ X
    return ident + X + X2 / 2.0 + X2 @ X / 6.0 + X2 @ X2 / 24.0


def rk4_propagate(L, t, steps=2**14):
    """Propagator of ``steps`` fixed RK4 steps of size ``t/steps``.

    For a constant generator every step applies the same matrix, so the
    product is formed by binary powering.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    P = rk4_step_matrix(L, t / steps)
    result = None
    while steps:
        if steps & 1:
            result = P if result is None else result @ P
        steps >>= 1
        if steps:
            P = P @ P
    return result


def unitary_superop(U):
    U = np.asarray(U)
    return np.kron(U.conj(), U)


def apply_channel(channel, rho):
    d = rho.shape[0]
    return (channel @ rho.reshape(-1, order="F")).reshape((d, d), order="F")


def choi_matrix(channel):
    """``sum_kl E(|k><l|) x |k><l|`` for a column-stacked superoperator."""
    d = math.isqrt(channel.shape[0])
    S4 = np.asarray(channel).reshape(d, d, d, d)  # [b_out, a_out, b_in, a_in]
    return S4.transpose(1, 3, 0, 2).reshape(d * d, d * d)


def trace_preservation_error(channel):
    d = math.isqrt(channel.shape[0])
    vec_id = np.eye(d).reshape(-1, order="F")
    return float(np.max(np.abs(vec_id @ channel - vec_id)))


def choi_min_eigenvalue(channel):
    J = choi_matrix(channel)
    return float(np.linalg.eigvalsh(0.5 * (J + dag(J)))[0])


def ideal_gate(kind, pair=(0, 1), space=QUBITS4):
    """``expm(-i theta (q_a^dag q_b + h.c.))`` on ``pair``, identity elsewhere."""
    if tuple(pair) != (0, 1):
        raise ValueError("the target pair is modes (0, 1)")
    theta = math.pi / 2 if GateKind(kind) is GateKind.ISWAP else math.pi / 4
    return expm(-1j * theta * _conversion(space, *pair))


def average_gate_fidelity(channel, U, dim=16):
    U = np.asarray(U)
    if U.shape != (dim, dim) or channel.shape != (dim * dim, dim * dim):
        raise ValueError("channel/unitary dimensions do not match dim")
    f_pro = hs_inner(unitary_superop(U), channel) / dim**2
    return (dim * f_pro.real + 1.0) / (dim + 1.0)


def _four_mode_t1(device):
    t1 = list(device.t1_per_qubit)[:4]
    while len(t1) < 4:
        t1.append(t1[-1])
    return t1


def build_model(config, eta, delta2, spectator_model=None):
    dev = config.device
    model = config.spectator_model if spectator_model is None else SpectatorModel(spectator_model)
    rate = target_rate(eta, dev.g3_over_2pi, dev.lam)
    t_f = gate_duration(rate, config.gate.theta)
    spec_rate = spectator_rate(rate, delta2, t_f, model)
    H = build_hamiltonian(rate, spec_rate, QUBITS4)
    rates = tuple(0.0 if math.isinf(t) else 1.0 / t for t in _four_mode_t1(dev))
    return LindbladModel(H, rates, QUBITS4, t_f)


def simulate_gate(config, eta, delta2, spectator_model=None):
    """Noisy channel and average gate fidelity at pump amplitude ``eta`` and separation ``delta2`` (Hz)."""
    if not eta > 0:
        raise ValueError("eta must be positive")
    lm = build_model(config, eta, delta2, spectator_model)
    channel = evolve(lm.liouvillian(), lm.t_f)
    U = ideal_gate(config.gate.kind, (0, 1), QUBITS4)
    F = average_gate_fidelity(channel, U, QUBITS4.total_dim)
    return GateResult(channel, float(min(max(F, 0.0), 1.0)), lm.t_f, float(eta), float(delta2))
