"""Power waves and scattering matrices, used to audit power flow in the circuits."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .matching import FrontEndReduction, TwoPortBlocks


@dataclass(frozen=True)
class PortState:
    """Voltage, current (flowing into the port) and reference impedance; scalars or arrays."""

    v: complex
    i: complex
    z_ref: complex

    def __post_init__(self):
        if np.any(np.real(np.asarray(self.z_ref)) <= 0):
            raise DomainError("reference impedance needs a positive real part")


def power_waves(state: PortState):
    """Incident and reflected power waves (a, b)."""
    v, i, z = (np.asarray(x) for x in (state.v, state.i, state.z_ref))
    scale = 2 * np.sqrt(np.real(z))
    return (v + z * i) / scale, (v - np.conj(z) * i) / scale


def delivered_power(v, i):
    """Re(v^H i): total power flowing into the ports."""
    return float(np.real(np.vdot(v, i)))


def s_from_z(Z, z_refs):
    """Scattering matrix of an impedance matrix for per-port reference impedances."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    z_refs = np.broadcast_to(np.asarray(z_refs, dtype=complex), (Z.shape[0],))
    if np.any(np.real(z_refs) <= 0):
        raise DomainError("reference impedances need a positive real part")
    G = np.diag(z_refs)
    f = 1 / (2 * np.sqrt(np.real(z_refs)))
    try:
        # (Z - G*)(Z + G)^{-1} through a transposed solve
        core = np.linalg.solve((Z + G).T, (Z - G.conj()).T).T
    except np.linalg.LinAlgError:
        raise NumericalError("scattering.s_from_z", "Z + G is singular") from None
    return f[:, None] * core / f[None, :]


@dataclass(frozen=True)
class ReceiveChainState:
    """Solved receive circuit: loads | matching network | antennas.

    Currents flow into the matching network; ``i_load = -i1`` flows into the loads.
    """

    v1: np.ndarray
    i1: np.ndarray
    v2: np.ndarray
    i2: np.ndarray
    z_load: complex

    @property
    def v_load(self):
        return self.v1

    @property
    def i_load(self):
        return -self.i1


def solve_receive_chain(blocks: TwoPortBlocks | None, Z_A, z_load, v_oc) -> ReceiveChainState:
    """Solve the full receive circuit for open-circuit antenna voltages ``v_oc``.

    Without a matching network the loads sit directly on the antenna ports.
    """
    Z_A = np.atleast_2d(np.asarray(Z_A, dtype=complex))
    v_oc = np.asarray(v_oc, dtype=complex)
    n = Z_A.shape[0]
    eye = np.eye(n)
    if blocks is None:
        # a through connection has no impedance description; solve directly
        i_a = np.linalg.solve(Z_A + z_load * eye, v_oc)
        v = v_oc - Z_A @ i_a
        return ReceiveChainState(v, -i_a, v, i_a, z_load)
    system = np.block([[blocks.Z11 + z_load * eye, blocks.Z12],
                       [blocks.Z21, blocks.Z22 + Z_A]])
    rhs = np.concatenate([np.zeros(n, complex), v_oc])
    try:
        x = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        raise NumericalError("scattering.solve_receive_chain", "circuit is singular") from None
    i1, i2 = x[:n], x[n:]
    v1 = blocks.Z11 @ i1 + blocks.Z12 @ i2
    v2 = blocks.Z21 @ i1 + blocks.Z22 @ i2
    return ReceiveChainState(v1, i1, v2, i2, z_load)


def load_power_audit(state: ReceiveChainState):
    """Power into the loads from v/i and from power waves referenced to Z_L."""
    circuit = delivered_power(state.v_load, state.i_load)
    a, b = power_waves(PortState(state.v_load, state.i_load, state.z_load))
    waves = float(np.vdot(a, a).real - np.vdot(b, b).real)
    return circuit, waves


def reduction_load_voltage(rx: FrontEndReduction, v_oc):
    """Load voltages predicted by the reduced model, Q F_R v_OC."""
    return rx.Q @ (rx.F @ np.asarray(v_oc))
