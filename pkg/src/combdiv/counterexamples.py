"""The three counterexamples to contractivity of Choi divergences.

Example 1 is a pair of qubit channels and a superchannel under which their
Choi relative entropy grows.  Example 2 is a two-step process whose total
correlations grow under temporal coarse graining.  Example 3 uses the same
process and an IQI superprocess under which the non-Markovianity quantifier
grows.

Example 2 labels: A = I1, B = O1, C = I2, D = O2.
"""
from __future__ import annotations

import numpy as np

from .channel import (
    ChoiChannel,
    KrausChannel,
    Superchannel,
    choi_from_kraus,
    depolarizing_channel,
    identity_channel,
    kraus_channel,
    replacement_channel,
)
from .comb import ProcessComb, marginal_comb, process_comb
from .operators import (
    LabeledOperator,
    Subsystem,
    basis_projector,
    link,
    maximally_entangled,
    maximally_mixed,
    operator,
    permute,
    tensor,
)
from .superprocess import Superprocess, coarse_graining_superprocess, iqi_superprocess

QUBIT = 2


def _q(name: str) -> Subsystem:
    return Subsystem(name, QUBIT)


def _ket(i: int) -> np.ndarray:
    return np.eye(QUBIT)[:, [i]]


# -- Example 1 ---------------------------------------------------------------


def example1_m_kraus() -> KrausChannel:
    """M with Kraus operators sqrt(1/2)|0><0|, sqrt(1/2)|1><0| and |1><1|."""
    m1 = np.sqrt(0.5) * _ket(0) @ _ket(0).T
    m2 = np.sqrt(0.5) * _ket(1) @ _ket(0).T
    m3 = _ket(1) @ _ket(1).T
    return kraus_channel([m1, m2, m3], [_q("A")], [_q("B")])


def example1_m() -> ChoiChannel:
    return choi_from_kraus(example1_m_kraus())


def example1_n() -> ChoiChannel:
    """The completely depolarizing qubit channel."""
    return depolarizing_channel(_q("A"), _q("B"))


def example1_m_choi_closed_form() -> LabeledOperator:
    """(|00><00| + |01><01| + 2|11><11|) / 4 on A, B."""
    return operator(np.diag([0.25, 0.25, 0.0, 0.5]), [_q("A"), _q("B")])


def example1_superchannel() -> Superchannel:
    """Xi(E) = E o R with R the replacement channel preparing |1>."""
    pre = replacement_channel(_q("x"), basis_projector(_q("a"), 1))
    post = identity_channel(_q("b"), _q("y"))
    return Superchannel.pre_post(pre, post)


def induced_choi_map(ups: LabeledOperator, a: str = "A") -> LabeledOperator:
    """``I~_A x 2 <1|_A Y |1>_A``, the map Xi induces on Choi operators.

    Defined on any operator, which is how it can be fed non-positive inputs.
    """
    rest = [l for l in ups.labels if l != a]
    x = permute(ups, [a] + rest)
    r = x.side // QUBIT
    block = x.matrix.reshape(QUBIT, r, QUBIT, r)[1, :, 1, :]
    return operator(np.kron(np.eye(QUBIT) / QUBIT, QUBIT * block), x.subsystems)


def example1_q_operator() -> LabeledOperator:
    """Q = (2|1><1| - |0><0|)_A x I~_B: unit trace, but its image has trace 2."""
    return operator(np.kron(np.diag([-1.0, 2.0]), np.eye(QUBIT) / QUBIT), [_q("A"), _q("B")])


# -- Example 2 ---------------------------------------------------------------


def example2_comb() -> ProcessComb:
    """|0><0|_B x (|0><0|_C x Phi_AD + |1><1|_C x I~_A x I~_D) / 2."""
    a, b, c, d = _q("I1"), _q("O1"), _q("I2"), _q("O2")
    branch0 = tensor(basis_projector(c, 0), maximally_entangled(a, d))
    branch1 = tensor(basis_projector(c, 1), maximally_mixed(a), maximally_mixed(d))
    mixed = LabeledOperator(branch0.subsystems, (branch0.matrix + permute(branch1, branch0.labels).matrix) / 2)
    return process_comb(tensor(basis_projector(b, 0), mixed), 2)


def _swap() -> np.ndarray:
    return np.eye(4)[[0, 2, 1, 3]]


def example2_comb_from_circuit() -> ProcessComb:
    """Build the process from its circuit instead of writing the Choi state down.

    The environment holds a qubit e1 in |0> and a maximally mixed qubit e2.
    Step 1 swaps the system with e1, so the first output is |0> and e1 now
    stores the first input.  Step 2 dephases the system, swaps e1 and e2 if
    the system reads 1, then swaps the system with e1 and discards the
    environment.  The second output is therefore the stored first input when
    the second input is |0> and I~ when it is |1>.
    """
    env = tensor(basis_projector(_q("E0"), 0), maximally_mixed(_q("e2")))
    step1 = choi_from_kraus(kraus_channel([_swap()], [_q("I1"), _q("E0")], [_q("O1"), _q("E1")]))

    eye2 = np.eye(2)
    cswap = np.kron(np.diag([1.0, 0.0]), np.eye(4)) + np.kron(np.diag([0.0, 1.0]), _swap())
    swap_se = np.kron(_swap(), eye2)
    kraus = []
    for j in range(2):
        dephase = np.kron(np.outer(eye2[j], eye2[j]), np.eye(4))
        w = swap_se @ cswap @ dephase
        w = w.reshape(2, 4, 8)  # (system out, environment out), input
        kraus += [w[:, e, :] for e in range(4)]
    step2 = choi_from_kraus(kraus_channel(kraus, [_q("I2"), _q("E1"), _q("e2")], [_q("O2")]))
    return process_comb(link(link(env, step1.choi), step2.choi), 2)


def example2_marginal() -> ProcessComb:
    return marginal_comb(example2_comb())


def example2_perturbed() -> LabeledOperator:
    """Phi_AC x I~_BD: positive, unit trace, but signals from the future."""
    a, b, c, d = _q("I1"), _q("O1"), _q("I2"), _q("O2")
    x = tensor(maximally_entangled(a, c), maximally_mixed(b), maximally_mixed(d))
    return permute(x, ["I1", "O1", "I2", "O2"])


def coarse_graining() -> Superprocess:
    """G: an identity channel wired from the first output into the second input."""
    return coarse_graining_superprocess(2, 1, QUBIT)


def identity_choi(a: str = "I1", b: str = "O1") -> LabeledOperator:
    return maximally_entangled(_q(a), _q(b))


# -- Example 3 ---------------------------------------------------------------


def example3_superprocess(literal: bool = False) -> Superprocess:
    """IQI superprocess preparing |0> into the second input.

    Taken literally, that leaves the first output at |0><0|, so the image of
    Example 2's process is Phi_AD x |0><0|_B x I~_C.  The default also
    depolarizes the first output, which gives Phi_AD x I~_BC.  N of the image
    is 2 either way.
    """
    id_pre = identity_channel(_q("x"), _q("a"))
    id_post = identity_channel(_q("b"), _q("y"))
    first_post = id_post if literal else depolarizing_channel(_q("b"), _q("y"))
    tooth1 = Superchannel.pre_post(id_pre, first_post)
    tooth2 = Superchannel.pre_post(replacement_channel(_q("x"), basis_projector(_q("a"), 0)), id_post)
    return iqi_superprocess([tooth1, tooth2])


def example3_image(literal: bool = False) -> LabeledOperator:
    """Closed form of the superprocess image of Example 2's process."""
    a, b, c, d = _q("I1"), _q("O1"), _q("I2"), _q("O2")
    out_b = basis_projector(b, 0) if literal else maximally_mixed(b)
    x = tensor(maximally_entangled(a, d), out_b, maximally_mixed(c))
    return permute(x, ["I1", "O1", "I2", "O2"])
