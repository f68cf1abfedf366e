"""Two-node LOCC simulation of the nonlocal QND sum gate.

A protocol is scripted as a sequence of node-local actions on a
:class:`Circuit`.  The circuit keeps a Heisenberg tableau: every live
quadrature is a linear combination of the *initial* independent quadratures
(inputs, resource squeezed vacua, loss ancillas) plus a linear combination of
the classical measurement outcomes fed forward so far.  Keeping the resource
squeezed vacua as initial columns means that anti-squeezed noise cancels in
the coefficients, never in large covariance entries, so ``r = 20`` is as
well conditioned as ``r = 0``.

Two evaluation modes are supported:

* ``analytic`` substitutes every outcome by the quadrature it measured and
  returns exact output moments;
* ``montecarlo`` samples outcomes trajectory by trajectory, feeds them
  forward as classical displacements, and samples the output quadratures
  from the conditional Gaussian (see :mod:`qndsim.kernels`).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import gaussian as g
from .conventions import SNL, quadrature_row
from .entanglement import log_negativity
from .kernels import feedforward_trajectories, sample_moments

ALICE, BOB, SOURCE = "Alice", "Bob", "source"
CHUNK = 8192  # trajectories per RNG substream
PATHS = ("epr_alice", "epr_bob", "out_alpha", "out_beta")


class LocalityViolation(RuntimeError):
    """A node touched a mode or a classical record it does not hold."""


@dataclass(frozen=True)
class ImperfectionConfig:
    """Loss budget of the optical paths.

    ``eta_paths`` are transmissivities of the four paths named in
    :data:`PATHS`: the two EPR halves on their way to the coupling
    beamsplitters and the two gate outputs on their way to the verifying
    detectors.  Every homodyne detector additionally has efficiency
    ``detector_eff * visibility**2``.
    """

    eta_paths: tuple = (1.0, 1.0, 1.0, 1.0)
    detector_eff: float = 1.0
    visibility: float = 1.0

    def __post_init__(self):
        etas = tuple(float(e) for e in self.eta_paths)
        if len(etas) != len(PATHS):
            raise ValueError(f"eta_paths needs {len(PATHS)} entries {PATHS}, got {len(etas)}")
        for name, val in zip(PATHS + ("detector_eff", "visibility"), etas + (self.detector_eff, self.visibility)):
            if not 0.0 < val <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {val}")
        object.__setattr__(self, "eta_paths", etas)

    @property
    def homodyne_efficiency(self):
        return self.detector_eff * self.visibility**2

    @property
    def is_ideal(self):
        return all(e == 1.0 for e in self.eta_paths) and self.homodyne_efficiency == 1.0

    def to_dict(self):
        return {"eta_paths": list(self.eta_paths), "detector_eff": self.detector_eff, "visibility": self.visibility}

    @classmethod
    def from_dict(cls, data):
        return cls(
            tuple(data.get("eta_paths", (1.0,) * 4)),
            float(data.get("detector_eff", 1.0)),
            float(data.get("visibility", 1.0)),
        )


@dataclass(frozen=True)
class ResourceLedger:
    epr_pairs_consumed: int
    classical_reals_sent: int
    communication_rounds: int

    def as_tuple(self):
        return (self.epr_pairs_consumed, self.classical_reals_sent, self.communication_rounds)

    def to_dict(self):
        return {
            "epr_pairs_consumed": self.epr_pairs_consumed,
            "classical_reals_sent": self.classical_reals_sent,
            "communication_rounds": self.communication_rounds,
        }


@dataclass(frozen=True)
class NoiseVector:
    """Variance added by the finite resource to ``(x_a, p_a, x_b, p_b)``."""

    r: float

    @property
    def variances(self):
        v = np.exp(-2 * self.r) * SNL
        return np.array([0.0, v, v, 0.0])

    @property
    def qnd_variances(self):
        """The same noise after the local squeezers are undone (twice as large)."""
        return 2.0 * self.variances


@dataclass
class HomodyneRecord:
    """A classical message: which quadrature of which mode a node measured."""

    index: int
    label: str
    node: str
    mode: int
    quadrature: str
    calibration: float = 1.0
    depth: int = 0  # rounds of communication the outcome causally depends on


@dataclass
class ClassicalChannel:
    source: str
    dest: str
    latency: int = 1
    log: list = field(default_factory=list)

    @property
    def direction(self):
        return f"{self.source}->{self.dest}"


class Node:
    """One party.  All of its actions go through the shared circuit, which checks ownership."""

    def __init__(self, circuit, name):
        self.circuit = circuit
        self.name = name
        self.modes = set()
        self.inbox = {}  # record index -> (record, causal depth on arrival)
        self.local_records = {}

    def __repr__(self):
        return f"Node({self.name!r}, modes={sorted(self.modes)})"

    def apply(self, transform):
        self.circuit.apply(self, transform)

    def loss(self, mode, eta):
        self.circuit.loss(self, mode, eta)

    def measure(self, mode, quadrature, label, efficiency=1.0):
        return self.circuit.measure(self, mode, quadrature, label, efficiency)

    def send(self, record, channel):
        if record.index not in self.local_records:
            raise LocalityViolation(f"{self.name} cannot send record {record.label!r} it did not measure")
        if channel.source != self.name:
            raise LocalityViolation(f"{self.name} cannot send on channel {channel.direction}")
        depth = record.depth + 1
        channel.log.append({"label": record.label, "round": depth, "arrival_tick": depth * channel.latency})
        self.circuit.nodes[channel.dest].inbox[record.index] = (record, depth)
        self.circuit.audit.append((self.name, "send", record.label, channel.dest))

    def displace(self, mode, quadrature, gain, record):
        if record.index in self.local_records:
            depth = record.depth
        elif record.index in self.inbox:
            depth = self.inbox[record.index][1]
        else:
            raise LocalityViolation(f"{self.name} has not received record {record.label!r}")
        self.circuit.feed_forward(self, mode, quadrature, gain * record.calibration, record, depth)


class Circuit:
    """Heisenberg tableau over node-owned modes."""

    def __init__(self, num_modes):
        self.num_modes = num_modes
        self.nodes = {}
        self.owner = [None] * num_modes
        self.mode_depth = [0] * num_modes
        self.measured = set()
        self.mu0 = np.zeros(0)
        self.cov0 = np.zeros((0, 0))
        self.rows = np.zeros((2 * num_modes, 0))
        self.offsets = np.zeros(2 * num_modes)
        self.ff = np.zeros((2 * num_modes, 0))
        self.records = []
        self.q_rows = np.zeros((0, 0))
        self.q_offsets = np.zeros(0)
        self.q_ff = np.zeros((0, 0))
        self.audit = []
        self.channels = []

    # ------------------------------------------------------------ setup

    def node(self, name):
        if name not in self.nodes:
            self.nodes[name] = Node(self, name)
        return self.nodes[name]

    def _add_columns(self, mean, cov):
        d0, d = self.mu0.size, len(mean)
        self.mu0 = np.concatenate([self.mu0, mean])
        big = np.zeros((d0 + d, d0 + d))
        big[:d0, :d0] = self.cov0
        big[d0:, d0:] = cov
        self.cov0 = big
        self.rows = np.hstack([self.rows, np.zeros((self.rows.shape[0], d))])
        self.q_rows = np.hstack([self.q_rows, np.zeros((self.q_rows.shape[0], d))])
        return d0

    def prepare(self, st, modes, owners):
        """Place ``st`` on circuit ``modes``; ``owners`` is one node name or one per mode."""
        if st.num_modes != len(modes):
            raise ValueError(f"state has {st.num_modes} modes, {len(modes)} slots given")
        if isinstance(owners, str):
            owners = [owners] * len(modes)
        d0 = self._add_columns(st.mean, st.cov)
        for k, (m, owner) in enumerate(zip(modes, owners)):
            if self.owner[m] is not None:
                raise ValueError(f"mode {m} already prepared")
            self.rows[2 * m : 2 * m + 2, d0 + 2 * k : d0 + 2 * k + 2] = np.eye(2)
            self.owner[m] = owner
            self.node(owner).modes.add(m)
            self.audit.append((owner, "prepare", (m,)))

    def hand_over(self, mode, src, dst):
        if self.owner[mode] != src:
            raise LocalityViolation(f"{src} does not own mode {mode}")
        self.owner[mode] = dst
        self.nodes[src].modes.discard(mode)
        self.node(dst).modes.add(mode)
        self.audit.append((src, "hand_over", (mode,), dst))

    def channel(self, src, dst, latency=1):
        ch = ClassicalChannel(src, dst, latency)
        self.channels.append(ch)
        return ch

    # ------------------------------------------------------------ actions

    def _check(self, node, modes, action):
        for m in modes:
            if self.owner[m] != node.name:
                raise LocalityViolation(f"{node.name} tried to {action} mode {m} owned by {self.owner[m]}")
            if m in self.measured:
                raise LocalityViolation(f"{node.name} tried to {action} already measured mode {m}")
        self.audit.append((node.name, action, tuple(sorted(modes))))

    def apply(self, node, t):
        if t.num_modes != self.num_modes:
            raise ValueError(f"transform acts on {t.num_modes} modes, circuit has {self.num_modes}")
        support = t.support
        self._check(node, support, "transform")
        depth = max((self.mode_depth[m] for m in support), default=0)
        for m in support:
            self.mode_depth[m] = depth
        S = t.matrix
        self.rows = S @ self.rows
        self.offsets = S @ self.offsets + t.displacement
        self.ff = S @ self.ff

    def loss(self, node, mode, eta):
        """Pure loss, dilated as a beamsplitter with a fresh vacuum ancilla."""
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"transmissivity must lie in [0, 1], got {eta}")
        self._check(node, (mode,), "loss")
        if eta == 1.0:
            return
        d0 = self._add_columns(np.zeros(2), SNL * np.eye(2))
        blk = slice(2 * mode, 2 * mode + 2)
        a, b = np.sqrt(eta), np.sqrt(1.0 - eta)
        self.rows[blk] *= a
        self.rows[blk, d0 : d0 + 2] = b * np.eye(2)
        self.offsets[blk] *= a
        self.ff[blk] *= a

    def measure(self, node, mode, quadrature, label, efficiency=1.0):
        """Homodyne ``quadrature`` of ``mode``; the mode is consumed.

        A detector efficiency below one is modelled as loss before an ideal
        detector; the record carries the ``1/sqrt(efficiency)`` electronic
        gain that restores unit feed-forward gain on the signal.
        """
        if efficiency < 1.0:
            self.loss(node, mode, efficiency)
        self._check(node, (mode,), "measure")
        h = quadrature_row(self.num_modes, mode, quadrature)
        k = len(self.records)
        rec = HomodyneRecord(k, label, node.name, mode, quadrature, 1.0 / np.sqrt(efficiency), self.mode_depth[mode])
        self.records.append(rec)
        self.q_rows = np.vstack([self.q_rows, h @ self.rows])
        self.q_offsets = np.append(self.q_offsets, h @ self.offsets)
        prev = np.zeros((k + 1, k + 1))
        prev[:k, :k] = self.q_ff
        prev[k, :k] = h @ self.ff
        self.q_ff = prev
        self.ff = np.hstack([self.ff, np.zeros((self.ff.shape[0], 1))])
        self.measured.add(mode)
        node.local_records[k] = rec
        return rec

    def feed_forward(self, node, mode, quadrature, gain, record, depth=0):
        self._check(node, (mode,), "displace")
        self.mode_depth[mode] = max(self.mode_depth[mode], depth)
        row = quadrature_row(self.num_modes, mode, quadrature)
        self.ff[np.argmax(row), record.index] += gain

    # ------------------------------------------------------------ readout

    def _indices(self, modes):
        for m in modes:
            if m in self.measured:
                raise ValueError(f"mode {m} was measured and is no longer available")
        return np.array([2 * m + k for m in modes for k in (0, 1)])

    def _outcome_map(self):
        """Outcomes as ``s = T (q_rows xi0 + q_offsets)``, with ``T = (I - q_ff)^-1``."""
        k = len(self.records)
        return np.linalg.solve(np.eye(k) - self.q_ff, np.eye(k)) if k else np.zeros((0, 0))

    def analytic(self, modes):
        idx = self._indices(modes)
        T = self._outcome_map()
        ff = self.ff[idx]
        rows = self.rows[idx] + ff @ T @ self.q_rows
        offs = self.offsets[idx] + ff @ T @ self.q_offsets
        return g.GaussianState(rows @ self.mu0 + offs, rows @ self.cov0 @ rows.T)

    def sampling_plan(self, modes):
        """Arguments for :func:`qndsim.kernels.feedforward_trajectories`."""
        idx = self._indices(modes)
        T = self._outcome_map()
        Q, R_pre, ff = self.q_rows, self.rows[idx], self.ff[idx]
        R_full = R_pre + ff @ T @ Q
        V = self.cov0
        mu_q = Q @ self.mu0 + self.q_offsets
        C_qq = Q @ V @ Q.T
        C_oq = R_full @ V @ Q.T
        K_full = C_oq @ np.linalg.pinv(C_qq, rcond=g.PINV_CUTOFF, hermitian=True)
        cond = R_full @ V @ R_full.T - K_full @ C_oq.T
        return dict(
            mu_q=mu_q,
            L_q=_lower_factor(C_qq),
            ff_meas=self.q_ff,
            mu_o=R_pre @ self.mu0 + self.offsets[idx],
            K=K_full - ff @ T,
            L_o=_lower_factor(0.5 * (cond + cond.T)),
            ff_out=ff,
        )

    def monte_carlo(self, modes, samples, seed, backend=None):
        plan = self.sampling_plan(modes)
        k, m = plan["L_q"].shape[0], plan["L_o"].shape[0]
        z = standard_normals(seed, samples, k + m)
        return feedforward_trajectories(z[:, :k], z[:, k:], backend=backend, **plan)

    def ledger(self, epr_pairs):
        reals = sum(len(ch.log) for ch in self.channels)
        rounds = max((e["round"] for ch in self.channels for e in ch.log), default=0)
        return ResourceLedger(epr_pairs, reals, rounds)


def _lower_factor(cov):
    """Lower-triangular ``L`` with ``L L^T = cov``; tolerates semidefinite input."""
    if cov.size == 0:
        return np.zeros_like(cov)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        w, U = np.linalg.eigh(cov)
        root = (U * np.sqrt(np.clip(w, 0.0, None))) @ U.T
        # QR of root^T gives a triangular factor with the same Gram matrix
        _, Rm = np.linalg.qr(root.T)
        return Rm.T


def standard_normals(seed, n, dim):
    """``(n, dim)`` standard normals from per-chunk substreams of ``seed``.

    Each block of :data:`CHUNK` trajectories draws from its own
    ``SeedSequence`` child, so blocks can be generated independently and the
    result depends only on ``(seed, n)``.
    """
    chunks = -(-n // CHUNK)
    children = np.random.SeedSequence(seed).spawn(chunks)
    out = np.empty((n, dim))
    for c, child in enumerate(children):
        lo, hi = c * CHUNK, min(n, (c + 1) * CHUNK)
        out[lo:hi] = np.random.Generator(np.random.PCG64(child)).standard_normal((hi - lo, dim))
    return out


# -------------------------------------------------------------------- results


@dataclass
class ProtocolResult:
    output: g.GaussianState
    ledger: ResourceLedger
    scheme: str
    mode: str
    r: float
    seed: Optional[int] = None
    samples: Optional[int] = None
    record_labels: tuple = ()
    outcomes: Optional[np.ndarray] = None
    output_samples: Optional[np.ndarray] = None
    audit: list = field(default_factory=list)
    channels: list = field(default_factory=list)

    def negativity(self):
        return log_negativity(self.output.cov)

    def to_dict(self):
        out = {
            "scheme": self.scheme,
            "mode": self.mode,
            "r": self.r,
            "ledger": self.ledger.to_dict(),
            "output": self.output.to_dict(),
            "channels": [{"direction": ch.direction, "latency": ch.latency, "log": ch.log} for ch in self.channels],
        }
        if self.mode == "montecarlo":
            out["seed"] = self.seed
            out["samples"] = self.samples
        return out


def _check_inputs(st, r):
    if not isinstance(st, g.GaussianState) or st.num_modes != 2:
        raise ValueError("the gate takes a two-mode input state (A at Alice, B at Bob)")
    if r < 0:
        raise ValueError(f"resource squeezing must be non-negative, got r={r}")


def make_epr(r):
    """EPR pair from an x-squeezed and a p-squeezed vacuum on a balanced beamsplitter."""
    if r < 0:
        raise ValueError(f"squeezing parameter must be non-negative, got {r}")
    sq = g.squeezed_vacuum(g.SqueezingSpec(r, "x")).tensor(g.squeezed_vacuum(g.SqueezingSpec(r, "p")))
    return g.apply(g.beamsplitter(1, 0), sq)


def _share_epr(circ, r, m1, m2, holder1, holder2, eta1=1.0, eta2=1.0):
    """Produce an EPR pair at the source and distribute it ahead of the gate."""
    circ.prepare(g.squeezed_vacuum(g.SqueezingSpec(r, "x")), [m1], SOURCE)
    circ.prepare(g.squeezed_vacuum(g.SqueezingSpec(r, "p")), [m2], SOURCE)
    circ.apply(circ.node(SOURCE), g.beamsplitter(m2, m1, num_modes=circ.num_modes))
    circ.hand_over(m1, SOURCE, holder1)
    circ.hand_over(m2, SOURCE, holder2)
    circ.nodes[holder1].loss(m1, eta1)
    circ.nodes[holder2].loss(m2, eta2)


def _finish(circ, out_modes, scheme, r, mode, samples, seed, epr_pairs, backend, labels):
    ledger = circ.ledger(epr_pairs)
    common = dict(ledger=ledger, scheme=scheme, r=r, audit=circ.audit, channels=circ.channels)
    if mode == "analytic":
        return ProtocolResult(circ.analytic(out_modes), mode=mode, record_labels=labels, **common)
    if mode != "montecarlo":
        raise ValueError(f"mode must be 'analytic' or 'montecarlo', got {mode!r}")
    if samples is None or samples < 2:
        raise ValueError("montecarlo mode needs samples >= 2")
    if seed is None:
        raise ValueError("montecarlo mode needs an explicit seed")
    s, out = circ.monte_carlo(out_modes, samples, seed, backend)
    mean, cov = sample_moments(out, backend)
    return ProtocolResult(
        g.GaussianState(mean, cov),
        mode=mode,
        seed=seed,
        samples=samples,
        record_labels=labels,
        outcomes=s,
        output_samples=out,
        **common,
    )


def parallel_gate(
    st, r, mode="analytic", samples=None, seed=None, imperfections=None, latency=1, backend=None
):
    """Run the parallel nonlocal QND gate on a two-mode input.

    Modes: 0 = A and 2 = E1 at Alice, 1 = B and 3 = E2 at Bob.  Alice couples
    A with E1 and measures ``s_A = (x_A - x_E1)/sqrt2``; Bob couples B with E2
    and measures ``s_B = (p_B - p_E2)/sqrt2``.  The two outcomes are exchanged
    in one round and the kept modes are displaced by
    ``X_A'(s_A) Z_A'(-s_B) X_B'(s_A) Z_B'(s_B)``.  Output order is
    ``(x_alpha, p_alpha, x_beta, p_beta)``.
    """
    _check_inputs(st, r)
    imp = imperfections or ImperfectionConfig()
    eta_hd = imp.homodyne_efficiency
    circ = Circuit(4)
    circ.prepare(st, [0, 1], [ALICE, BOB])
    alice, bob = circ.nodes[ALICE], circ.nodes[BOB]
    _share_epr(circ, r, 2, 3, ALICE, BOB, imp.eta_paths[0], imp.eta_paths[1])
    to_bob, to_alice = circ.channel(ALICE, BOB, latency), circ.channel(BOB, ALICE, latency)

    alice.apply(g.beamsplitter(0, 2, num_modes=4))
    bob.apply(g.beamsplitter(1, 3, num_modes=4))
    s_a = alice.measure(0, "x", "s_A", eta_hd)
    s_b = bob.measure(1, "p", "s_B", eta_hd)
    alice.send(s_a, to_bob)
    bob.send(s_b, to_alice)
    alice.displace(2, "x", 1.0, s_a)
    alice.displace(2, "p", -1.0, s_b)
    bob.displace(3, "x", 1.0, s_a)
    bob.displace(3, "p", 1.0, s_b)

    alice.loss(2, imp.eta_paths[2] * eta_hd)
    bob.loss(3, imp.eta_paths[3] * eta_hd)
    return _finish(circ, [2, 3], "parallel", r, mode, samples, seed, 1, backend, ("s_A", "s_B"))


def _teleport(circ, sender, receiver, mode, e_send, e_recv, ch, eta_hd, tag):
    """Unit-gain CV teleportation of ``mode`` onto ``e_recv`` through the pair (e_send, e_recv)."""
    n = circ.num_modes
    sender.apply(g.beamsplitter(mode, e_send, num_modes=n))
    u = sender.measure(mode, "x", f"{tag}_x", eta_hd)
    v = sender.measure(e_send, "p", f"{tag}_p", eta_hd)
    sender.send(u, ch)
    sender.send(v, ch)
    receiver.displace(e_recv, "x", np.sqrt(2.0), u)
    receiver.displace(e_recv, "p", np.sqrt(2.0), v)


def sequential_gate(
    st, r, mode="analytic", samples=None, seed=None, imperfections=None, latency=1, backend=None
):
    """Teleport A to Bob, apply a local QND gate, teleport the result back.

    Uses two EPR pairs: (2 at Alice, 3 at Bob) and (4 at Bob, 5 at Alice).
    Output order is ``(alpha, beta)`` = (mode 5 at Alice, mode 1 at Bob).
    """
    _check_inputs(st, r)
    imp = imperfections or ImperfectionConfig()
    eta_hd = imp.homodyne_efficiency
    circ = Circuit(6)
    circ.prepare(st, [0, 1], [ALICE, BOB])
    alice, bob = circ.nodes[ALICE], circ.nodes[BOB]
    _share_epr(circ, r, 2, 3, ALICE, BOB, imp.eta_paths[0], imp.eta_paths[1])
    _share_epr(circ, r, 4, 5, BOB, ALICE, imp.eta_paths[1], imp.eta_paths[0])
    to_bob, to_alice = circ.channel(ALICE, BOB, latency), circ.channel(BOB, ALICE, latency)

    _teleport(circ, alice, bob, 0, 2, 3, to_bob, eta_hd, "t1")
    bob.apply(g.qnd_sum(3, 1, num_modes=6))
    _teleport(circ, bob, alice, 3, 4, 5, to_alice, eta_hd, "t2")

    alice.loss(5, imp.eta_paths[2] * eta_hd)
    bob.loss(1, imp.eta_paths[3] * eta_hd)
    labels = ("t1_x", "t1_p", "t2_x", "t2_p")
    return _finish(circ, [5, 1], "sequential", r, mode, samples, seed, 2, backend, labels)


def local_squeezing_correction():
    """``S_A S_B^dagger``: removes the local squeezers of the parallel gate."""
    return g.squeezer(0, "S", num_modes=2).then(g.squeezer(1, "S_dagger", num_modes=2))


def undo_local_squeezing(result):
    """Output state of the parallel gate with the local -3 dB squeezers removed."""
    st = result.output if isinstance(result, ProtocolResult) else result
    if st.num_modes != 2:
        raise ValueError("expected a two-mode output")
    return g.apply(local_squeezing_correction(), st)


def entangling_matrix():
    """Heisenberg matrix of the implemented interaction ``S_A^dagger S_B Sigma_AB``."""
    return (
        g.qnd_sum(0, 1, num_modes=2)
        .then(g.squeezer(1, "S", num_modes=2))
        .then(g.squeezer(0, "S_dagger", num_modes=2))
        .matrix
    )


def ideal_output(st, scheme):
    """Output of the noiseless gate: ``E_AB`` for parallel, ``Sigma_AB`` for sequential."""
    M = entangling_matrix() if scheme == "parallel" else g.qnd_sum(0, 1, num_modes=2).matrix
    return g.apply(g.SymplecticTransform(M), st)


def compare_schemes(st, r, imperfections=None, latency=1):
    """Resource and noise comparison of the parallel and sequential gates."""
    report = {}
    for name, fn in (("parallel", parallel_gate), ("sequential", sequential_gate)):
        res = fn(st, r, imperfections=imperfections, latency=latency)
        ideal = ideal_output(st, name)
        try:
            e_n = log_negativity(res.output.cov).E_N
        except g.UnphysicalStateError:
            e_n = None
        report[name] = {
            "ledger": res.ledger.to_dict(),
            "rounds": res.ledger.communication_rounds,
            "gate_time_ticks": res.ledger.communication_rounds * latency,
            "E_N": e_n,
            "added_noise": np.diag(res.output.cov - ideal.cov).tolist(),
        }
    return report
