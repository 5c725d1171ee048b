"""Option-chain replay: build condors from real quotes and track P&L.

Input schema (one CSV row per quote):

    date,underlying_close,expiry,strike,kind,bid,ask

ISO-8601 dates; a snapshot is the set of rows sharing one date.  Legs are
valued at mid quotes between entry and expiry; the final date settles at
intrinsic value against the underlying close.  P&L is normalized by the
entry credit, so the first point is exactly 0 and full credit kept is 1.
"""

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path

from . import condor
from .condor import CondorSpec
from .errors import EmptyDirectory, NoMatchingStrikes, SchemaViolation

SCHEMA_COLUMNS = ["date", "underlying_close", "expiry", "strike", "kind", "bid", "ask"]


@dataclass(frozen=True)
class QuoteRow:
    expiry: dt.date
    strike: float
    kind: str
    bid: float
    ask: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.bid + self.ask)


@dataclass
class ChainSnapshot:
    date: dt.date
    underlying_close: float
    rows: list

    def quote(self, expiry: dt.date, kind: str, strike: float) -> QuoteRow | None:
        for row in self.rows:
            if (
                row.expiry == expiry
                and row.kind == kind
                and abs(row.strike - strike) < 1e-9
            ):
                return row
        return None


@dataclass
class ReplayResult:
    dates: list
    pnl: list                 # normalized P&L per date
    spec: CondorSpec
    gap_dates: list = field(default_factory=list)


def _parse_row(raw: dict, where: str):
    try:
        date = dt.date.fromisoformat(raw["date"])
        close = float(raw["underlying_close"])
        row = QuoteRow(
            expiry=dt.date.fromisoformat(raw["expiry"]),
            strike=float(raw["strike"]),
            kind=raw["kind"].strip().lower(),
            bid=float(raw["bid"]),
            ask=float(raw["ask"]),
        )
    except (KeyError, ValueError) as exc:
        raise SchemaViolation(f"{where}: malformed row ({exc})") from exc
    if row.kind not in ("call", "put"):
        raise SchemaViolation(f"{where}: kind must be 'call' or 'put', got {row.kind!r}")
    if row.strike <= 0:
        raise SchemaViolation(f"{where}: strike must be positive")
    if row.bid > row.ask:
        raise SchemaViolation(f"{where}: bid {row.bid} exceeds ask {row.ask}")
    if close <= 0:
        raise SchemaViolation(f"{where}: underlying_close must be positive")
    return date, close, row


def load_chains(path) -> list:
    """Load every *.csv under ``path`` into date-ordered snapshots."""
    directory = Path(path)
    files = sorted(directory.glob("*.csv"))
    if not files:
        raise EmptyDirectory(f"no chain CSV files in {directory}")
    by_date: dict = {}
    closes: dict = {}
    for file in files:
        with file.open(newline="") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames != SCHEMA_COLUMNS:
                raise SchemaViolation(
                    f"{file}: header must be {','.join(SCHEMA_COLUMNS)}"
                )
            for lineno, raw in enumerate(reader, start=2):
                date, close, row = _parse_row(raw, f"{file}:{lineno}")
                if date in closes and closes[date] != close:
                    raise SchemaViolation(
                        f"{file}:{lineno}: conflicting underlying_close for {date}"
                    )
                closes[date] = close
                by_date.setdefault(date, []).append(row)
    return [
        ChainSnapshot(date=d, underlying_close=closes[d], rows=by_date[d])
        for d in sorted(by_date)
    ]


def _snap(target: float, listed, money: float) -> float:
    """Nearest listed strike; ties resolve to the farther-from-money strike."""
    best = min(listed, key=lambda k: (abs(k - target), -abs(k - money)))
    return best


def select_strikes(
    snapshot: ChainSnapshot,
    expiry: dt.date,
    x: float,
    xhat: float,
    xbar: float,
) -> CondorSpec:
    """Snap (x, xhat, xbar) target strikes to the listed lattice.

    Targets scale by the snapshot underlying close; the entry credit comes
    from mid quotes on the snapped strikes.
    """
    close = snapshot.underlying_close
    targets = condor.from_params(x, xhat, xbar, s0=close)
    puts = sorted({r.strike for r in snapshot.rows if r.expiry == expiry and r.kind == "put"})
    calls = sorted({r.strike for r in snapshot.rows if r.expiry == expiry and r.kind == "call"})
    if len(puts) < 2 or len(calls) < 2:
        raise NoMatchingStrikes(f"chain lists too few strikes for expiry {expiry}")
    k1 = _snap(targets[0], puts, close)
    k2 = _snap(targets[1], puts, close)
    k3 = _snap(targets[2], calls, close)
    k4 = _snap(targets[3], calls, close)
    if len({k1, k2}) < 2 or len({k3, k4}) < 2 or not (k1 < k2 <= k3 < k4):
        raise NoMatchingStrikes(
            f"snapping produced unusable strikes ({k1}, {k2}, {k3}, {k4})"
        )
    legs = [("put", k1), ("put", k2), ("call", k3), ("call", k4)]
    mids = []
    for kind, k in legs:
        q = snapshot.quote(expiry, kind, k)
        if q is None:
            raise NoMatchingStrikes(f"no {kind} quote at strike {k} for {expiry}")
        mids.append(q.mid)
    credit = (mids[1] - mids[0]) + (mids[2] - mids[3])
    return CondorSpec(
        k1, k2, k3, k4, credit,
        params={"moneyness": x, "span": xhat, "asymmetry": xbar},
    )


def replay_pnl(chains, spec: CondorSpec, expiry: dt.date) -> ReplayResult:
    """Normalized P&L trajectory of one spec across the snapshots.

    Dates missing a leg quote carry the previous value forward and are
    flagged; the final date (at or past expiry) settles at intrinsic value.
    """
    chains = [c for c in chains if c.date <= expiry]
    if not chains:
        raise EmptyDirectory("no snapshots on or before the expiry date")
    legs = [("put", spec.k2, 1), ("put", spec.k1, -1),
            ("call", spec.k3, 1), ("call", spec.k4, -1)]
    dates, pnl, gaps = [], [], []
    last_value = spec.credit
    for i, snap in enumerate(chains):
        final = i == len(chains) - 1
        if final:
            # Settlement cost; pnl below then equals terminal_payoff / credit.
            value = spec.credit - float(condor.terminal_payoff(spec, snap.underlying_close))
        else:
            quotes = [snap.quote(expiry, kind, k) for kind, k, _ in legs]
            if any(q is None for q in quotes):
                value = last_value
                gaps.append(snap.date)
            else:
                value = sum(sign * q.mid for (_, _, sign), q in zip(legs, quotes))
        last_value = value
        dates.append(snap.date)
        pnl.append((spec.credit - value) / spec.credit)
    return ReplayResult(dates=dates, pnl=pnl, spec=spec, gap_dates=gaps)
