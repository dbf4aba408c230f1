#!/usr/bin/env python3
"""Independent reimplementation of the canonical encoding and hash rules.

Recomputes the per-event digests, the receipt chain values, and the running
ledger commitment for the shared three-domain fixture, from scratch, using
only hashlib. The hex values printed here are frozen into the C++ golden
tests; if the two implementations ever disagree, one of them drifted from
the byte layout.
"""

import hashlib
import json

from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

SAT = 100_000_000

# record tags
EVENT_BODY = 0x01
TREASURY_EVENT = 0x02
CHAIN_LINK = 0x03
SIG_MESSAGE = 0x04
POT_RECORD = 0x05
LEDGER_RECORD = 0x09

KEY_SEED = bytes([0x07]) * 32  # matches the fixture's deterministic keys

# hash domain tags
TAG_LEDGER = 0x00
TAG_EVENT_DIGEST = 0x01
TAG_POT_CHAIN = 0x02


def tlv(tag, fields):
    """fields: list of (id, bytes) in increasing id order."""
    out = bytes([tag]) + len(fields).to_bytes(2, "big")
    for fid, data in fields:
        out += bytes([fid]) + len(data).to_bytes(4, "big") + data
    return out


def str_map(m):
    out = len(m).to_bytes(2, "big")
    for k in sorted(m):
        kb, vb = k.encode(), m[k].encode()
        out += len(kb).to_bytes(4, "big") + kb + len(vb).to_bytes(4, "big") + vb
    return out


def i64(v):
    return v.to_bytes(8, "big", signed=True)


def u64(v):
    return v.to_bytes(8, "big")


def h(tag, payload):
    return hashlib.sha256(bytes([tag]) + payload).digest()


def event(t, src, dst, btc):
    return {
        "t": t,
        "src": src,
        "dst": dst,
        "v": btc * SAT,
        "evid": bytes([t]) * 32,
        "m": {"note": "toy"},
    }


EVENTS = [
    event(1, "ext", "cold", 100),
    event(2, "cold", "exch", 40),
    event(3, "exch", "coll", 30),
    event(4, "coll", "exch", 10),
]


def body_bytes(e):
    return tlv(EVENT_BODY, [(1, e["evid"]), (2, i64(e["v"])), (3, str_map(e["m"]))])


def event_bytes(e):
    return tlv(
        TREASURY_EVENT,
        [
            (1, u64(e["t"])),
            (2, e["src"].encode()),
            (3, e["dst"].encode()),
            (4, i64(e["v"])),
            (5, e["evid"]),
            (6, str_map(e["m"])),
        ],
    )


def chain_value(r_prev, hd, src, dst, t):
    link = tlv(
        CHAIN_LINK,
        [(1, r_prev), (2, hd), (3, src.encode()), (4, dst.encode()), (5, u64(t))],
    )
    return h(TAG_POT_CHAIN, link)


def signing_key(role):
    return Ed25519PrivateKey.from_private_bytes(
        hashlib.sha256(KEY_SEED + role).digest()
    )


def sig_message(hd, src, dst, t, r):
    return tlv(
        SIG_MESSAGE,
        [(1, hd), (2, src.encode()), (3, dst.encode()), (4, u64(t)), (5, r)],
    )


def pot_record(index, e, hd, r, sig_t, sig_p):
    return tlv(
        POT_RECORD,
        [(1, u64(index)), (2, event_bytes(e)), (3, hd), (4, r), (5, sig_t), (6, sig_p)],
    )


def ledger_record(kind, payload):
    # kind 1 = event; the ledger stream is a concatenation of
    # u32-length-prefixed LEDGER_RECORD TLVs with no leading count
    return tlv(LEDGER_RECORD, [(1, bytes([kind])), (2, payload)])


def main():
    out = {"event_digest": [], "chain_value": [], "ledger_commitment": []}
    treasury, provider = signing_key(b"t"), signing_key(b"p")
    r = bytes(32)
    stream = hashlib.sha256(bytes([TAG_LEDGER]))
    out["ledger_commitment"].append(stream.copy().digest().hex())  # C_0
    for i, e in enumerate(EVENTS, start=1):
        hd = h(TAG_EVENT_DIGEST, body_bytes(e))
        r = chain_value(r, hd, e["src"], e["dst"], e["t"])
        out["event_digest"].append(hd.hex())
        out["chain_value"].append(r.hex())
        msg = sig_message(hd, e["src"], e["dst"], e["t"], r)
        receipt = pot_record(i, e, hd, r, treasury.sign(msg), provider.sign(msg))
        rec = ledger_record(1, receipt)
        stream.update(len(rec).to_bytes(4, "big") + rec)
        out["ledger_commitment"].append(stream.copy().digest().hex())
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
