"""Bundled example models and the BRP-style model generator."""
import argparse
import sys
from importlib import resources

from .modelio import parse_model

BUNDLED = ("dice", "two_cycle", "lazy_cycle")


def bundled_text(name):
    if name not in BUNDLED:
        raise KeyError(f"no bundled model {name!r}")
    return resources.files("pmcdag").joinpath("data", f"{name}.pmc").read_text()


def bundled(name):
    return parse_model(bundled_text(name))


def brp_text(chunks=256, max_retries=4, threshold=8):
    """A bounded-retransmission style chain with parameters ``pK`` and ``pL``.

    Each of ``chunks`` chunks is sent at most ``max_retries + 1`` times.  A
    send reaches the receiver with probability pK and its acknowledgement gets
    back with probability pL; otherwise a timeout triggers a retry.  Running
    out of retries ends in ``fail_high`` when more than ``threshold`` chunks
    had already gone through, else in ``fail_low``.  The model has
    3 * chunks * (max_retries + 1) + 3 states.
    """
    slots = max_retries + 1

    def send(i, j):
        return 3 * ((i - 1) * slots + j)

    success = 3 * chunks * slots
    fail_low, fail_high = success + 1, success + 2
    out = [
        f"# BRP-style model: {chunks} chunks, {max_retries} retries",
        "@parameters", "pK pL",
        f"@states {fail_high + 1}",
        "@initial 0",
        "@labels",
        f'{success}: "success"',
        f'{fail_low}: "fail_low" "fail"',
        f'{fail_high}: "fail_high" "fail"',
        "@transitions",
    ]
    for i in range(1, chunks + 1):
        for j in range(slots):
            s = send(i, j)
            ack, timeout = s + 1, s + 2
            nxt = send(i + 1, 0) if i < chunks else success
            if j < max_retries:
                retry = send(i, j + 1)
            else:
                retry = fail_high if i - 1 > threshold else fail_low
            out += [f"{s} {ack} pK", f"{s} {timeout} 1-pK",
                    f"{ack} {nxt} pL", f"{ack} {timeout} 1-pL",
                    f"{timeout} {retry} 1"]
    out += [f"{t} {t} 1" for t in (success, fail_low, fail_high)]
    out.append("@rewards steps")
    out += [f"{s}: 1" for s in range(success)]
    return "\n".join(out) + "\n"


def brp(chunks=256, max_retries=4, threshold=8):
    return parse_model(brp_text(chunks, max_retries, threshold))


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="pmcdag-models", description="Write a bundled or generated model.")
    sub = parser.add_subparsers(dest="what", required=True)
    show = sub.add_parser("bundled", help="print a bundled model")
    show.add_argument("name", choices=BUNDLED)
    gen = sub.add_parser("brp", help="generate a BRP-style model")
    gen.add_argument("--chunks", type=int, default=256)
    gen.add_argument("--max", dest="max_retries", type=int, default=4)
    gen.add_argument("--threshold", type=int, default=8)
    args = parser.parse_args(argv)
    if args.what == "bundled":
        sys.stdout.write(bundled_text(args.name))
    else:
        sys.stdout.write(brp_text(args.chunks, args.max_retries, args.threshold))
    return 0


if __name__ == "__main__":
    sys.exit(main())
