"""Generates the sworn-enemies latch models and objective files.

State s<b1>...<bn>: bit i is 1 once player i has been killed (p<i> latches).
A living player either idles or kills one other living player.
"""
import itertools
import sys
from pathlib import Path


def model(n):
    states = ["s" + "".join(bits) for bits in itertools.product("01", repeat=n)]
    acts = []
    for i in range(1, n + 1):
        a = [f"i{i}"]
        if n == 2:
            a.append(f"k{i}")
        else:
            a += [f"k{i}_{j}" for j in range(1, n + 1) if j != i]
        acts.append(a)
    lines = [f"# {n}-player sworn enemies: p<i> latches once player i is killed",
             "states: " + " ".join(states), "init: s" + "0" * n, f"players: {n}"]
    for i, a in enumerate(acts, 1):
        lines.append(f"actions {i}: " + " ".join(a))
    for s in states:
        dead = [c == "1" for c in s[1:]]
        for joint in itertools.product(*acts):
            new = list(dead)
            for i, a in enumerate(joint):
                if a.startswith("k") and not dead[i]:
                    target = 1 - i if n == 2 else int(a.split("_")[1]) - 1
                    new[target] = True
            t = "s" + "".join("1" if d else "0" for d in new)
            lines.append(f"trans: {s} ({','.join(joint)}) -> {t}")
    for s in states:
        ps = [f"p{i + 1}" for i, c in enumerate(s[1:]) if c == "1"]
        if ps:
            lines.append(f"label {s}: " + " ".join(ps))
    lines.append("props: " + " ".join(f"p{i}" for i in range(1, n + 1)))
    return "\n".join(lines) + "\n"


def lit(alive, p):
    return f"G !{p}" if alive else f"F {p}"


def prefs2():
    out = []
    for me, other in ((1, 2), (2, 1)):
        pm, po = f"p{me}", f"p{other}"
        out += [f"player {me}",
                f"obj A: {lit(False, pm)} & {lit(True, po)}",
                f"obj B: {lit(False, pm)} & {lit(False, po)}",
                f"obj C: {lit(True, pm)} & {lit(True, po)}",
                f"obj D: {lit(True, pm)} & {lit(False, po)}",
                "order: A < B, B < C, C < D"]
    return "\n".join(out) + "\n"


# Objective letters for player 1 as (alive(1), alive(2), alive(3)).
LETTERS3 = {
    "a": (False, True, True), "b": (False, False, True), "c": (True, True, True),
    "d": (True, False, True), "e": (False, True, False), "f": (False, False, False),
    "g": (True, True, False), "h": (True, False, False),
}
EDGES3 = ["a < b", "a < e", "b < c", "c < d", "e < f", "f < g", "d < h", "g < h", "f < c"]


def prefs3():
    out = []
    for me in (1, 2, 3):
        # Player `me` sees itself as position 1, then the others cyclically.
        order = [me, me % 3 + 1, (me + 1) % 3 + 1]
        out.append(f"player {me}")
        for name, alive in LETTERS3.items():
            by_player = {order[k]: alive[k] for k in range(3)}
            body = " & ".join(lit(by_player[j], f"p{j}") for j in (1, 2, 3))
            out.append(f"obj {name}: {body}")
        out.append("order: " + ", ".join(EDGES3))
    return "\n".join(out) + "\n"


def main(dest):
    d = Path(dest)
    (d / "enemies2.cgm").write_text(model(2))
    (d / "enemies2.prf").write_text(prefs2())
    (d / "enemies3.cgm").write_text(model(3))
    (d / "enemies3.prf").write_text(prefs3())


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data")
