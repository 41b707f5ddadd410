import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from autloop.core.constructions import BetaMap, example2_beta
from autloop.core.formats import dump_beta, dump_cayley, dump_lief2
from autloop.core.gf2 import BitMatrix
from autloop.core.lie import LieAlgebraF2, free_nilpotent, heisenberg

T5 = [
    [0, 1, 2, 3, 4],
    [1, 0, 3, 4, 2],
    [2, 3, 4, 0, 1],
    [3, 4, 1, 2, 0],
    [4, 2, 0, 1, 3],
]


def write_sample(text, filename, folder="samples"):
    Path(folder).mkdir(exist_ok=True)
    path = Path(folder) / filename
    path.write_text(text, encoding="utf-8")
    print(f"Created: {path}")


def generate():
    # 1. Heisenberg algebra: its loop is an elementary abelian group
    write_sample(dump_lief2(heisenberg()), "heis.lief2")

    # 2. Free nilpotent, 2 generators, class 3: index-4 middle nucleus, no nuclear splitting
    write_sample(dump_lief2(free_nilpotent(2, 3)), "free_2_3.lief2")

    # 3. [e0, e1] = e1 makes id + ad(e0) singular, so `lie to-loop` refuses it
    write_sample(dump_lief2(LieAlgebraF2(2, {(0, 1): 0b10})), "w1_bad.lief2")

    # 4. Order-5 loop that is not automorphic (negative control)
    write_sample(dump_cayley(T5), "t5.cayley")

    # 5. beta maps: GF(4) with H = GF(2), and a square-zero map with a large center
    write_sample(dump_beta(example2_beta(2, 1)), "example2.beta.json")
    N = BitMatrix.from_rows([[0, 1], [0, 0]])
    write_sample(dump_beta(BetaMap(2, 1, (N,))), "square_zero.beta.json")


if __name__ == "__main__":
    generate()
