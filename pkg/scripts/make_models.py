"""Regenerate the bundled model, polytope and weight files."""

import json
from pathlib import Path

from chernscal.models import BUILTIN
from chernscal.toric_futaki import AffineWeight, interval, unit_square

DATA = Path(__file__).resolve().parents[1] / "src" / "chernscal" / "data"


def write(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {path.relative_to(DATA.parent.parent.parent)}")


def main() -> None:
    for name, factory in BUILTIN.items():
        model = factory()
        model.validate()
        write(DATA / "models" / f"{name}.json", model.to_json())
    write(DATA / "polytopes" / "interval.json", interval().to_json())
    write(DATA / "polytopes" / "square.json", unit_square().to_json())
    # empty slope vector: the constant weight u = 1 in any dimension
    write(DATA / "weights" / "flat.json", {"a": [], "a_const": "1"})
    write(DATA / "weights" / "linear.json", AffineWeight((1,), 1).to_json())


if __name__ == "__main__":
    main()
