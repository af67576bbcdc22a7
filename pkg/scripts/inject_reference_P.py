"""Check the published P matrices against our certificate: search H and multipliers with P fixed, then verify."""
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from appendix_tables import JET_ALPHA1, JET_ALPHA2, JET_P, LORENZ_ALPHA1, LORENZ_ALPHA2, LORENZ_P  # noqa: E402
from cbc.config import parse_config  # noqa: E402
from cbc.pipeline import prepare, synthesize  # noqa: E402
from cbc.verify import verify  # noqa: E402


def main():
    for name, P, a1, a2 in (("jet", JET_P, JET_ALPHA1, JET_ALPHA2), ("lorenz", LORENZ_P, LORENZ_ALPHA1, LORENZ_ALPHA2)):
        cfg = parse_config(ROOT / "configs" / f"{name}.toml")
        prep = prepare(cfg)
        sol = synthesize(cfg, prep, fixed_P=P)
        rep = verify(sol, prep.traj, prep.lift, prep.theta, cfg.state_set(), cfg.initial_set(), cfg.unsafe_set(),
                     cfg.verify_settings())
        print(f"== {name}: alpha1={sol.alpha1:.10g} (printed {a1:g}, rel {sol.alpha1 / a1 - 1:+.2e})  "
              f"alpha2={sol.alpha2:.10g} (printed {a2:g}, rel {sol.alpha2 / a2 - 1:+.2e})")
        print(rep.summary())


if __name__ == "__main__":
    main()
