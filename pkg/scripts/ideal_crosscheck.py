"""Ideal gas through the general and the closed-form constant-kappa paths."""
from sonicpatch.pipeline import reference_config
from sonicpatch.verify import ideal_config, ideal_gas_crosscheck


def main():
    rep = ideal_gas_crosscheck(ideal_config(reference_config()))
    for c in rep.checks:
        print(f"{c.name:24s} {c.value:.3e}  ({c.comparison} {c.tolerance:.1e})  {'ok' if c.passed else 'FAIL'}")
    for k, v in rep.info.items():
        print(f"{k:24s} {v}")


if __name__ == "__main__":
    main()
