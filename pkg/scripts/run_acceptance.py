"""Run the ten acceptance criteria and print one PASS/FAIL line each."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import test_acceptance  # noqa: E402


def main():
    results = [c() for c in test_acceptance.CRITERIA]
    print(f"{sum(results)}/10 criteria pass")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
