import argparse
import subprocess
import sys
from typing import List

SUITES = {
    "unit": ["-m", "not slow"],
    "acceptance": ["-m", "slow"],
    "all": [],
}

# B311: seeded `random` drives reproducible experiments, never secrets.
BANDIT_SKIPS = "B311"


def build_command(suite: str, keyword: str = None, cov: bool = False, extra: List[str] = ()) -> List[str]:
    if suite == "security":
        return [sys.executable, "-m", "bandit", "-q", "-r", "drinfeldlab", "--skip", BANDIT_SKIPS, *extra]
    cmd = [sys.executable, "-m", "pytest", "-q", "--disable-warnings", "tests", *SUITES[suite]]
    if suite == "unit":
        cmd.append("--maxfail=1")
    if keyword:
        cmd += ["-k", keyword]
    if cov:
        cmd += ["--cov=drinfeldlab", "--cov-report=term-missing"]
    return cmd + list(extra)


def main() -> int:
    parser = argparse.ArgumentParser(description="Test runner for DrinfeldLab")
    parser.add_argument("--suite", choices=sorted([*SUITES, "security"]), default="all",
                        help="unit skips acceptance-scale runs; acceptance runs only those; "
                             "security runs bandit over the package")
    parser.add_argument("--keyword", help="pytest -k expression", default=None)
    parser.add_argument("--cov", action="store_true", help="Report coverage for the drinfeldlab package")
    args, extra = parser.parse_known_args()
    return subprocess.call(build_command(args.suite, args.keyword, args.cov, extra))


if __name__ == "__main__":
    raise SystemExit(main())
