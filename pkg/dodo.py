"""Run or update the project. This file uses the `doit` Python package. It works
like a Makefile, but is Python-based

"""

#######################################
## Configuration and Helpers for PyDoit
#######################################
## Make sure the src folder is in the path
import sys

sys.path.insert(1, "./src/")

import shutil
from os import environ, getcwd, path
from pathlib import Path

from colorama import Fore, Style, init

## Custom reporter: Print PyDoit Text in Green
# The CLI logs to stderr; the green task lines keep doit's own output visible.
from doit.reporter import ConsoleReporter

from settings import config

try:
    in_slurm = environ["SLURM_JOB_ID"] is not None
except KeyError:
    in_slurm = False


class GreenReporter(ConsoleReporter):
    def write(self, stuff, **kwargs):
        doit_mark = stuff.split(" ")[0].ljust(2)
        task = " ".join(stuff.split(" ")[1:]).strip() + "\n"
        output = (
            Fore.GREEN
            + doit_mark
            + f" {path.basename(getcwd())}: "
            + task
            + Style.RESET_ALL
        )
        self.outstream.write(output)


if not in_slurm:
    DOIT_CONFIG = {
        "reporter": GreenReporter,
        "backend": "sqlite3",
        "dep_file": "./.doit-db.sqlite",
    }
else:
    DOIT_CONFIG = {"backend": "sqlite3", "dep_file": "./.doit-db.sqlite"}
init(autoreset=True)


BASE_DIR = config("BASE_DIR")
MANUAL_DATA_DIR = Path(config("MANUAL_DATA_DIR"))
OUTPUT_DIR = Path(config("OUTPUT_DIR"))
TEMP_DIR = Path(config("TEMP_DIR"))
LOG_FILE = TEMP_DIR / config("LOG_FILE")

CERT_DIR = OUTPUT_DIR / "certificates"
GENFUN_DIR = OUTPUT_DIR / "genfun"
TFAE_DIR = OUTPUT_DIR / "tfae"
WALKS_DIR = OUTPUT_DIR / "walks"

SOURCE_DEPS = [
    "./src/settings.py",
    "./src/exactnum.py",
    "./src/exact_linalg.py",
    "./src/recurrence.py",
    "./src/ranks.py",
    "./src/analytic.py",
    "./src/cli.py",
]

SEQUENCE_FIXTURES = sorted(MANUAL_DATA_DIR.glob("*.seq"))
MATRIX_FIXTURES = sorted(MANUAL_DATA_DIR.glob("*.mat"))

# Fixtures whose certificates are failures; the CLI exits with the status code.
EXPECTED_EXIT = {
    "n2n": 2,
    "truncated": 3,
}


def cli_action(command, target, allowed=(0,)):
    """Create a Python action that runs one CLI command and writes stdout to `target`."""

    def _run():
        import contextlib
        import io

        from cli import main

        buffer = io.StringIO()
        with contextlib.redirect_stdout(buffer):
            code = main([str(c) for c in command])
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(buffer.getvalue(), encoding="utf-8")
        # doit treats False as failure
        return code in allowed

    return _run


##################################
## Begin rest of PyDoit tasks here
##################################


def task_config():
    """Create empty directories for data and output if they don't exist, and ensure the log file is created"""
    return {
        "actions": ["ipython ./src/settings.py"],
        "targets": [OUTPUT_DIR, TEMP_DIR, LOG_FILE],
        "file_dep": ["./src/settings.py"],
        "clean": True,
    }


def task_certify():
    """
    Certify the rank of every sequence fixture and store the JSON certificate.
    """
    for fixture in SEQUENCE_FIXTURES:
        target = CERT_DIR / f"{fixture.stem}.json"
        yield {
            "name": fixture.stem,
            "actions": [
                cli_action(
                    ["rank", fixture, "--json"],
                    target,
                    allowed=(EXPECTED_EXIT.get(fixture.stem, 0),),
                )
            ],
            "file_dep": [fixture, *SOURCE_DEPS],
            "targets": [target],
            "task_dep": ["config"],
            "clean": True,
        }


def task_genfun():
    """
    Rational generating functions of the fixtures that have a recurrence.
    """
    for fixture in SEQUENCE_FIXTURES:
        if fixture.stem == "truncated":
            continue
        target = GENFUN_DIR / f"{fixture.stem}.txt"
        yield {
            "name": fixture.stem,
            "actions": [cli_action(["genfun", fixture], target)],
            "file_dep": [fixture, *SOURCE_DEPS],
            "targets": [target],
            "task_dep": ["config"],
            "clean": True,
        }


def task_verify():
    """
    Cross-check the equivalent rank characterisations on every sequence fixture.
    """
    for fixture in SEQUENCE_FIXTURES:
        csv_target = TFAE_DIR / f"{fixture.stem}.csv"
        report_target = TFAE_DIR / f"{fixture.stem}.txt"
        yield {
            "name": fixture.stem,
            "actions": [cli_action(["verify", fixture, "--csv", csv_target], report_target)],
            "file_dep": [fixture, *SOURCE_DEPS],
            "targets": [csv_target, report_target],
            "task_dep": ["config"],
            "clean": True,
        }


def task_walks():
    """
    Zero-eigenvalue multiplicity of the matrix fixtures from closed-walk counts.
    """
    for fixture in MATRIX_FIXTURES:
        target = WALKS_DIR / f"{fixture.stem}.json"
        yield {
            "name": fixture.stem,
            "actions": [cli_action(["walks", fixture, "--json"], target)],
            "file_dep": [fixture, *SOURCE_DEPS],
            "targets": [target],
            "task_dep": ["config"],
            "clean": True,
        }


def task_test():
    """
    Run the unit and acceptance tests.
    """
    test_files = sorted(str(p) for p in Path("./src").glob("test_*.py"))
    return {
        "actions": ["pytest -q ./src"],
        "file_dep": [*SOURCE_DEPS, *test_files],
        "task_dep": ["config"],
        "verbosity": 2,
    }


# ###############################################################
# ## Sphinx documentation
# ###############################################################

sphinx_targets = [
    "./_docs/_build/html/index.html",
]


def copy_docs_src_to_docs():
    """
    Copy all files and subdirectories from the docs_src directory to the _docs directory.
    This function loops through all files in docs_src and copies them individually to _docs,
    preserving the directory structure. It does not delete the contents of _docs beforehand.
    """
    src = Path("docs_src")
    dst = Path("_docs")
    dst.mkdir(parents=True, exist_ok=True)

    for item in src.rglob("*"):
        relative_path = item.relative_to(src)
        target = dst / relative_path
        if item.is_dir():
            target.mkdir(parents=True, exist_ok=True)
        else:
            shutil.copy2(item, target)


def copy_outputs_to_docs():
    """Copy the generated certificates and reports so the docs can include them."""
    dst = Path("_docs") / "outputs"
    for folder in (CERT_DIR, GENFUN_DIR, TFAE_DIR, WALKS_DIR):
        for item in folder.glob("*"):
            target = dst / folder.name / item.name
            target.parent.mkdir(parents=True, exist_ok=True)
            shutil.copy2(item, target)


def copy_docs_build_to_docs():
    """
    Copy all files and subdirectories from _docs/_build/html to docs.
    After copying, it creates an empty .nojekyll file in the docs directory.
    """
    src = Path("_docs/_build/html")
    dst = Path("docs")
    dst.mkdir(parents=True, exist_ok=True)

    for item in src.rglob("*"):
        relative_path = item.relative_to(src)
        target = dst / relative_path
        if item.is_dir():
            target.mkdir(parents=True, exist_ok=True)
        else:
            target.parent.mkdir(parents=True, exist_ok=True)
            shutil.copy2(item, target)

    (dst / ".nojekyll").touch()


def task_compile_sphinx_docs():
    """Compile Sphinx Docs"""
    file_dep = [
        "./docs_src/conf.py",
        "./docs_src/index.md",
        *SOURCE_DEPS,
    ]

    return {
        "actions": [
            copy_docs_src_to_docs,
            copy_outputs_to_docs,
            "sphinx-build -M html ./_docs/ ./_docs/_build",
            copy_docs_build_to_docs,
        ],
        "targets": sphinx_targets,
        "file_dep": file_dep,
        "task_dep": ["certify", "genfun", "verify", "walks"],
        "clean": True,
    }
