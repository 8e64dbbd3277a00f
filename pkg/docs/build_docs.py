#!/usr/bin/env python
"""
Build the Sphinx documentation for FieldForge.

    python docs/build_docs.py            # HTML, then PDF when pdflatex exists
    python docs/build_docs.py --html     # HTML only
    python docs/build_docs.py --no-clean # keep the previous build tree
"""
import argparse
import shutil
import subprocess
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).parent.parent
SPHINX_DIR = PROJECT_ROOT / "docs" / "sphinx"
BUILD_DIR = SPHINX_DIR / "_build"


def sphinx(builder: str, *extra: str) -> bool:
    """Run one Sphinx builder into ``_build/<builder>``."""
    print(f"Building {builder} documentation...")
    result = subprocess.run(
        [sys.executable, "-m", "sphinx.cmd.build", "-b", builder, *extra,
         str(SPHINX_DIR), str(BUILD_DIR / builder)],
        check=False,
    )
    if result.returncode != 0:
        print(f"Error building {builder} documentation")
        return False
    return True


def build_pdf() -> bool:
    """LaTeX build, then ``make`` in the LaTeX tree; the PDF is copied next to the HTML."""
    if shutil.which("pdflatex") is None:
        print("pdflatex not found, skipping PDF generation")
        return False
    if not sphinx("latex"):
        return False
    latex_dir = BUILD_DIR / "latex"
    if subprocess.run(["make"], cwd=latex_dir, check=False).returncode != 0:
        print("Error building PDF from LaTeX files")
        return False
    pdf_file = next(latex_dir.glob("*.pdf"), None)
    if pdf_file is None:
        print("No PDF file found")
        return False
    shutil.copy(pdf_file, BUILD_DIR / "html")
    print(f"PDF documentation built successfully: {pdf_file}")
    return True


def main() -> int:
    parser = argparse.ArgumentParser(description="Build the FieldForge documentation")
    parser.add_argument("--html", action="store_true", help="Skip the PDF build")
    parser.add_argument("--no-clean", action="store_true", help="Keep the previous build tree")
    parser.add_argument("--strict", action="store_true", help="Treat Sphinx warnings as errors")
    args = parser.parse_args()

    for name in ("_static", "_templates"):
        (SPHINX_DIR / name).mkdir(exist_ok=True)
    if not args.no_clean and BUILD_DIR.exists():
        print(f"Cleaning build directory: {BUILD_DIR}")
        shutil.rmtree(BUILD_DIR)

    html_ok = sphinx("html", *(["-W"] if args.strict else []))
    pdf_ok = False if args.html or not html_ok else build_pdf()

    print("\nBuild Summary:")
    print(f"HTML: {'Success' if html_ok else 'Failed'}")
    print(f"PDF: {'Success' if pdf_ok else 'Failed or Skipped'}")
    if html_ok:
        print(f"\nDocumentation available at: {BUILD_DIR / 'html' / 'index.html'}")
    return 0 if html_ok else 1


if __name__ == "__main__":
    sys.exit(main())
