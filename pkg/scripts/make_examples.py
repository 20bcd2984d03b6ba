"""Regenerate the example frame files shipped in src/mufpairs/data/."""

from mufpairs.experiments import DATA_DIR, write_examples

if __name__ == "__main__":
    write_examples()
    print(f"wrote examples to {DATA_DIR}")
