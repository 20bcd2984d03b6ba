"""Search d = 4, t = 0.1 with the documented budget and archive the best attempt.

Expected outcome: status not_found. Usage:

    python scripts/negative_d4.py --archive negative_d4.json
"""

from mufpairs.experiments import main

if __name__ == "__main__":
    main()
