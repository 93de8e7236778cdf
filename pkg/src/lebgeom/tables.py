"""Published reference values: convexity minimal degrees and 2D maxima counts."""

# m -> minimal degree, second-kind Chebyshev nodes
CONVEXITY_CHEBYSHEV2 = {
    1: 8, 2: 16, 3: 26, 4: 38, 5: 52, 6: 68, 7: 86, 8: 107, 9: 129, 10: 154,
    11: 181, 12: 210, 13: 241, 14: 274, 15: 309, 16: 347, 17: 386, 18: 428, 19: 472, 20: 518,
}

# m -> minimal degree, first-kind Chebyshev nodes
CONVEXITY_CHEBYSHEV1 = {1: 38, 2: 230, 3: 1287}

# n -> (interior maxima, all maxima)
MAXIMA_PADUA = {3: (7, 15), 4: (13, 27), 5: (14, 25), 6: (23, 39), 7: (27, 42), 8: (38, 56)}
MAXIMA_MORROW_PATTERSON = {3: (9, 18), 4: (8, 17), 5: (27, 38), 6: (19, 32), 7: (27, 42), 8: (36, 53)}

TABLES = {
    1: ("chebyshev2", CONVEXITY_CHEBYSHEV2),
    2: ("chebyshev1", CONVEXITY_CHEBYSHEV1),
    3: ("padua", MAXIMA_PADUA),
    4: ("morrow_patterson", MAXIMA_MORROW_PATTERSON),
}

# rows whose degree exceeds this are skipped unless a long run is requested
LONG_DEGREE = 600
# rows of table 1 with m > 8 are long-running too
LONG_ROW_CHEBYSHEV2 = 8


def is_long_row(table: int, key: int) -> bool:
    if table == 1:
        return key > LONG_ROW_CHEBYSHEV2
    if table == 2:
        return CONVEXITY_CHEBYSHEV1[key] > LONG_DEGREE
    return False
