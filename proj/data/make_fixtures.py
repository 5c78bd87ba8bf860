"""Regenerates the worked-example workbooks in this directory."""
import json
from pathlib import Path

HERE = Path(__file__).parent

SALES_HEADER = ["Type", "City", "June", "July", "Aug", "Total", "Profit"]
SALES = [
    ["Vanilla", "Florence", 610, 190, 670, 1470, "YES"],
    ["Banana", "Stockholm", 170, 690, 520, 1380, "YES"],
    ["Chocolate", "Copenhagen", 560, 320, 140, 1020, "YES"],
    ["Banana", "Berlin", 610, 640, 320, 1570, "NO"],
    ["Stracciatella", "Florence", 300, 270, 290, 860, "NO"],
    ["Chocolate", "Milan", 430, 350, "?", "?", "?"],
    ["Banana", "Aachen", 250, 650, "?", "?", "?"],
    ["Chocolate", "Brussels", 210, 280, "?", "?", "?"],
]
PROVIDER_HEADER = ["Type", "City", "ProviderID", "Price", "Quality"]
PROVIDER = [
    ["Vanilla", "Florence", 1, "Cheap", "Bad"],
    ["Vanilla", "Florence", 2, "Regular", "Good"],
    ["Stracciatella", "Florence", 1, "Regular", "Great"],
    ["Chocolate", "Copenhagen", 3, "Cheap", "Good"],
    ["Chocolate", "Milan", 4, "Regular", "Good"],
    ["Chocolate", "Milan", 5, "Expensive", "Great"],
    ["Chocolate", "Brussels", 6, "Regular", "Good"],
    ["Chocolate", "Brussels", 6, "Expensive", "Good"],
]
CITIES_HEADER = ["City", "Touristic", "Weather", "Nat"]
CITIES = [
    ["Florence", "High", "Hot", "IT"],
    ["Stockholm", "High", "Cold", "SE"],
    ["Copenhagen", "High", "Cold", "DK"],
    ["Berlin", "Very High", "Mild", "DE"],
    ["Aachen", "Low", "Mild", "DE"],
    ["Brussels", "Medium", "Mild", "BE"],
    ["Milan", "Medium", "Hot", "IT"],
    ["Munich", "Medium", "Mild", "DE"],
    ["Paris", "Very High", "Mild", "FR"],
    ["Turin", "High", "Hot", "IT"],
    ["Seville", "High", "Hot", "ES"],
    ["Valencia", "High", "Hot", "ES"],
]
MONTHS = ["June", "July", "Aug", "Total", "Profit"]


def ref(table, row, col):
    """0-based in, 1-based out."""
    return {"table": table, "row": row + 1, "col": col + 1}


def write(name, tables, colorings=(), foreign_keys=()):
    doc = {
        "tables": [{"name": n, "header": h, "rows": r} for n, h, r in tables],
        "schema": {"foreign_keys": list(foreign_keys)},
        "sketch": {"colorings": list(colorings), "machine_generated": []},
    }
    (HERE / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def raw_sales():
    rows = []
    for sale in SALES:
        rows.append([sale[1], None, None])
        rows.append([sale[0], MONTHS[0], sale[2]])
        for month, value in zip(MONTHS[1:], sale[3:]):
            rows.append([None, month, value])
    return rows


def main():
    raw = raw_sales()
    blue = [ref("sales_raw", 0, 0), ref("sales_raw", 1, 0)] + [ref("sales_raw", r, 2) for r in range(1, 6)]
    milan = 6 * 5  # Milan block
    red = [ref("sales_raw", r, 1) for r in range(milan + 1, milan + 6)]
    write("icecream_raw.vsw.json", [("sales_raw", ["A", "B", "C"], raw)],
          [{"color": "blue", "role": "group", "cells": blue},
           {"color": "red", "role": "group", "cells": red}])

    write("icecream_sales.vsw.json", [("sales", SALES_HEADER, SALES)])

    positives = [ref("sales", 0, c) for c in (0, 1, 2, 3, 4, 6)]
    positives += [ref("sales", 2, 0), ref("sales", 5, 0), ref("sales", 5, 1), ref("sales", 7, 0), ref("sales", 7, 1)]
    positives += [ref("provider", 0, c) for c in (0, 1, 3, 4)]
    positives += [ref("provider", 1, 0), ref("provider", 1, 3), ref("provider", 3, 0)]
    negatives = [ref("provider", 5, 3), ref("provider", 7, 3)]
    fk = {"from_table": "sales", "from_cols": ["Type", "City"], "to_table": "provider", "to_cols": ["Type", "City"]}
    write("selection.vsw.json", [("sales", SALES_HEADER, SALES), ("provider", PROVIDER_HEADER, PROVIDER)],
          [{"color": "blue", "role": "positive", "cells": positives},
           {"color": "pink", "role": "negative", "cells": negatives}],
          [fk])

    def row_cells(rows_1based):
        return [ref("cities", r - 1, c) for r in rows_1based for c in range(len(CITIES_HEADER))]

    write("cities.vsw.json", [("cities", CITIES_HEADER, CITIES)],
          [{"color": "green", "role": "group", "cells": row_cells([1, 7])},
           {"color": "lavender", "role": "group", "cells": row_cells([2, 6])},
           {"color": "blue", "role": "group", "cells": row_cells([4, 11])}])


if __name__ == "__main__":
    main()
